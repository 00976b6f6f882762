#include "trailnav/fusion.hpp"

#include <algorithm>
#include <string>

#include "trailnav/error.hpp"
#include "trailnav/kdtree.hpp"

namespace trailnav
{

namespace
{
void require_unit(double v, const char * what)
{
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
  }
}
}  // namespace

SemanticCostTable::SemanticCostTable()
{
  scores_[ordinal(SemanticClass::grass)] = 0.7;
  scores_[ordinal(SemanticClass::rock)] = 0.2;
  scores_[ordinal(SemanticClass::trail)] = 1.0;
  scores_[ordinal(SemanticClass::root)] = 0.4;
  scores_[ordinal(SemanticClass::structure)] = 0.0;
  scores_[ordinal(SemanticClass::tree_trunk)] = 0.0;
  scores_[ordinal(SemanticClass::vegetation)] = 0.3;
  scores_[ordinal(SemanticClass::rough_trail)] = 0.5;
  scores_[ordinal(SemanticClass::unlabeled)] = 0.5;
}

void SemanticCostTable::set(SemanticClass c, double score)
{
  require_unit(score, "semantic score");
  scores_[ordinal(c)] = score;
}

FusionWeight::FusionWeight(double w)
: w_(w)
{
  require_unit(w, "fusion weight");
}

double fuse(double semantic_score, double geometric_score, FusionWeight w)
{
  require_unit(semantic_score, "semantic score");
  require_unit(geometric_score, "geometric score");
  const double t = semantic_score * w.value() + geometric_score * (1.0 - w.value());
  // Convex combination of unit-interval values; guard the last ulp.
  return std::clamp(t, 0.0, 1.0);
}

AssociationResult associate(const LabeledPointCloud & semantic, const GeometricCloud & geometric, double cutoff)
{
  if (semantic.empty() || geometric.points.empty()) {
    throw EmptyInput("association needs two non-empty clouds");
  }
  if (!(cutoff > 0.0)) {
    throw DomainError("association cutoff must be positive");
  }
  const KdTree geometric_tree(geometric.points);
  const KdTree semantic_tree(semantic.points());

  AssociationResult result;
  for (std::size_t i = 0; i < semantic.size(); ++i) {
    const Neighbor nn = geometric_tree.nearest(semantic.points()[i]);
    if (nn.distance <= cutoff) {
      result.pairs.push_back({i, nn.index, nn.distance});
    } else {
      result.unmatched_semantic.push_back(i);
    }
  }
  result.geometric_to_semantic.resize(geometric.points.size(), AssociationResult::kNone);
  for (std::size_t j = 0; j < geometric.points.size(); ++j) {
    const Neighbor nn = semantic_tree.nearest(geometric.points[j]);
    if (nn.distance <= cutoff) {
      result.geometric_to_semantic[j] = nn.index;
    }
  }
  return result;
}

FusedCloud fuse_clouds(const LabeledPointCloud & semantic, const GeometricCloud & geometric,
  const SemanticCostTable & table, FusionWeight w, const FusionParams & params)
{
  require_unit(params.unmatched_geometric_score, "unmatched geometric score");
  const AssociationResult assoc = associate(semantic, geometric, params.association_cutoff);

  std::vector<double> cg(semantic.size(), params.unmatched_geometric_score);
  for (const auto & pair : assoc.pairs) {
    cg[pair.semantic] = geometric_score(geometric.hazard[pair.geometric]);
  }

  FusedCloud out;
  out.frame = semantic.frame();
  out.points = semantic.points();
  out.labels = semantic.labels();
  out.traversability.reserve(semantic.size());
  for (std::size_t i = 0; i < semantic.size(); ++i) {
    out.traversability.push_back(fuse(table[semantic.labels()[i]], cg[i], w));
  }
  return out;
}

FusedCloud transform_apply(const RigidTransform & transform, const FusedCloud & cloud, Frame target)
{
  FusedCloud out = cloud;
  out.points = transform_points(transform, cloud.points);
  out.frame = target;
  return out;
}

}  // namespace trailnav
