#include "trailnav/sensor_pipeline.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>

#include "trailnav/error.hpp"
#include "trailnav/kdtree.hpp"

namespace trailnav
{

void CameraIntrinsics::validate() const
{
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw DomainError("focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw DomainError("image dimensions must be positive");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw DomainError("principal point outside the image");
  }
}

CameraIntrinsics CameraIntrinsics::from_horizontal_fov(int width, int height, double hfov_rad)
{
  CameraIntrinsics k;
  k.width = width;
  k.height = height;
  k.cx = (width - 1) / 2.0;
  k.cy = (height - 1) / 2.0;
  k.fx = (width / 2.0) / std::tan(hfov_rad / 2.0);
  k.fy = k.fx;
  k.validate();
  return k;
}

LabeledPointCloud::LabeledPointCloud(std::vector<Point3> points, std::vector<SemanticClass> labels, Frame frame)
: points_(std::move(points)), labels_(std::move(labels)), frame_(frame)
{
  if (points_.size() != labels_.size()) {
    throw ShapeError("point and label counts differ");
  }
  require_finite(points_);
}

LabeledPointCloud transform_apply(const RigidTransform & transform, const LabeledPointCloud & cloud, Frame target)
{
  return LabeledPointCloud(transform_points(transform, cloud.points()), cloud.labels(), target);
}

LabeledPointCloud backproject(const SensorFrame & frame, const CameraIntrinsics & k)
{
  k.validate();
  if (frame.depth.width != k.width || frame.depth.height != k.height ||
    frame.labels.width != k.width || frame.labels.height != k.height ||
    frame.depth.data.size() != frame.labels.data.size() ||
    frame.depth.data.size() != static_cast<std::size_t>(k.width) * static_cast<std::size_t>(k.height))
  {
    throw ShapeError("depth/label rasters do not match the camera intrinsics");
  }
  std::vector<Point3> pts;
  std::vector<SemanticClass> labels;
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const double z = frame.depth.at(u, v);
      if (!std::isfinite(z) || z <= 0.0) {
        continue;
      }
      pts.emplace_back((u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z);
      labels.push_back(frame.labels.at(u, v));
    }
  }
  return LabeledPointCloud(std::move(pts), std::move(labels), Frame::sensor);
}

LabeledPointCloud range_height_filter(const LabeledPointCloud & cloud, const RigidTransform & sensor_to_map,
  double robot_base_z, const RangeHeightLimits & limits)
{
  if (!(limits.min_range < limits.max_range)) {
    throw DomainError("min_range must be below max_range");
  }
  const double ceiling = robot_base_z + limits.max_height;
  std::vector<Point3> pts;
  std::vector<SemanticClass> labels;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3 & p = cloud.points()[i];
    const double range = p.norm();
    if (range < limits.min_range || range > limits.max_range) {
      continue;
    }
    if (sensor_to_map.apply(p).z() > ceiling) {
      continue;
    }
    pts.push_back(p);
    labels.push_back(cloud.labels()[i]);
  }
  return LabeledPointCloud(std::move(pts), std::move(labels), cloud.frame());
}

namespace
{

struct VoxelKey
{
  std::int64_t x, y, z;
  bool operator==(const VoxelKey &) const = default;
};

struct VoxelKeyHash
{
  std::size_t operator()(const VoxelKey & k) const noexcept
  {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.y) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) + 0x94D049BB133111EBull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

struct VoxelAccumulator
{
  Point3 sum = Point3::Zero();
  std::size_t count = 0;
  std::array<std::uint32_t, kNumClasses> votes{};
};

}  // namespace

LabeledPointCloud voxel_downsample(const LabeledPointCloud & cloud, double s)
{
  if (!(s > 0.0)) {
    throw DomainError("voxel size must be positive");
  }
  std::unordered_map<VoxelKey, std::size_t, VoxelKeyHash> slot_of;
  std::vector<VoxelAccumulator> voxels;
  slot_of.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3 & p = cloud.points()[i];
    const VoxelKey key{
      static_cast<std::int64_t>(std::floor(p.x() / s)),
      static_cast<std::int64_t>(std::floor(p.y() / s)),
      static_cast<std::int64_t>(std::floor(p.z() / s))};
    auto [it, inserted] = slot_of.try_emplace(key, voxels.size());
    if (inserted) {
      voxels.emplace_back();
    }
    auto & acc = voxels[it->second];
    acc.sum += p;
    ++acc.count;
    ++acc.votes[ordinal(cloud.labels()[i])];
  }

  std::vector<Point3> pts;
  std::vector<SemanticClass> labels;
  pts.reserve(voxels.size());
  labels.reserve(voxels.size());
  for (const auto & acc : voxels) {
    pts.push_back(acc.sum / static_cast<double>(acc.count));
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c) {
      if (acc.votes[c] > acc.votes[best]) {
        best = c;
      }
    }
    labels.push_back(static_cast<SemanticClass>(best));
  }
  return LabeledPointCloud(std::move(pts), std::move(labels), cloud.frame());
}

std::vector<double> mean_knn_distances(const std::vector<Point3> & points, std::size_t k)
{
  if (k < 1) {
    throw DomainError("k must be at least 1");
  }
  if (points.size() <= k) {
    throw InsufficientPoints("statistical outlier removal needs more than k points");
  }
  const KdTree tree(points);
  std::vector<double> means(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto nn = tree.k_nearest(points[i], k, i);
    double sum = 0.0;
    for (const auto & n : nn) {
      sum += n.distance;
    }
    means[i] = sum / static_cast<double>(k);
  }
  return means;
}

LabeledPointCloud statistical_outlier_removal(const LabeledPointCloud & cloud, std::size_t k, double alpha)
{
  if (!(alpha > 0.0)) {
    throw DomainError("alpha must be positive");
  }
  const auto means = mean_knn_distances(cloud.points(), k);
  double mu = 0.0;
  for (double m : means) {
    mu += m;
  }
  mu /= static_cast<double>(means.size());
  double var = 0.0;
  for (double m : means) {
    var += (m - mu) * (m - mu);
  }
  const double sigma = std::sqrt(var / static_cast<double>(means.size()));
  const double lo = mu - alpha * sigma;
  const double hi = mu + alpha * sigma;

  std::vector<Point3> pts;
  std::vector<SemanticClass> labels;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (means[i] >= lo && means[i] <= hi) {
      pts.push_back(cloud.points()[i]);
      labels.push_back(cloud.labels()[i]);
    }
  }
  return LabeledPointCloud(std::move(pts), std::move(labels), cloud.frame());
}

namespace
{

constexpr std::uint32_t kRasterVersion = 1;

void write_header(std::ostream & out, const char (&magic)[5], int w, int h)
{
  const std::uint32_t fields[3] = {static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h), kRasterVersion};
  out.write(magic, 4);
  out.write(reinterpret_cast<const char *>(fields), sizeof(fields));
}

std::pair<int, int> read_header(std::istream & in, const char (&magic)[5])
{
  char got[4];
  std::uint32_t fields[3];
  in.read(got, 4);
  in.read(reinterpret_cast<char *>(fields), sizeof(fields));
  if (!in) {
    throw ParseError("raster header truncated");
  }
  if (std::memcmp(got, magic, 4) != 0) {
    throw ParseError(std::string("raster magic mismatch, expected ") + magic);
  }
  if (fields[2] != kRasterVersion) {
    throw ParseError("unsupported raster version " + std::to_string(fields[2]));
  }
  if (fields[0] == 0 || fields[1] == 0 || fields[0] > (1u << 16) || fields[1] > (1u << 16)) {
    throw ParseError("raster dimensions out of range");
  }
  return {static_cast<int>(fields[0]), static_cast<int>(fields[1])};
}

}  // namespace

void write_depth_raster(std::ostream & out, const Raster<float> & depth)
{
  write_header(out, "TNDP", depth.width, depth.height);
  out.write(reinterpret_cast<const char *>(depth.data.data()),
    static_cast<std::streamsize>(depth.data.size() * sizeof(float)));
}

Raster<float> read_depth_raster(std::istream & in)
{
  const auto [w, h] = read_header(in, "TNDP");
  Raster<float> r(w, h);
  in.read(reinterpret_cast<char *>(r.data.data()), static_cast<std::streamsize>(r.data.size() * sizeof(float)));
  if (!in) {
    throw ParseError("depth raster payload truncated");
  }
  return r;
}

void write_label_raster(std::ostream & out, const Raster<SemanticClass> & labels)
{
  write_header(out, "TNLB", labels.width, labels.height);
  out.write(reinterpret_cast<const char *>(labels.data.data()), static_cast<std::streamsize>(labels.data.size()));
}

Raster<SemanticClass> read_label_raster(std::istream & in)
{
  const auto [w, h] = read_header(in, "TNLB");
  Raster<SemanticClass> r(w, h);
  std::vector<std::uint8_t> raw(r.data.size());
  in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) {
    throw ParseError("label raster payload truncated");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto c = class_from_ordinal(raw[i]);
    if (!c) {
      throw ParseError("label raster holds invalid class ordinal " + std::to_string(raw[i]));
    }
    r.data[i] = *c;
  }
  return r;
}

namespace
{
template<typename Fn>
void with_output(const std::filesystem::path & path, Fn && fn)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot open " + path.string() + " for writing");
  }
  fn(out);
}

template<typename Fn>
auto with_input(const std::filesystem::path & path, Fn && fn)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  return fn(in);
}
}  // namespace

void write_depth_file(const std::filesystem::path & path, const Raster<float> & depth)
{
  with_output(path, [&](std::ostream & o) {write_depth_raster(o, depth);});
}

Raster<float> read_depth_file(const std::filesystem::path & path)
{
  return with_input(path, [](std::istream & i) {return read_depth_raster(i);});
}

void write_label_file(const std::filesystem::path & path, const Raster<SemanticClass> & labels)
{
  with_output(path, [&](std::ostream & o) {write_label_raster(o, labels);});
}

Raster<SemanticClass> read_label_file(const std::filesystem::path & path)
{
  return with_input(path, [](std::istream & i) {return read_label_raster(i);});
}

}  // namespace trailnav
