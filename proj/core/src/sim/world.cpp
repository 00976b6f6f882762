#include "trailnav/sim/world.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "trailnav/error.hpp"
#include "trailnav/random.hpp"
#include "trailnav/terrain.hpp"

namespace trailnav::sim
{

bool Obstacle::covers(double x, double y) const
{
  const double dx = x - cx;
  const double dy = y - cy;
  if (shape == Shape::cylinder) {
    return dx * dx + dy * dy <= radius * radius;
  }
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double lx = c * dx + s * dy;
  const double ly = -s * dx + c * dy;
  return std::abs(lx) <= half_x && std::abs(ly) <= half_y;
}

void WorldParams::validate() const
{
  auto positive = [](double v, const char * name) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ParamError(std::string(name) + " must be positive");
      }
    };
  positive(extent_x, "extent_x");
  positive(extent_y, "extent_y");
  positive(resolution, "resolution");
  positive(trail_length, "trail_length");
  positive(trail_width, "trail_width");
  positive(relief_wavelength, "relief_wavelength");
  if (!(obstacle_density >= 0.0) || !(relief_amplitude >= 0.0) || !(roughness >= 0.0) || !(trail_roughness >= 0.0)) {
    throw ParamError("densities and amplitudes must be non-negative");
  }
  if (!(vegetation_fraction >= 0.0 && vegetation_fraction <= 1.0) || !(rough_fraction >= 0.0 && rough_fraction <= 1.0)) {
    throw ParamError("patch fractions must lie in [0, 1]");
  }
  if (trail_harmonics_min < 1 || trail_harmonics_max < trail_harmonics_min) {
    throw ParamError("trail harmonics must satisfy 1 <= min <= max");
  }
  if (!(end_margin >= 0.0) || 2.0 * end_margin >= extent_x) {
    throw ParamError("end_margin leaves no room between start and goal");
  }
  if (extent_x / resolution > 20000.0 || extent_y / resolution > 20000.0) {
    throw ParamError("grid too large");
  }
  const double baseline = extent_x - 2.0 * end_margin;
  if (trail_length < baseline) {
    throw ParamError("trail_length is shorter than the start-goal distance");
  }
  if (trail_length > std::hypot(extent_x, extent_y) * 4.0) {
    throw ParamError("trail_length cannot fit inside the extent");
  }
}

bool WorldModel::contains(double x, double y) const
{
  return x >= 0.0 && y >= 0.0 && x < size_x() && y < size_y();
}

double WorldModel::height_at(double x, double y) const
{
  const double fx = std::clamp(x / resolution, 0.0, static_cast<double>(nx));
  const double fy = std::clamp(y / resolution, 0.0, static_cast<double>(ny));
  const int i = std::min(static_cast<int>(fx), nx - 1);
  const int j = std::min(static_cast<int>(fy), ny - 1);
  const double ax = fx - i;
  const double ay = fy - j;
  const double h00 = vertex_height(i, j);
  const double h10 = vertex_height(i + 1, j);
  const double h01 = vertex_height(i, j + 1);
  const double h11 = vertex_height(i + 1, j + 1);
  return (h00 * (1.0 - ax) + h10 * ax) * (1.0 - ay) + (h01 * (1.0 - ax) + h11 * ax) * ay;
}

std::optional<std::size_t> WorldModel::cell_index(double x, double y) const
{
  if (!contains(x, y)) {
    return std::nullopt;
  }
  const int i = std::min(static_cast<int>(x / resolution), nx - 1);
  const int j = std::min(static_cast<int>(y / resolution), ny - 1);
  return static_cast<std::size_t>(j) * nx + i;
}

SemanticClass WorldModel::class_at(double x, double y) const
{
  const auto c = cell_index(x, y);
  return c ? classes[*c] : SemanticClass::unlabeled;
}

double WorldModel::hazard_at(double x, double y) const
{
  const auto c = cell_index(x, y);
  return c ? hazard[*c] : std::numeric_limits<double>::infinity();
}

bool WorldModel::impassable_cell(std::size_t cell) const
{
  return class_speed_factor(classes[cell]) <= 0.0 || hazard[cell] >= kHazardThreshold;
}

bool WorldModel::impassable_at(double x, double y) const
{
  const auto c = cell_index(x, y);
  return !c || impassable_cell(*c);
}

Point3 WorldModel::cell_center(std::size_t cell) const
{
  const double x = (static_cast<double>(cell % nx) + 0.5) * resolution;
  const double y = (static_cast<double>(cell / nx) + 0.5) * resolution;
  return {x, y, height_at(x, y)};
}

void WorldModel::finalize()
{
  max_height_ = -std::numeric_limits<double>::infinity();
  for (double h : heights) {
    max_height_ = std::max(max_height_, h);
  }
  for (const auto & o : obstacles) {
    max_height_ = std::max(max_height_, o.base_z + o.height);
  }
  // Each bilinear partial is a blend of edge differences, so the largest
  // edge difference bounds both components.
  double edge = 0.0;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      if (i < nx) {
        edge = std::max(edge, std::abs(vertex_height(i + 1, j) - vertex_height(i, j)));
      }
      if (j < ny) {
        edge = std::max(edge, std::abs(vertex_height(i, j + 1) - vertex_height(i, j)));
      }
    }
  }
  max_slope_ = std::sqrt(2.0) * edge / resolution;
}

double class_speed_factor(SemanticClass c)
{
  switch (c) {
    case SemanticClass::trail: return 1.0;
    case SemanticClass::grass: return 0.75;
    case SemanticClass::rough_trail: return 0.6;
    case SemanticClass::vegetation: return 0.5;
    default: return 0.0;
  }
}

namespace
{

struct Harmonic
{
  int k;
  double weight;
};

double lateral_offset(const std::vector<Harmonic> & hs, double amplitude, double t)
{
  double f = 0.0;
  for (const auto & h : hs) {
    f += h.weight * std::sin(h.k * M_PI * t);
  }
  return amplitude * f;
}

double arc_length(const std::vector<Harmonic> & hs, double amplitude, double baseline)
{
  constexpr int kSamples = 4000;
  double len = 0.0;
  double px = 0.0;
  double py = 0.0;
  for (int i = 1; i <= kSamples; ++i) {
    const double t = static_cast<double>(i) / kSamples;
    const double x = t * baseline;
    const double y = lateral_offset(hs, amplitude, t);
    len += std::hypot(x - px, y - py);
    px = x;
    py = y;
  }
  return len;
}

double max_abs_offset(const std::vector<Harmonic> & hs)
{
  double m = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    m = std::max(m, std::abs(lateral_offset(hs, 1.0, i / 2000.0)));
  }
  return m;
}

double segment_distance(const Point3 & a, const Point3 & b, double x, double y)
{
  const double sx = b.x() - a.x();
  const double sy = b.y() - a.y();
  const double len2 = sx * sx + sy * sy;
  double f = len2 > 0.0 ? ((x - a.x()) * sx + (y - a.y()) * sy) / len2 : 0.0;
  f = std::clamp(f, 0.0, 1.0);
  return std::hypot(x - a.x() - f * sx, y - a.y() - f * sy);
}

double polyline_distance(const std::vector<Point3> & line, double x, double y)
{
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    best = std::min(best, segment_distance(line[i], line[i + 1], x, y));
  }
  return best;
}

/// Position and heading at arc length s along the polyline.
std::pair<Point3, double> along(const std::vector<Point3> & line, double s)
{
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const Point3 d = line[i + 1] - line[i];
    const double len = std::hypot(d.x(), d.y());
    if (acc + len >= s || i + 2 == line.size()) {
      const double f = len > 0.0 ? std::clamp((s - acc) / len, 0.0, 1.0) : 0.0;
      return {line[i] + d * f, std::atan2(d.y(), d.x())};
    }
    acc += len;
  }
  return {line.front(), 0.0};
}

double polyline_length(const std::vector<Point3> & line)
{
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    len += std::hypot(line[i + 1].x() - line[i].x(), line[i + 1].y() - line[i].y());
  }
  return len;
}

struct Disc
{
  double x, y, r;
};

}  // namespace

WorldModel generate_world(std::uint64_t seed, const WorldParams & params)
{
  params.validate();
  Rng rng(mix_seed(seed, 0x57'4F'52'4C'44ull));

  WorldModel w;
  w.seed = seed;
  w.resolution = params.resolution;
  w.nx = static_cast<int>(std::ceil(params.extent_x / params.resolution - 1e-9));
  w.ny = static_cast<int>(std::ceil(params.extent_y / params.resolution - 1e-9));
  w.trail_width = params.trail_width;

  // Trail: a baseline along x with a sum-of-sines lateral offset, scaled so
  // the arc length matches the request.
  std::vector<Harmonic> harmonics;
  for (int k = params.trail_harmonics_min; k <= params.trail_harmonics_max; ++k) {
    const double sign = uniform01(rng) < 0.5 ? -1.0 : 1.0;
    harmonics.push_back({k, sign * uniform(rng, 0.3, 1.0)});
  }
  const double baseline = params.extent_x - 2.0 * params.end_margin;
  const double mid_y = params.extent_y / 2.0;
  const double room = mid_y - params.trail_width / 2.0 - 1.0;
  const double peak = max_abs_offset(harmonics);
  if (room <= 0.0 || peak <= 0.0) {
    throw ParamError("extent_y leaves no room for the trail");
  }
  const double amp_max = room / peak;
  if (arc_length(harmonics, amp_max, baseline) < params.trail_length) {
    throw ParamError("trail_length cannot fit inside the extent");
  }
  double lo = 0.0;
  double hi = amp_max;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (arc_length(harmonics, mid, baseline) < params.trail_length ? lo : hi) = mid;
  }
  const double amplitude = 0.5 * (lo + hi);
  const auto n_trail = static_cast<int>(std::ceil(params.trail_length / 0.25));
  for (int i = 0; i <= n_trail; ++i) {
    const double t = static_cast<double>(i) / n_trail;
    w.trail.emplace_back(params.end_margin + t * baseline, mid_y + lateral_offset(harmonics, amplitude, t), 0.0);
  }

  // Relief: three plane waves plus lattice bumps.
  std::array<std::array<double, 4>, 3> waves{};
  for (auto & wave : waves) {
    const double theta = uniform(rng, 0.0, 2.0 * M_PI);
    const double k = 2.0 * M_PI / params.relief_wavelength * uniform(rng, 0.8, 1.2);
    wave = {k * std::cos(theta), k * std::sin(theta), uniform(rng, 0.0, 2.0 * M_PI), 0.0};
  }
  constexpr double kBumpSpacing = 0.3;
  const int bx = static_cast<int>(std::ceil(w.size_x() / kBumpSpacing)) + 2;
  const int by = static_cast<int>(std::ceil(w.size_y() / kBumpSpacing)) + 2;
  std::vector<double> bumps(static_cast<std::size_t>(bx) * by);
  for (auto & b : bumps) {
    b = uniform(rng, -1.0, 1.0) * params.roughness;
  }
  auto bump = [&](double x, double y) {
      const double fx = x / kBumpSpacing;
      const double fy = y / kBumpSpacing;
      const int i = static_cast<int>(fx);
      const int j = static_cast<int>(fy);
      const double ax = fx - i;
      const double ay = fy - j;
      auto at = [&](int a, int b) {return bumps[static_cast<std::size_t>(b) * bx + a];};
      return (at(i, j) * (1 - ax) + at(i + 1, j) * ax) * (1 - ay) + (at(i, j + 1) * (1 - ax) + at(i + 1, j + 1) * ax) * ay;
    };
  w.heights.resize(static_cast<std::size_t>(w.nx + 1) * (w.ny + 1));
  for (int j = 0; j <= w.ny; ++j) {
    for (int i = 0; i <= w.nx; ++i) {
      const double x = i * w.resolution;
      const double y = j * w.resolution;
      double h = 0.0;
      for (const auto & wave : waves) {
        h += std::sin(wave[0] * x + wave[1] * y + wave[2]);
      }
      w.heights[static_cast<std::size_t>(j) * (w.nx + 1) + i] = params.relief_amplitude * h / 3.0 + bump(x, y);
    }
  }
  if (params.trail_roughness > 0.0) {
    // Own stream so the tread does not shift any other feature.
    Rng tread_rng(mix_seed(seed, 7));
    constexpr double kTreadSpacing = 0.5;
    constexpr double kTreadFade = 0.2;
    const int tx = static_cast<int>(std::ceil(w.size_x() / kTreadSpacing)) + 2;
    const int ty = static_cast<int>(std::ceil(w.size_y() / kTreadSpacing)) + 2;
    std::vector<double> tread(static_cast<std::size_t>(tx) * ty);
    // Alternating signs keep the relief even: every crest sits next to a
    // trough, so the tread is uniformly rough without isolated spikes.
    for (int v = 0; v < ty; ++v) {
      for (int u = 0; u < tx; ++u) {
        const double sign = (u + v) % 2 == 0 ? 1.0 : -1.0;
        tread[static_cast<std::size_t>(v) * tx + u] = sign * uniform(tread_rng, 0.7, 1.0) * params.trail_roughness;
      }
    }
    const double half = params.trail_width / 2.0;
    for (int j = 0; j <= w.ny; ++j) {
      for (int i = 0; i <= w.nx; ++i) {
        const double x = i * w.resolution;
        const double y = j * w.resolution;
        const double d = polyline_distance(w.trail, x, y);
        if (d >= half) {
          continue;
        }
        const double fade = std::min(1.0, (half - d) / kTreadFade);
        const double fx = x / kTreadSpacing;
        const double fy = y / kTreadSpacing;
        const int a = static_cast<int>(fx);
        const int b = static_cast<int>(fy);
        const double ax = fx - a;
        const double ay = fy - b;
        auto at = [&](int u, int v) {return tread[static_cast<std::size_t>(v) * tx + u];};
        const double tread_bump = (at(a, b) * (1 - ax) + at(a + 1, b) * ax) * (1 - ay) +
          (at(a, b + 1) * (1 - ax) + at(a + 1, b + 1) * ax) * ay;
        // The tread replaces the fine grass bumps instead of adding to them.
        w.heights[static_cast<std::size_t>(j) * (w.nx + 1) + i] += fade * (tread_bump - bump(x, y));
      }
    }
  }
  for (auto & p : w.trail) {
    p.z() = w.height_at(p.x(), p.y());
  }
  w.start = w.trail.front();
  w.goal = w.trail.back();

  // Ground classes.
  const double area = params.extent_x * params.extent_y;
  auto place_discs = [&](double fraction, double rmin, double rmax) {
      std::vector<Disc> discs;
      const double mean_r2 = (rmin * rmin + rmin * rmax + rmax * rmax) / 3.0;
      const auto n = static_cast<std::size_t>(std::llround(fraction * area / (M_PI * mean_r2)));
      for (std::size_t i = 0; i < n; ++i) {
        discs.push_back({uniform(rng, 0.0, params.extent_x), uniform(rng, 0.0, params.extent_y), uniform(rng, rmin, rmax)});
      }
      return discs;
    };
  const auto vegetation = place_discs(params.vegetation_fraction, 1.0, 3.0);
  const auto rough = place_discs(params.rough_fraction, 0.5, 1.5);
  auto in_any = [](const std::vector<Disc> & ds, double x, double y) {
      for (const auto & d : ds) {
        if ((x - d.x) * (x - d.x) + (y - d.y) * (y - d.y) <= d.r * d.r) {
          return true;
        }
      }
      return false;
    };

  const std::size_t n_cells = static_cast<std::size_t>(w.nx) * w.ny;
  std::vector<double> trail_dist(n_cells);
  w.classes.assign(n_cells, SemanticClass::grass);
  for (std::size_t c = 0; c < n_cells; ++c) {
    const double x = (static_cast<double>(c % w.nx) + 0.5) * w.resolution;
    const double y = (static_cast<double>(c / w.nx) + 0.5) * w.resolution;
    trail_dist[c] = polyline_distance(w.trail, x, y);
    if (trail_dist[c] <= params.trail_width / 2.0) {
      w.classes[c] = SemanticClass::trail;
    } else if (in_any(rough, x, y)) {
      w.classes[c] = SemanticClass::rough_trail;
    } else if (in_any(vegetation, x, y)) {
      w.classes[c] = SemanticClass::vegetation;
    }
  }

  // On-trail hazards spanning the full trail width, then standing trees.
  const double trail_len = polyline_length(w.trail);
  for (std::size_t i = 0; i < params.hazard_count; ++i) {
    const double frac = 0.15 + 0.7 * (static_cast<double>(i) + 0.5) / static_cast<double>(params.hazard_count);
    const double s = trail_len * std::clamp(frac + uniform(rng, -0.03, 0.03), 0.1, 0.9);
    const auto [p, heading] = along(w.trail, s);
    Obstacle o;
    o.shape = Shape::box;
    o.cx = p.x();
    o.cy = p.y();
    o.yaw = heading;
    if (params.mixed_hazards && i % 2 == 1) {
      o.label = SemanticClass::structure;
      o.half_x = 0.5;
      o.half_y = params.trail_width / 2.0 + 0.5;
      o.height = 1.2;
    } else {
      o.label = SemanticClass::tree_trunk;
      o.half_x = 0.2;
      o.half_y = params.trail_width / 2.0 + 0.7;
      o.height = 0.35;
    }
    w.obstacles.push_back(o);
  }
  const std::size_t hazards_end = w.obstacles.size();
  const auto n_trees = static_cast<std::size_t>(std::llround(params.obstacle_density * area / 100.0));
  for (std::size_t i = 0; i < n_trees; ++i) {
    for (int attempt = 0; attempt < 60; ++attempt) {
      const double x = uniform(rng, 0.5, params.extent_x - 0.5);
      const double y = uniform(rng, 0.5, params.extent_y - 0.5);
      const double r = uniform(rng, 0.15, 0.3);
      const double h = uniform(rng, 3.0, 6.0);
      if (polyline_distance(w.trail, x, y) < params.trail_width / 2.0 + 1.0 + r) {
        continue;
      }
      if (std::hypot(x - w.start.x(), y - w.start.y()) < 2.5 || std::hypot(x - w.goal.x(), y - w.goal.y()) < 2.5) {
        continue;
      }
      bool clash = false;
      for (std::size_t k = 0; k < w.obstacles.size() && !clash; ++k) {
        const auto & o = w.obstacles[k];
        const double gap = k < hazards_end ? o.half_y + 1.5 : o.radius + 1.0;
        clash = std::hypot(x - o.cx, y - o.cy) < gap + r;
      }
      if (clash) {
        continue;
      }
      Obstacle o;
      o.shape = Shape::cylinder;
      o.label = SemanticClass::tree_trunk;
      o.cx = x;
      o.cy = y;
      o.radius = r;
      o.height = h;
      w.obstacles.push_back(o);
      break;
    }
  }
  // Sink each base below the lowest ground under its footprint so no ray
  // slips underneath; the top stays at the requested height above the center.
  for (auto & o : w.obstacles) {
    const double top = w.height_at(o.cx, o.cy) + o.height;
    const double ext = o.shape == Shape::cylinder ? o.radius : std::hypot(o.half_x, o.half_y);
    double low = w.height_at(o.cx, o.cy);
    for (int k = 0; k < 16; ++k) {
      const double a = k * M_PI / 8.0;
      low = std::min(low, w.height_at(o.cx + ext * std::cos(a), o.cy + ext * std::sin(a)));
    }
    o.base_z = low - 0.02;
    o.height = top - o.base_z;
  }

  // Obstacle footprints and the ground-truth hazard field.
  w.hazard.assign(n_cells, 0.0);
  std::vector<double> center_h(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    const Point3 p = w.cell_center(c);
    center_h[c] = p.z();
  }
  const double r = TerrainParams{}.neighborhood_radius;
  const int reach = static_cast<int>(std::floor(r / w.resolution + 1e-9));
  for (int j = 0; j < w.ny; ++j) {
    for (int i = 0; i < w.nx; ++i) {
      const std::size_t c = static_cast<std::size_t>(j) * w.nx + i;
      double z_min = center_h[c];
      for (int dj = -reach; dj <= reach; ++dj) {
        for (int di = -reach; di <= reach; ++di) {
          const int a = i + di;
          const int b = j + dj;
          if (a < 0 || b < 0 || a >= w.nx || b >= w.ny || (di * di + dj * dj) * w.resolution * w.resolution > r * r + 1e-12) {
            continue;
          }
          z_min = std::min(z_min, center_h[static_cast<std::size_t>(b) * w.nx + a]);
        }
      }
      const double x = (i + 0.5) * w.resolution;
      const double y = (j + 0.5) * w.resolution;
      const double e = 0.5 * w.resolution;
      const double gx = (w.height_at(x + e, y) - w.height_at(x - e, y)) / (2.0 * e);
      const double gy = (w.height_at(x, y + e) - w.height_at(x, y - e)) / (2.0 * e);
      w.hazard[c] = std::max(center_h[c] - z_min, r * std::hypot(gx, gy));
    }
  }
  for (std::size_t c = 0; c < n_cells; ++c) {
    const double x = (static_cast<double>(c % w.nx) + 0.5) * w.resolution;
    const double y = (static_cast<double>(c / w.nx) + 0.5) * w.resolution;
    for (const auto & o : w.obstacles) {
      if (o.covers(x, y)) {
        w.classes[c] = o.label;
        w.hazard[c] = std::max(w.hazard[c], o.base_z + o.height - center_h[c]);
        break;
      }
    }
  }
  w.finalize();
  return w;
}

std::vector<std::string_view> preset_names()
{
  return {"path1", "path2"};
}

std::optional<WorldModel> preset_world(std::string_view name)
{
  if (name == "path1") {
    WorldParams p;
    p.trail_length = 35.5;
    p.trail_harmonics_min = 1;
    p.trail_harmonics_max = 2;
    p.trail_roughness = 0.025;
    p.hazard_count = 2;
    p.obstacle_density = 1.0;
    return generate_world(1, p);
  }
  if (name == "path2") {
    WorldParams p;
    p.extent_x = 44.0;
    p.trail_length = 40.0;
    p.trail_harmonics_min = 1;
    p.trail_harmonics_max = 3;
    p.hazard_count = 3;
    p.trail_roughness = 0.025;
    p.mixed_hazards = true;
    p.obstacle_density = 1.5;
    return generate_world(2, p);
  }
  return std::nullopt;
}

namespace
{

constexpr std::array<char, 4> kWorldMagic{'T', 'N', 'W', 'D'};
constexpr std::uint32_t kWorldVersion = 1;

template<typename T>
void put(std::ostream & out, T v)
{
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

template<typename T>
T get(std::istream & in)
{
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) {
    throw ParseError("world file truncated");
  }
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

double get_finite(std::istream & in)
{
  const double v = get<double>(in);
  if (!std::isfinite(v)) {
    throw ParseError("world file holds a non-finite value");
  }
  return v;
}

void put_point(std::ostream & out, const Point3 & p)
{
  put(out, p.x());
  put(out, p.y());
  put(out, p.z());
}

Point3 get_point(std::istream & in)
{
  const double x = get_finite(in);
  const double y = get_finite(in);
  const double z = get_finite(in);
  return {x, y, z};
}

SemanticClass get_class(std::istream & in)
{
  const auto c = class_from_ordinal(get<std::uint8_t>(in));
  if (!c) {
    throw ParseError("world file holds an invalid class ordinal");
  }
  return *c;
}

}  // namespace

void save_world(std::ostream & out, const WorldModel & w)
{
  out.write(kWorldMagic.data(), kWorldMagic.size());
  put(out, kWorldVersion);
  put(out, w.seed);
  put(out, w.resolution);
  put(out, static_cast<std::uint32_t>(w.nx));
  put(out, static_cast<std::uint32_t>(w.ny));
  put(out, w.trail_width);
  put_point(out, w.start);
  put_point(out, w.goal);
  for (double h : w.heights) {
    put(out, h);
  }
  for (auto c : w.classes) {
    put(out, static_cast<std::uint8_t>(ordinal(c)));
  }
  for (double g : w.hazard) {
    put(out, g);
  }
  put(out, static_cast<std::uint32_t>(w.obstacles.size()));
  for (const auto & o : w.obstacles) {
    put(out, static_cast<std::uint8_t>(o.shape));
    put(out, static_cast<std::uint8_t>(ordinal(o.label)));
    for (double v : {o.cx, o.cy, o.base_z, o.height, o.radius, o.half_x, o.half_y, o.yaw}) {
      put(out, v);
    }
  }
  put(out, static_cast<std::uint32_t>(w.trail.size()));
  for (const auto & p : w.trail) {
    put_point(out, p);
  }
  if (!out) {
    throw InputError("failed to write world");
  }
}

WorldModel load_world(std::istream & in)
{
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kWorldMagic) {
    throw ParseError("not a world file (bad magic)");
  }
  if (get<std::uint32_t>(in) != kWorldVersion) {
    throw ParseError("unsupported world file version");
  }
  WorldModel w;
  w.seed = get<std::uint64_t>(in);
  w.resolution = get_finite(in);
  const auto nx = get<std::uint32_t>(in);
  const auto ny = get<std::uint32_t>(in);
  if (!(w.resolution > 0.0) || nx == 0 || ny == 0 || nx > 20000 || ny > 20000) {
    throw ParseError("world grid dimensions are invalid");
  }
  w.nx = static_cast<int>(nx);
  w.ny = static_cast<int>(ny);
  w.trail_width = get_finite(in);
  w.start = get_point(in);
  w.goal = get_point(in);
  w.heights.resize(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (auto & h : w.heights) {
    h = get_finite(in);
  }
  const std::size_t n_cells = static_cast<std::size_t>(nx) * ny;
  w.classes.resize(n_cells);
  for (auto & c : w.classes) {
    c = get_class(in);
  }
  w.hazard.resize(n_cells);
  for (auto & g : w.hazard) {
    g = get_finite(in);
  }
  const auto n_obstacles = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n_obstacles; ++i) {
    Obstacle o;
    const auto shape = get<std::uint8_t>(in);
    if (shape > 1) {
      throw ParseError("world file holds an unknown obstacle shape");
    }
    o.shape = static_cast<Shape>(shape);
    o.label = get_class(in);
    o.cx = get_finite(in);
    o.cy = get_finite(in);
    o.base_z = get_finite(in);
    o.height = get_finite(in);
    o.radius = get_finite(in);
    o.half_x = get_finite(in);
    o.half_y = get_finite(in);
    o.yaw = get_finite(in);
    w.obstacles.push_back(o);
  }
  const auto n_trail = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n_trail; ++i) {
    w.trail.push_back(get_point(in));
  }
  w.finalize();
  return w;
}

void save_world_file(const std::filesystem::path & path, const WorldModel & world)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot open " + path.string() + " for writing");
  }
  save_world(out, world);
}

WorldModel load_world_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open world file " + path.string());
  }
  return load_world(in);
}

}  // namespace trailnav::sim
