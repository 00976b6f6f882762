#ifndef TRAILNAV_SIM_WORLD_HPP
#define TRAILNAV_SIM_WORLD_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "trailnav/geometry.hpp"
#include "trailnav/semantic.hpp"

namespace trailnav::sim
{

enum class Shape : std::uint8_t
{
  cylinder = 0,
  box = 1,
};

/// Upright primitive standing on the ground at (cx, cy).
struct Obstacle
{
  Shape shape = Shape::cylinder;
  SemanticClass label = SemanticClass::tree_trunk;
  double cx = 0.0;
  double cy = 0.0;
  double base_z = 0.0;
  double height = 0.0;
  /// Cylinder radius.
  double radius = 0.0;
  /// Box half extents along its local x and y, and its heading.
  double half_x = 0.0;
  double half_y = 0.0;
  double yaw = 0.0;

  /// Footprint test in the ground plane.
  bool covers(double x, double y) const;
};

struct WorldParams
{
  double extent_x = 40.0;
  double extent_y = 30.0;
  double resolution = 0.1;
  double trail_length = 38.0;
  double trail_width = 1.6;
  /// Standing trees per 100 m^2.
  double obstacle_density = 1.0;
  std::size_t hazard_count = 2;
  /// Start and goal sit this far inside the x extent, on the y midline.
  double end_margin = 3.0;
  /// Sinusoid harmonics of the trail's lateral offset.
  int trail_harmonics_min = 1;
  int trail_harmonics_max = 3;
  double vegetation_fraction = 0.3;
  double rough_fraction = 0.05;
  /// Smooth large-scale relief.
  double relief_amplitude = 0.15;
  double relief_wavelength = 14.0;
  /// Small-scale bumps on a 0.3 m lattice.
  double roughness = 0.01;
  /// Tread texture of a worn path: a 0.5 m lattice of alternating-sign bumps
  /// that replaces the grass bumps inside the tread, fading out over its
  /// outer 0.2 m.
  double trail_roughness = 0.0;
  /// Every second on-trail hazard is a structure instead of a fallen log.
  bool mixed_hazards = false;

  /// Throws ParamError.
  void validate() const;
};

/// Immutable ground truth. The grid spans [0, nx*res] x [0, ny*res]; heights
/// live on the (nx+1) x (ny+1) vertices, classes and hazards on the cells.
class WorldModel
{
public:
  WorldModel() = default;

  std::uint64_t seed = 0;
  double resolution = 0.1;
  int nx = 0;
  int ny = 0;
  std::vector<double> heights;
  std::vector<SemanticClass> classes;
  /// Ground-truth geometric hazard per cell: obstacle height on obstacle
  /// cells, otherwise max(step, slope) of the ground within 0.5 m.
  std::vector<double> hazard;
  std::vector<Obstacle> obstacles;
  std::vector<Point3> trail;
  double trail_width = 0.0;
  Point3 start = Point3::Zero();
  Point3 goal = Point3::Zero();

  double size_x() const {return nx * resolution;}
  double size_y() const {return ny * resolution;}
  bool contains(double x, double y) const;

  /// Bilinear ground height; clamps to the border outside the grid.
  double height_at(double x, double y) const;
  double max_height() const {return max_height_;}
  /// Upper bound on the ground gradient magnitude.
  double max_slope() const {return max_slope_;}

  /// Cell of a ground position, or nullopt outside the grid.
  std::optional<std::size_t> cell_index(double x, double y) const;
  SemanticClass class_at(double x, double y) const;
  double hazard_at(double x, double y) const;
  /// tree_trunk/structure (and any class without a speed factor) or g >= 0.1.
  /// Outside the grid counts as impassable.
  bool impassable_at(double x, double y) const;
  bool impassable_cell(std::size_t cell) const;

  double vertex_height(int i, int j) const {return heights[static_cast<std::size_t>(j) * (nx + 1) + i];}
  Point3 cell_center(std::size_t cell) const;

  /// Recomputes cached values after the raw fields are filled in.
  void finalize();

private:
  double max_height_ = 0.0;
  double max_slope_ = 0.0;
};

/// Drive speed multiplier: trail 1.0, grass 0.75, rough_trail 0.6,
/// vegetation 0.5, everything else 0 (impassable).
double class_speed_factor(SemanticClass c);

/// Deterministic per seed. Throws ParamError for infeasible parameters,
/// including a trail that cannot fit inside the extent.
WorldModel generate_world(std::uint64_t seed, const WorldParams & params = {});

/// Named reference worlds: "path1" and "path2".
std::optional<WorldModel> preset_world(std::string_view name);
std::vector<std::string_view> preset_names();

// Binary world file, little endian:
//   "TNWD", uint32 version (1), uint64 seed, float64 resolution, uint32 nx, ny,
//   float64 trail_width, start xyz, goal xyz,
//   heights float64[(nx+1)(ny+1)], classes uint8[nx ny], hazard float64[nx ny],
//   uint32 obstacle count, per obstacle: uint8 shape, uint8 class,
//   float64 cx, cy, base_z, height, radius, half_x, half_y, yaw,
//   uint32 trail vertex count, float64 xyz per vertex.
void save_world(std::ostream & out, const WorldModel & world);
WorldModel load_world(std::istream & in);
void save_world_file(const std::filesystem::path & path, const WorldModel & world);
/// Throws ParseError on a malformed file, InputError when it cannot be opened.
WorldModel load_world_file(const std::filesystem::path & path);

}  // namespace trailnav::sim

#endif  // TRAILNAV_SIM_WORLD_HPP
