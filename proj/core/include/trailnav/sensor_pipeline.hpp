#ifndef TRAILNAV_SENSOR_PIPELINE_HPP
#define TRAILNAV_SENSOR_PIPELINE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "trailnav/geometry.hpp"
#include "trailnav/semantic.hpp"

namespace trailnav
{

/// Pinhole model; pixel (u, v) is (column, row).
struct CameraIntrinsics
{
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Throws DomainError unless fx, fy > 0 and the principal point lies in the image.
  void validate() const;

  /// Square pixels, principal point at the image center.
  static CameraIntrinsics from_horizontal_fov(int width, int height, double hfov_rad);
};

/// Row-major H x W grid.
template<typename T>
struct Raster
{
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Raster() = default;
  Raster(int w, int h, T fill = T{})
  : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  T & at(int u, int v) {return data[static_cast<std::size_t>(v) * width + u];}
  const T & at(int u, int v) const {return data[static_cast<std::size_t>(v) * width + u];}
};

/// One synthetic camera exposure. Depth is the optical-axis Z in meters;
/// 0 or NaN means no return. `pose` maps the camera frame (x right, y down,
/// z forward) into the map frame.
struct SensorFrame
{
  Raster<float> depth;
  Raster<SemanticClass> labels;
  RigidTransform pose;
  double timestamp = 0.0;
};

/// Points with one class each. Lengths always match; all points finite.
class LabeledPointCloud
{
public:
  explicit LabeledPointCloud(Frame frame = Frame::sensor) : frame_(frame) {}
  /// Throws ShapeError on length mismatch, NonFiniteInput on NaN/Inf.
  LabeledPointCloud(std::vector<Point3> points, std::vector<SemanticClass> labels, Frame frame);

  Frame frame() const {return frame_;}
  std::size_t size() const {return points_.size();}
  bool empty() const {return points_.empty();}
  const std::vector<Point3> & points() const {return points_;}
  const std::vector<SemanticClass> & labels() const {return labels_;}

private:
  std::vector<Point3> points_;
  std::vector<SemanticClass> labels_;
  Frame frame_;
};

LabeledPointCloud transform_apply(const RigidTransform & transform, const LabeledPointCloud & cloud,
  Frame target = Frame::map);

/// X = (u - cx) Z / fx, Y = (v - cy) Z / fy for every pixel with finite Z > 0.
/// Output is in the sensor frame. Throws ShapeError if rasters disagree with K.
LabeledPointCloud backproject(const SensorFrame & frame, const CameraIntrinsics & intrinsics);

struct RangeHeightLimits
{
  double min_range = 0.5;
  double max_range = 6.0;
  /// Allowed height above the robot base, in the gravity-aligned map frame.
  double max_height = 0.8;
};

/// Keeps points with min_range <= |p| <= max_range (sensor frame) whose map
/// height does not exceed robot_base_z + max_height. Output stays in the
/// input (sensor) frame.
LabeledPointCloud range_height_filter(const LabeledPointCloud & cloud, const RigidTransform & sensor_to_map,
  double robot_base_z, const RangeHeightLimits & limits = {});

/// Voxel grid anchored at the origin, index floor(coord / s). One centroid per
/// occupied voxel, labelled with the majority class (ties -> lowest ordinal).
/// Output follows first-occupancy order of the voxels.
LabeledPointCloud voxel_downsample(const LabeledPointCloud & cloud, double voxel_size);

/// Per-point mean distance to the k nearest other points; keeps points whose
/// mean lies in [mu - alpha sigma, mu + alpha sigma] where mu, sigma are the
/// mean and population standard deviation of those per-point means.
LabeledPointCloud statistical_outlier_removal(const LabeledPointCloud & cloud, std::size_t k, double alpha);

/// Same statistic, exposed for diagnostics and tests.
std::vector<double> mean_knn_distances(const std::vector<Point3> & points, std::size_t k);

// Raster files: 16-byte header then row-major little-endian payload.
//   bytes 0-3   magic "TNDP" (depth, float32) or "TNLB" (labels, uint8 ordinal)
//   bytes 4-7   uint32 width
//   bytes 8-11  uint32 height
//   bytes 12-15 uint32 format version (1)
void write_depth_raster(std::ostream & out, const Raster<float> & depth);
Raster<float> read_depth_raster(std::istream & in);
void write_label_raster(std::ostream & out, const Raster<SemanticClass> & labels);
Raster<SemanticClass> read_label_raster(std::istream & in);

void write_depth_file(const std::filesystem::path & path, const Raster<float> & depth);
Raster<float> read_depth_file(const std::filesystem::path & path);
void write_label_file(const std::filesystem::path & path, const Raster<SemanticClass> & labels);
Raster<SemanticClass> read_label_file(const std::filesystem::path & path);

}  // namespace trailnav

#endif  // TRAILNAV_SENSOR_PIPELINE_HPP
