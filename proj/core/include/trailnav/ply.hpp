#ifndef TRAILNAV_PLY_HPP
#define TRAILNAV_PLY_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trailnav/geometry.hpp"

namespace trailnav::ply
{

enum class Format { ascii, binary_little_endian };

enum class Type { int8, uint8, int16, uint16, int32, uint32, float32, float64 };

struct Property
{
  std::string name;
  Type type;
};

/// Column-major view of the `vertex` element. Values are widened to double;
/// the declared type decides the on-disk encoding.
struct VertexTable
{
  std::vector<Property> properties;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const {return columns.empty() ? 0 : columns.front().size();}
  std::optional<std::size_t> find(const std::string & name) const;
  /// Throws ParseError if the property is absent.
  const std::vector<double> & column(const std::string & name) const;
  void add_column(std::string name, Type type, std::vector<double> values);
};

/// Reads the `vertex` element; other elements (faces etc.) are skipped.
/// Throws ParseError on malformed headers, truncated bodies or unsupported formats.
VertexTable read(std::istream & in);
VertexTable read_file(const std::filesystem::path & path);

void write(std::ostream & out, const VertexTable & table, Format format);
void write_file(const std::filesystem::path & path, const VertexTable & table, Format format);

VertexTable points_table(std::span<const Point3> points);
/// Requires float properties x, y, z. Throws ParseError / NonFiniteInput.
std::vector<Point3> points_from_table(const VertexTable & table);

void write_point_cloud(const std::filesystem::path & path, const PointCloud & cloud,
  Format format = Format::binary_little_endian);
PointCloud read_point_cloud(const std::filesystem::path & path, Frame frame = Frame::map);

}  // namespace trailnav::ply

#endif  // TRAILNAV_PLY_HPP
