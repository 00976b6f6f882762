#include "trailnav/ply.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "trailnav/error.hpp"

namespace trailnav::ply
{

namespace
{

static_assert(std::endian::native == std::endian::little, "binary PLY codec assumes a little-endian host");

struct TypeInfo
{
  Type type;
  std::size_t size;
  std::array<const char *, 2> names;
};

constexpr std::array<TypeInfo, 8> kTypes = {{
  {Type::int8, 1, {"char", "int8"}},
  {Type::uint8, 1, {"uchar", "uint8"}},
  {Type::int16, 2, {"short", "int16"}},
  {Type::uint16, 2, {"ushort", "uint16"}},
  {Type::int32, 4, {"int", "int32"}},
  {Type::uint32, 4, {"uint", "uint32"}},
  {Type::float32, 4, {"float", "float32"}},
  {Type::float64, 8, {"double", "float64"}},
}};

const TypeInfo & info(Type t)
{
  return kTypes[static_cast<std::size_t>(t)];
}

Type parse_type(const std::string & s)
{
  for (const auto & ti : kTypes) {
    if (s == ti.names[0] || s == ti.names[1]) {
      return ti.type;
    }
  }
  throw ParseError("unknown PLY property type '" + s + "'");
}

template<typename T>
T load(const char * p)
{
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double decode(Type t, const char * p)
{
  switch (t) {
    case Type::int8: return load<std::int8_t>(p);
    case Type::uint8: return load<std::uint8_t>(p);
    case Type::int16: return load<std::int16_t>(p);
    case Type::uint16: return load<std::uint16_t>(p);
    case Type::int32: return load<std::int32_t>(p);
    case Type::uint32: return load<std::uint32_t>(p);
    case Type::float32: return load<float>(p);
    case Type::float64: return load<double>(p);
  }
  return 0.0;
}

template<typename T>
void store(std::ostream & out, double v)
{
  const T t = static_cast<T>(v);
  out.write(reinterpret_cast<const char *>(&t), sizeof(T));
}

void encode(std::ostream & out, Type t, double v)
{
  switch (t) {
    case Type::int8: store<std::int8_t>(out, v); break;
    case Type::uint8: store<std::uint8_t>(out, v); break;
    case Type::int16: store<std::int16_t>(out, v); break;
    case Type::uint16: store<std::uint16_t>(out, v); break;
    case Type::int32: store<std::int32_t>(out, v); break;
    case Type::uint32: store<std::uint32_t>(out, v); break;
    case Type::float32: store<float>(out, v); break;
    case Type::float64: store<double>(out, v); break;
  }
}

bool is_integral(Type t)
{
  return t != Type::float32 && t != Type::float64;
}

struct ElementDecl
{
  std::string name;
  std::size_t count = 0;
  // Scalar properties, or a list with (count type, item type).
  struct Prop
  {
    std::string name;
    Type type;
    bool is_list = false;
    Type count_type = Type::uint8;
  };
  std::vector<Prop> props;
};

struct Header
{
  Format format = Format::ascii;
  std::vector<ElementDecl> elements;
};

Header parse_header(std::istream & in)
{
  std::string line;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply") {
    throw ParseError("missing 'ply' magic");
  }
  Header h;
  bool have_format = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key.empty() || key == "comment" || key == "obj_info") {
      continue;
    }
    if (key == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii") {
        h.format = Format::ascii;
      } else if (fmt == "binary_little_endian") {
        h.format = Format::binary_little_endian;
      } else {
        throw ParseError("unsupported PLY format '" + fmt + "'");
      }
      have_format = true;
    } else if (key == "element") {
      ElementDecl e;
      long long count = -1;
      ls >> e.name >> count;
      if (e.name.empty() || count < 0) {
        throw ParseError("malformed element line: " + line);
      }
      e.count = static_cast<std::size_t>(count);
      h.elements.push_back(std::move(e));
    } else if (key == "property") {
      if (h.elements.empty()) {
        throw ParseError("property declared before any element");
      }
      std::string type;
      ls >> type;
      ElementDecl::Prop p;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> p.name;
        p.is_list = true;
        p.count_type = parse_type(count_type);
        p.type = parse_type(item_type);
      } else {
        p.type = parse_type(type);
        ls >> p.name;
      }
      if (p.name.empty()) {
        throw ParseError("property without a name: " + line);
      }
      h.elements.back().props.push_back(p);
    } else if (key == "end_header") {
      if (!have_format) {
        throw ParseError("PLY header lacks a format line");
      }
      return h;
    } else {
      throw ParseError("unexpected PLY header keyword '" + key + "'");
    }
  }
  throw ParseError("PLY header not terminated by end_header");
}

void read_exact(std::istream & in, char * dst, std::size_t n)
{
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw ParseError("PLY body truncated");
  }
}

double read_ascii_value(std::istream & in)
{
  std::string token;
  if (!(in >> token)) {
    throw ParseError("PLY body truncated");
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) {
      throw ParseError("bad numeric token '" + token + "'");
    }
    return v;
  } catch (const std::logic_error &) {
    throw ParseError("bad numeric token '" + token + "'");
  }
}

}  // namespace

std::optional<std::size_t> VertexTable::find(const std::string & name) const
{
  for (std::size_t i = 0; i < properties.size(); ++i) {
    if (properties[i].name == name) {
      return i;
    }
  }
  return std::nullopt;
}

const std::vector<double> & VertexTable::column(const std::string & name) const
{
  const auto i = find(name);
  if (!i) {
    throw ParseError("PLY vertex element has no property '" + name + "'");
  }
  return columns[*i];
}

void VertexTable::add_column(std::string name, Type type, std::vector<double> values)
{
  if (!columns.empty() && values.size() != rows()) {
    throw ShapeError("PLY column '" + name + "' length differs from existing columns");
  }
  properties.push_back({std::move(name), type});
  columns.push_back(std::move(values));
}

VertexTable read(std::istream & in)
{
  const Header h = parse_header(in);
  VertexTable table;
  bool found_vertex = false;

  for (const auto & e : h.elements) {
    const bool is_vertex = e.name == "vertex";
    if (is_vertex) {
      if (found_vertex) {
        throw ParseError("duplicate vertex element");
      }
      found_vertex = true;
      for (const auto & p : e.props) {
        if (p.is_list) {
          throw ParseError("list properties on vertex are not supported");
        }
        table.properties.push_back({p.name, p.type});
        table.columns.emplace_back();
        table.columns.back().reserve(e.count);
      }
    }

    for (std::size_t row = 0; row < e.count; ++row) {
      for (std::size_t pi = 0; pi < e.props.size(); ++pi) {
        const auto & p = e.props[pi];
        if (h.format == Format::ascii) {
          if (p.is_list) {
            const auto n = static_cast<long long>(read_ascii_value(in));
            for (long long k = 0; k < n; ++k) {
              read_ascii_value(in);
            }
          } else {
            const double v = read_ascii_value(in);
            if (is_vertex) {
              table.columns[pi].push_back(v);
            }
          }
        } else {
          std::array<char, 8> buf{};
          if (p.is_list) {
            read_exact(in, buf.data(), info(p.count_type).size);
            const auto n = static_cast<long long>(decode(p.count_type, buf.data()));
            if (n < 0) {
              throw ParseError("negative list length");
            }
            for (long long k = 0; k < n; ++k) {
              read_exact(in, buf.data(), info(p.type).size);
            }
          } else {
            read_exact(in, buf.data(), info(p.type).size);
            if (is_vertex) {
              table.columns[pi].push_back(decode(p.type, buf.data()));
            }
          }
        }
      }
    }
  }
  if (!found_vertex) {
    throw ParseError("PLY file has no vertex element");
  }
  return table;
}

VertexTable read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  return read(in);
}

void write(std::ostream & out, const VertexTable & table, Format format)
{
  const std::size_t n = table.rows();
  for (const auto & c : table.columns) {
    if (c.size() != n) {
      throw ShapeError("PLY columns have unequal lengths");
    }
  }
  out << "ply\n";
  out << "format " << (format == Format::ascii ? "ascii" : "binary_little_endian") << " 1.0\n";
  out << "element vertex " << n << "\n";
  for (const auto & p : table.properties) {
    out << "property " << info(p.type).names[0] << " " << p.name << "\n";
  }
  out << "end_header\n";

  if (format == Format::ascii) {
    std::ostringstream row;
    row.precision(9);
    for (std::size_t r = 0; r < n; ++r) {
      row.str({});
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) {
          row << ' ';
        }
        const double v = table.columns[c][r];
        if (is_integral(table.properties[c].type)) {
          row << static_cast<long long>(v);
        } else if (table.properties[c].type == Type::float32) {
          row << static_cast<float>(v);
        } else {
          row.precision(17);
          row << v;
          row.precision(9);
        }
      }
      out << row.str() << '\n';
    }
  } else {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        encode(out, table.properties[c].type, table.columns[c][r]);
      }
    }
  }
  if (!out) {
    throw InputError("failed writing PLY stream");
  }
}

void write_file(const std::filesystem::path & path, const VertexTable & table, Format format)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot open " + path.string() + " for writing");
  }
  write(out, table, format);
}

VertexTable points_table(std::span<const Point3> points)
{
  std::vector<double> xs, ys, zs;
  xs.reserve(points.size());
  ys.reserve(points.size());
  zs.reserve(points.size());
  for (const auto & p : points) {
    xs.push_back(p.x());
    ys.push_back(p.y());
    zs.push_back(p.z());
  }
  VertexTable t;
  t.add_column("x", Type::float32, std::move(xs));
  t.add_column("y", Type::float32, std::move(ys));
  t.add_column("z", Type::float32, std::move(zs));
  return t;
}

std::vector<Point3> points_from_table(const VertexTable & table)
{
  const auto & xs = table.column("x");
  const auto & ys = table.column("y");
  const auto & zs = table.column("z");
  std::vector<Point3> pts;
  pts.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    pts.emplace_back(xs[i], ys[i], zs[i]);
  }
  require_finite(pts);
  return pts;
}

void write_point_cloud(const std::filesystem::path & path, const PointCloud & cloud, Format format)
{
  write_file(path, points_table(cloud.points()), format);
}

PointCloud read_point_cloud(const std::filesystem::path & path, Frame frame)
{
  return PointCloud(points_from_table(read_file(path)), frame);
}

}  // namespace trailnav::ply
