// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/mesh.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "posesym/error.hpp"

namespace posesym {

namespace {

struct TriangleRef {
  const Eigen::Vector3d& a;
  const Eigen::Vector3d& b;
  const Eigen::Vector3d& c;
  double area() const { return 0.5 * (b - a).cross(c - a).norm(); }
};

TriangleRef triangle(const TriangleMesh& mesh, const std::array<int, 3>& t) {
  return {mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]};
}

}  // namespace

void check_mesh(const TriangleMesh& mesh) {
  const auto n = static_cast<long>(mesh.vertices.size());
  if (mesh.triangles.empty()) throw DataError("mesh has no triangles");
  for (const auto& t : mesh.triangles) {
    for (int i : t) {
      if (i < 0 || i >= n) {
        throw DataError("triangle index " + std::to_string(i) + " out of range");
      }
    }
  }
  for (const auto& v : mesh.vertices) {
    if (!v.allFinite()) throw DataError("mesh has non-finite vertex coordinates");
  }
  if (!(surface_area(mesh) > 0.0)) throw DataError("degenerate surface: zero area");
}

double surface_area(const TriangleMesh& mesh) {
  double s = 0.0;
  for (const auto& t : mesh.triangles) s += triangle(mesh, t).area();
  return s;
}

Eigen::Vector3d surface_centroid(const TriangleMesh& mesh) {
  check_mesh(mesh);
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  double area = 0.0;
  for (const auto& t : mesh.triangles) {
    const auto tri = triangle(mesh, t);
    const double a = tri.area();
    acc += a * (tri.a + tri.b + tri.c) / 3.0;
    area += a;
  }
  return acc / area;
}

Eigen::Matrix3d surface_second_moment(const TriangleMesh& mesh) {
  check_mesh(mesh);
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  double area = 0.0;
  for (const auto& t : mesh.triangles) {
    const auto tri = triangle(mesh, t);
    const double a = tri.area();
    const Eigen::Vector3d s = tri.a + tri.b + tri.c;
    acc += (a / 12.0) * (tri.a * tri.a.transpose() + tri.b * tri.b.transpose() +
                         tri.c * tri.c.transpose() + s * s.transpose());
    area += a;
  }
  return acc / area;
}

Eigen::Matrix3d psd_sqrt(const Eigen::Matrix3d& m) {
  const Eigen::Matrix3d sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const double trace = sym.trace();
  Eigen::Vector3d values = eig.eigenvalues();
  for (int i = 0; i < 3; ++i) {
    if (values[i] < 0.0) {
      if (values[i] < -1e-12 * std::abs(trace)) {
        throw NumericalError("matrix is not positive semidefinite");
      }
      values[i] = 0.0;
    }
  }
  const Eigen::Matrix3d& vecs = eig.eigenvectors();
  Eigen::Matrix3d out = vecs * values.cwiseSqrt().asDiagonal() * vecs.transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::Matrix3d compute_lambda(const TriangleMesh& mesh) {
  return psd_sqrt(surface_second_moment(mesh));
}

Eigen::Matrix3d discrete_lambda(std::span<const Eigen::Vector3d> samples) {
  if (samples.empty()) throw DataError("empty sample set");
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  for (const auto& x : samples) acc += x * x.transpose();
  return psd_sqrt(acc / static_cast<double>(samples.size()));
}

double diameter_about(const TriangleMesh& mesh, const Eigen::Vector3d& center) {
  double r = 0.0;
  for (const auto& v : mesh.vertices) r = std::max(r, (v - center).norm());
  return 2.0 * r;
}

TriangleMesh transformed(const TriangleMesh& mesh, const Eigen::Matrix3d& rotation,
                         const Eigen::Vector3d& translation) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = rotation * v + translation;
  return out;
}

// ---------------------------------------------------------------------------
// File formats

namespace {

enum class PlyFormat { ascii, binary_le, binary_be };

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

std::size_t ply_type_size(const std::string& t) {
  static const std::map<std::string, std::size_t> sizes = {
      {"char", 1},   {"uchar", 1},  {"int8", 1},    {"uint8", 1},
      {"short", 2},  {"ushort", 2}, {"int16", 2},   {"uint16", 2},
      {"int", 4},    {"uint", 4},   {"int32", 4},   {"uint32", 4},
      {"float", 4},  {"float32", 4}, {"double", 8}, {"float64", 8}};
  auto it = sizes.find(t);
  if (it == sizes.end()) throw DataError("unsupported PLY type '" + t + "'");
  return it->second;
}

template <typename T>
T read_raw(std::istream& in, bool swap) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw DataError("unexpected end of binary PLY data");
  if (swap) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

double read_binary_scalar(std::istream& in, const std::string& t, bool swap) {
  if (t == "char" || t == "int8") return read_raw<std::int8_t>(in, swap);
  if (t == "uchar" || t == "uint8") return read_raw<std::uint8_t>(in, swap);
  if (t == "short" || t == "int16") return read_raw<std::int16_t>(in, swap);
  if (t == "ushort" || t == "uint16") return read_raw<std::uint16_t>(in, swap);
  if (t == "int" || t == "int32") return read_raw<std::int32_t>(in, swap);
  if (t == "uint" || t == "uint32") return read_raw<std::uint32_t>(in, swap);
  if (t == "float" || t == "float32") return read_raw<float>(in, swap);
  if (t == "double" || t == "float64") return read_raw<double>(in, swap);
  throw DataError("unsupported PLY type '" + t + "'");
}

class PlyReader {
 public:
  PlyReader(std::istream& in, PlyFormat format) : in_(in), format_(format) {
    const bool host_little = std::endian::native == std::endian::little;
    swap_ = (format == PlyFormat::binary_le) != host_little;
  }

  double scalar(const std::string& type) {
    if (format_ == PlyFormat::ascii) {
      double v;
      if (!(line_ >> v)) throw DataError("malformed ascii PLY value");
      return v;
    }
    (void)ply_type_size(type);
    return read_binary_scalar(in_, type, swap_);
  }

  void begin_record() {
    if (format_ != PlyFormat::ascii) return;
    std::string l;
    do {
      if (!std::getline(in_, l)) throw DataError("unexpected end of ascii PLY data");
    } while (l.find_first_not_of(" \t\r") == std::string::npos);
    line_.clear();
    line_.str(l);
  }

 private:
  std::istream& in_;
  PlyFormat format_;
  bool swap_ = false;
  std::istringstream line_;
};

TriangleMesh load_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open mesh file " + path.string());

  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw DataError(path.string() + ": not a PLY file");

  PlyFormat format = PlyFormat::ascii;
  std::vector<PlyElement> elements;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "format") {
      std::string f;
      ls >> f;
      if (f == "ascii") format = PlyFormat::ascii;
      else if (f == "binary_little_endian") format = PlyFormat::binary_le;
      else if (f == "binary_big_endian") format = PlyFormat::binary_be;
      else throw DataError("unknown PLY format '" + f + "'");
    } else if (key == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      if (!ls) throw DataError("malformed PLY element line");
      elements.push_back(std::move(e));
    } else if (key == "property") {
      if (elements.empty()) throw DataError("PLY property before element");
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        p.is_list = true;
        ls >> p.count_type >> p.type >> p.name;
      } else {
        p.type = t;
        ls >> p.name;
      }
      if (!ls) throw DataError("malformed PLY property line");
      elements.back().properties.push_back(std::move(p));
    } else if (key == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw DataError(path.string() + ": missing end_header");

  TriangleMesh mesh;
  PlyReader reader(in, format);
  for (const auto& e : elements) {
    if (e.name == "vertex") {
      int ix = -1, iy = -1, iz = -1;
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        const auto& n = e.properties[k].name;
        if (n == "x") ix = static_cast<int>(k);
        if (n == "y") iy = static_cast<int>(k);
        if (n == "z") iz = static_cast<int>(k);
      }
      if (ix < 0 || iy < 0 || iz < 0) throw DataError("PLY vertex lacks x/y/z");
      mesh.vertices.reserve(e.count);
      for (std::size_t i = 0; i < e.count; ++i) {
        reader.begin_record();
        Eigen::Vector3d v = Eigen::Vector3d::Zero();
        for (std::size_t k = 0; k < e.properties.size(); ++k) {
          const auto& p = e.properties[k];
          if (p.is_list) {
            const auto n = static_cast<std::size_t>(reader.scalar(p.count_type));
            for (std::size_t j = 0; j < n; ++j) reader.scalar(p.type);
            continue;
          }
          const double value = reader.scalar(p.type);
          if (static_cast<int>(k) == ix) v.x() = value;
          if (static_cast<int>(k) == iy) v.y() = value;
          if (static_cast<int>(k) == iz) v.z() = value;
        }
        mesh.vertices.push_back(v);
      }
    } else if (e.name == "face") {
      mesh.triangles.reserve(e.count);
      for (std::size_t i = 0; i < e.count; ++i) {
        reader.begin_record();
        bool have_indices = false;
        for (const auto& p : e.properties) {
          if (!p.is_list) {
            reader.scalar(p.type);
            continue;
          }
          const auto n = static_cast<std::size_t>(reader.scalar(p.count_type));
          std::vector<int> idx(n);
          for (auto& x : idx) x = static_cast<int>(reader.scalar(p.type));
          if (p.name != "vertex_indices" && p.name != "vertex_index") continue;
          if (n != 3) {
            throw DataError("PLY face " + std::to_string(i) + " has " +
                            std::to_string(n) + " vertices; only triangles are accepted");
          }
          mesh.triangles.push_back({idx[0], idx[1], idx[2]});
          have_indices = true;
        }
        if (!have_indices) throw DataError("PLY face lacks vertex_indices");
      }
    } else {
      for (std::size_t i = 0; i < e.count; ++i) {
        reader.begin_record();
        for (const auto& p : e.properties) {
          if (p.is_list) {
            const auto n = static_cast<std::size_t>(reader.scalar(p.count_type));
            for (std::size_t j = 0; j < n; ++j) reader.scalar(p.type);
          } else {
            reader.scalar(p.type);
          }
        }
      }
    }
  }
  check_mesh(mesh);
  return mesh;
}

int parse_obj_index(const std::string& token, std::size_t vertex_count) {
  const std::string head = token.substr(0, token.find('/'));
  std::size_t used = 0;
  int i = 0;
  try {
    i = std::stoi(head, &used);
  } catch (const std::exception&) {
    throw DataError("malformed OBJ face index '" + token + "'");
  }
  if (used != head.size() || i == 0) throw DataError("malformed OBJ face index '" + token + "'");
  return i > 0 ? i - 1 : static_cast<int>(vertex_count) + i;
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open mesh file " + path.string());
  TriangleMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    if (key == "v") {
      Eigen::Vector3d v;
      if (!(ls >> v.x() >> v.y() >> v.z())) {
        throw DataError("malformed OBJ vertex at line " + std::to_string(line_no));
      }
      mesh.vertices.push_back(v);
    } else if (key == "f") {
      std::vector<std::string> tokens;
      for (std::string t; ls >> t;) tokens.push_back(t);
      if (tokens.size() != 3) {
        throw DataError("OBJ face at line " + std::to_string(line_no) + " has " +
                        std::to_string(tokens.size()) +
                        " vertices; only triangles are accepted");
      }
      mesh.triangles.push_back({parse_obj_index(tokens[0], mesh.vertices.size()),
                                parse_obj_index(tokens[1], mesh.vertices.size()),
                                parse_obj_index(tokens[2], mesh.vertices.size())});
    }
  }
  check_mesh(mesh);
  return mesh;
}

}  // namespace

TriangleMesh load_mesh(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".ply") return load_ply(path);
  if (ext == ".obj") return load_obj(path);
  throw DataError("unsupported mesh format '" + ext + "' (expected .ply or .obj)");
}

void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "ply\nformat ascii 1.0\n"
      << "element vertex " << mesh.vertices.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.triangles.size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  out.precision(17);
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

// ---------------------------------------------------------------------------
// Primitives

TriangleMesh make_box(double hx, double hy, double hz) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? hx : -hx, (i & 2) ? hy : -hy, (i & 4) ? hz : -hz);
  }
  // Outward-facing quads split into two triangles each.
  const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    m.triangles.push_back({q[0], q[1], q[2]});
    m.triangles.push_back({q[0], q[2], q[3]});
  }
  return m;
}

TriangleMesh make_icosphere(double radius, int levels) {
  const double phi = std::numbers::phi;
  TriangleMesh m;
  m.vertices = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& v : m.vertices) v.normalize();
  for (int level = 0; level < levels; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      const int id = static_cast<int>(m.vertices.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(m.triangles.size() * 4);
    for (const auto& t : m.triangles) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  for (auto& v : m.vertices) v *= radius;
  return m;
}

TriangleMesh make_revolution(std::span<const Eigen::Vector2d> profile, int segments) {
  if (profile.size() < 2 || segments < 3) throw DataError("invalid revolution profile");
  TriangleMesh m;
  const int rings = static_cast<int>(profile.size());
  for (const auto& p : profile) {
    for (int s = 0; s < segments; ++s) {
      const double a = 2.0 * std::numbers::pi * s / segments;
      m.vertices.emplace_back(p.x() * std::cos(a), p.x() * std::sin(a), p.y());
    }
  }
  auto at = [&](int ring, int s) { return ring * segments + (s % segments); };
  for (int r = 0; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      m.triangles.push_back({at(r, s), at(r, s + 1), at(r + 1, s + 1)});
      m.triangles.push_back({at(r, s), at(r + 1, s + 1), at(r + 1, s)});
    }
  }
  auto cap = [&](int ring, bool flip) {
    if (profile[ring].x() == 0.0) return;
    m.vertices.emplace_back(0.0, 0.0, profile[ring].y());
    const int c = static_cast<int>(m.vertices.size()) - 1;
    for (int s = 0; s < segments; ++s) {
      if (flip) m.triangles.push_back({c, at(ring, s + 1), at(ring, s)});
      else m.triangles.push_back({c, at(ring, s), at(ring, s + 1)});
    }
  };
  cap(0, true);
  cap(rings - 1, false);
  return m;
}

TriangleMesh make_cylinder(double radius, double height, int segments) {
  const Eigen::Vector2d profile[] = {{radius, -0.5 * height}, {radius, 0.5 * height}};
  return make_revolution(profile, segments);
}

}  // namespace posesym
