// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "posesym/defaults.hpp"
#include "posesym/error.hpp"

namespace posesym::io {

namespace {

std::vector<double> numbers(const json& j, std::size_t expected, const char* what) {
  if (!j.is_array() || j.size() != expected) {
    throw DataError(std::string(what) + " must be an array of " + std::to_string(expected) +
                    " numbers");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : j) {
    if (!v.is_number()) throw DataError(std::string(what) + " contains a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

Eigen::Matrix3d matrix_from(const std::vector<double>& v, std::size_t offset = 0) {
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = v[offset + 3 * r + c];
  return m;
}

json matrix_to_json(const Eigen::Matrix3d& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  return a;
}

json vector_to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Pose checked_pose(const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
  Pose p{r, t};
  if (!is_valid_pose(p, 1e-6)) throw DataError("pose rotation is not a proper rotation");
  p.rotation = project_to_rotation(r);
  return p;
}

}  // namespace

Pose pose_from_json(const json& j) {
  if (j.is_array()) {
    const auto v = numbers(j, 12, "pose");
    return checked_pose(matrix_from(v), {v[9], v[10], v[11]});
  }
  if (j.is_object() && j.contains("R") && j.contains("t")) {
    const auto r = numbers(j.at("R"), 9, "R");
    const auto t = numbers(j.at("t"), 3, "t");
    return checked_pose(matrix_from(r), {t[0], t[1], t[2]});
  }
  throw DataError("pose must be a 12-number array or an object with \"R\" and \"t\"");
}

json pose_to_json(const Pose& p) {
  return json{{"R", matrix_to_json(p.rotation)}, {"t", vector_to_json(p.translation)}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Pose read_pose_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pose file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw DataError(path.string() + ": empty pose file");
  try {
    if (text[first] == '[' || text[first] == '{') return pose_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> v;
    std::string tok;
    bool numeric = true;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) continue;  // header
    if (v.size() != 12) throw DataError(path.string() + ": CSV pose row needs 12 numbers");
    return checked_pose(matrix_from(v), {v[9], v[10], v[11]});
  }
  throw DataError(path.string() + ": no pose row found");
}

std::string pose_csv_row(const Pose& p) {
  std::ostringstream os;
  os.precision(17);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) os << p.rotation(r, c) << ',';
  os << p.translation.x() << ',' << p.translation.y() << ',' << p.translation.z();
  return os.str();
}

Pose to_centered_frame(const Pose& p, const ObjectModel& object, PoseFrame frame) {
  if (frame == PoseFrame::centered) return p;
  return {p.rotation, p.rotation * object.origin_offset() + p.translation};
}

ScoredPose scored_pose_from_json(const json& j, std::size_t line_no) {
  ScoredPose sp;
  sp.pose = pose_from_json(j);
  if (j.is_object()) {
    if (j.contains("score")) {
      if (!j.at("score").is_number()) throw DataError("score must be a number");
      sp.score = j.at("score").get<double>();
    }
    if (j.contains("id")) {
      const auto& id = j.at("id");
      sp.id = id.is_string() ? id.get<std::string>() : id.dump();
    }
  }
  if (!std::isfinite(sp.score)) throw DataError("score must be finite");
  if (sp.id.empty()) sp.id = std::to_string(line_no);
  return sp;
}

json scored_pose_to_json(const ScoredPose& p) {
  json j = pose_to_json(p.pose);
  j["score"] = p.score;
  j["id"] = p.id;
  return j;
}

std::vector<ScoredPose> read_scored_poses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<ScoredPose> out;
  std::string line;
  std::size_t line_no = 0, record = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(scored_pose_from_json(json::parse(line), record++));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_scored_poses(const std::filesystem::path& path, const std::vector<ScoredPose>& poses) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& p : poses) out << scored_pose_to_json(p).dump() << '\n';
}

json camera_to_json(const CameraModel& cam) {
  return json{{"K", matrix_to_json(cam.intrinsics)},
              {"R", matrix_to_json(cam.extrinsics.rotation)},
              {"t", vector_to_json(cam.extrinsics.translation)}};
}

CameraModel camera_from_json(const json& j) {
  CameraModel cam;
  cam.intrinsics = matrix_from(numbers(j.at("K"), 9, "K"));
  if (j.contains("R")) {
    const auto r = numbers(j.at("R"), 9, "R");
    const auto t = numbers(j.at("t"), 3, "t");
    cam.extrinsics = checked_pose(matrix_from(r), {t[0], t[1], t[2]});
  }
  cam.validate();
  return cam;
}

SceneFile read_scene(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  try {
    SceneFile s;
    if (j.contains("camera") && !j.at("camera").is_null()) s.camera = camera_from_json(j.at("camera"));
    if (j.contains("bin") && !j.at("bin").is_null()) {
      const auto lo = numbers(j.at("bin").at("min"), 3, "bin.min");
      const auto hi = numbers(j.at("bin").at("max"), 3, "bin.max");
      s.bin = Box{{lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}};
    }
    if (j.contains("image_size")) {
      s.image_size = {j.at("image_size").at(0).get<int>(), j.at("image_size").at(1).get<int>()};
    }
    for (const auto& inst : j.at("instances")) {
      GroundTruthInstance g;
      g.pose = pose_from_json(inst);
      g.occlusion_rate = inst.value("occlusion_rate", 0.0);
      if (!(g.occlusion_rate >= 0.0 && g.occlusion_rate <= 1.0)) {
        throw DataError("occlusion_rate outside [0, 1]");
      }
      s.instances.push_back(g);
      json extra = inst;
      for (const char* k : {"R", "t", "occlusion_rate"}) extra.erase(k);
      s.instance_extras.push_back(std::move(extra));
    }
    s.depth_image = j.value("depth_image", std::string());
    s.instance_image = j.value("instance_image", std::string());
    s.depth_scale = j.value("depth_scale", 1e-4);
    for (const auto& [k, v] : j.items()) {
      static const char* known[] = {"format_version", "camera", "bin", "image_size",
                                    "instances", "depth_image", "instance_image",
                                    "depth_scale"};
      if (std::find(std::begin(known), std::end(known), k) == std::end(known)) s.extra[k] = v;
    }
    return s;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_scene(const std::filesystem::path& path, const SceneFile& s) {
  json j = s.extra.is_object() ? s.extra : json::object();
  j["format_version"] = kFormatVersion;
  j["camera"] = s.camera ? camera_to_json(*s.camera) : json(nullptr);
  if (s.bin) {
    j["bin"] = json{{"min", vector_to_json(s.bin->min)}, {"max", vector_to_json(s.bin->max)}};
  }
  j["image_size"] = json::array({s.image_size.width, s.image_size.height});
  j["instances"] = json::array();
  for (std::size_t i = 0; i < s.instances.size(); ++i) {
    json inst = i < s.instance_extras.size() && s.instance_extras[i].is_object()
                    ? s.instance_extras[i]
                    : json::object();
    const json pose = pose_to_json(s.instances[i].pose);
    inst["R"] = pose["R"];
    inst["t"] = pose["t"];
    inst["occlusion_rate"] = s.instances[i].occlusion_rate;
    j["instances"].push_back(std::move(inst));
  }
  if (!s.depth_image.empty()) j["depth_image"] = s.depth_image;
  if (!s.instance_image.empty()) j["instance_image"] = s.instance_image;
  j["depth_scale"] = s.depth_scale;
  write_json_file(path, j);
}

void write_pgm16(const std::filesystem::path& path, int width, int height,
                 const std::vector<std::uint16_t>& pixels) {
  if (pixels.size() != std::size_t(width) * height) throw UsageError("PGM size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P5\n" << width << ' ' << height << "\n65535\n";
  for (std::uint16_t v : pixels) {
    const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xFF)};
    out.write(bytes, 2);
  }
}

std::vector<std::uint16_t> read_pgm16(const std::filesystem::path& path, int& width,
                                      int& height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string magic;
  int maxval = 0;
  in >> magic >> width >> height >> maxval;
  if (magic != "P5" || maxval != 65535 || width <= 0 || height <= 0) {
    throw DataError(path.string() + ": not a 16-bit binary PGM");
  }
  in.get();
  std::vector<std::uint16_t> px(std::size_t(width) * height);
  for (auto& v : px) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    if (!in) throw DataError(path.string() + ": truncated PGM data");
    v = static_cast<std::uint16_t>((b[0] << 8) | b[1]);
  }
  return px;
}

void write_depth_images(const DepthImage& img, double depth_scale,
                        const std::filesystem::path& depth_path,
                        const std::filesystem::path& id_path) {
  std::vector<std::uint16_t> depth(img.depth.size()), ids(img.depth.size());
  for (std::size_t i = 0; i < img.depth.size(); ++i) {
    if (img.instance_id[i] == kNoInstance) continue;
    depth[i] = static_cast<std::uint16_t>(
        std::clamp(std::llround(img.depth[i] / depth_scale), 1ll, 65535ll));
    ids[i] = static_cast<std::uint16_t>(std::min(img.instance_id[i] + 1, 65535));
  }
  write_pgm16(depth_path, img.width, img.height, depth);
  write_pgm16(id_path, img.width, img.height, ids);
}

CorrespondenceFile read_correspondences(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  try {
    CorrespondenceFile f;
    for (const auto& c : j.at("cameras")) f.cameras.push_back(camera_from_json(c));
    std::size_t k = 0;
    for (const auto& inst : j.at("instances")) {
      AnnotationInstance a;
      a.id = inst.contains("id") ? (inst.at("id").is_string() ? inst.at("id").get<std::string>()
                                                              : inst.at("id").dump())
                                 : std::to_string(k);
      a.correspondences.views.assign(f.cameras.size(), {});
      for (const auto& view : inst.at("views")) {
        const auto cam = view.at("camera").get<std::size_t>();
        if (cam >= f.cameras.size()) throw DataError("view refers to unknown camera");
        for (const auto& pt : view.at("points")) {
          const auto x = numbers(pt.at("X"), 3, "X");
          const auto p = numbers(pt.at("p"), 2, "p");
          a.correspondences.views[cam].push_back({{x[0], x[1], x[2]}, {p[0], p[1]}});
        }
      }
      if (inst.contains("init") && !inst.at("init").is_null()) a.init = pose_from_json(inst.at("init"));
      f.instances.push_back(std::move(a));
      ++k;
    }
    return f;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_correspondences(const std::filesystem::path& path, const CorrespondenceFile& f) {
  json j;
  j["format_version"] = kFormatVersion;
  j["cameras"] = json::array();
  for (const auto& c : f.cameras) j["cameras"].push_back(camera_to_json(c));
  j["instances"] = json::array();
  for (const auto& inst : f.instances) {
    json ji{{"id", inst.id}, {"views", json::array()}};
    for (std::size_t cam = 0; cam < inst.correspondences.views.size(); ++cam) {
      json pts = json::array();
      for (const auto& c : inst.correspondences.views[cam]) {
        pts.push_back({{"X", vector_to_json(c.object_point)},
                       {"p", json::array({c.pixel.x(), c.pixel.y()})}});
      }
      if (!pts.empty()) ji["views"].push_back({{"camera", cam}, {"points", pts}});
    }
    if (inst.init) ji["init"] = pose_to_json(*inst.init);
    j["instances"].push_back(std::move(ji));
  }
  write_json_file(path, j);
}

}  // namespace posesym::io
