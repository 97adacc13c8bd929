#include <cmath>
#include <string>

#include <json.hpp>

#include "egoview/io.hpp"

namespace egoview::io {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin, e.byte > 0 ? e.byte - 1 : 0, e.what());
  }
}

json load_json(const fs::path& path) { return parse_json(read_file(path), path.string()); }

void save_json(const fs::path& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

const json& field(const json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) throw ValidationError(name, "missing");
  return doc.at(name);
}

double number(const json& doc, const char* name) {
  const json& value = field(doc, name);
  if (!value.is_number()) throw ValidationError(name, "expected a number");
  return value.get<double>();
}

int integer(const json& doc, const char* name) {
  const json& value = field(doc, name);
  if (!value.is_number_integer()) throw ValidationError(name, "expected an integer");
  return value.get<int>();
}

std::vector<double> numbers(const json& doc, const char* name, std::size_t expected) {
  const json& value = field(doc, name);
  if (!value.is_array() || value.size() != expected) {
    throw ValidationError(name, "expected an array of " + std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  for (const auto& v : value) {
    if (!v.is_number()) throw ValidationError(name, "expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

template <typename T>
void optional_number(const json& doc, const char* name, T& target) {
  if (!doc.contains(name)) return;
  const json& value = doc.at(name);
  if constexpr (std::is_integral_v<T>) {
    if (!value.is_number_integer()) throw ValidationError(name, "expected an integer");
  } else {
    if (!value.is_number()) throw ValidationError(name, "expected a number");
  }
  target = value.get<T>();
}

void optional_vector(const json& doc, const char* name, Eigen::Vector3d& target) {
  if (!doc.contains(name)) return;
  const auto v = numbers(doc, name, 3);
  target = {v[0], v[1], v[2]};
}

json to_json(const SimilarityTransform& transform) {
  json rotation = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rotation.push_back(transform.rotation(r, c));
  return json{{"scale", transform.scale},
              {"rotation", rotation},
              {"translation",
               {transform.translation.x(), transform.translation.y(), transform.translation.z()}}};
}

}  // namespace

void save_intrinsics(const fs::path& path, const CameraIntrinsics& k) {
  k.validate();
  save_json(path, json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
                       {"width", k.width}, {"height", k.height}});
}

CameraIntrinsics load_intrinsics(const fs::path& path) {
  const json doc = load_json(path);
  CameraIntrinsics k{number(doc, "fx"), number(doc, "fy"), number(doc, "cx"),
                     number(doc, "cy"), integer(doc, "width"), integer(doc, "height")};
  k.validate();
  return k;
}

std::string serialize_transform(const SimilarityTransform& transform) {
  return to_json(transform).dump(2) + "\n";
}

SimilarityTransform parse_transform(const std::string& text, const std::string& origin) {
  const json doc = parse_json(text, origin);
  SimilarityTransform transform;
  transform.scale = number(doc, "scale");
  const auto r = numbers(doc, "rotation", 9);
  for (int i = 0; i < 9; ++i) transform.rotation(i / 3, i % 3) = r[static_cast<std::size_t>(i)];
  const auto t = numbers(doc, "translation", 3);
  transform.translation = {t[0], t[1], t[2]};
  transform.validate();
  return transform;
}

void save_transform(const fs::path& path, const SimilarityTransform& transform) {
  write_file(path, serialize_transform(transform));
}

SimilarityTransform load_transform(const fs::path& path) {
  return parse_transform(read_file(path), path.string());
}

void save_pose(const fs::path& path, const HandPose& pose) {
  pose.validate();
  json keypoints = json::array();
  for (int i = 0; i < pose.size(); ++i) {
    keypoints.push_back({pose.keypoints(i, 0), pose.keypoints(i, 1), pose.keypoints(i, 2)});
  }
  save_json(path, json{{"layout", std::string(to_string(pose.layout))},
                       {"units", "meters"},
                       {"keypoints", keypoints}});
}

HandPose load_pose(const fs::path& path) {
  const json doc = load_json(path);
  const json& layout = field(doc, "layout");
  if (!layout.is_string()) throw ValidationError("layout", "expected a string");
  const json& units = field(doc, "units");
  if (!units.is_string() || units.get<std::string>() != "meters") {
    throw ValidationError("units", "must be \"meters\"");
  }
  const json& points = field(doc, "keypoints");
  if (!points.is_array()) throw ValidationError("keypoints", "expected an array");
  HandPose pose;
  pose.layout = hand_layout_from_string(layout.get<std::string>());
  pose.keypoints.resize(static_cast<Eigen::Index>(points.size()), 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const json& p = points[i];
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
        !p[2].is_number()) {
      throw ValidationError("keypoints", "entry " + std::to_string(i) + " is not a 3-vector");
    }
    for (int c = 0; c < 3; ++c) {
      pose.keypoints(static_cast<Eigen::Index>(i), c) = p[static_cast<std::size_t>(c)].get<double>();
    }
  }
  pose.validate();
  return pose;
}

SceneConfig load_scene_config(const fs::path& path) {
  const json doc = load_json(path);
  if (!doc.is_object()) throw ValidationError("scene", "expected an object");
  SceneConfig config;
  optional_number(doc, "width", config.width);
  optional_number(doc, "height", config.height);
  optional_number(doc, "exo_focal", config.exo_focal);
  optional_number(doc, "ego_focal", config.ego_focal);
  optional_number(doc, "surfel_spacing", config.surfel_spacing);
  optional_number(doc, "table_half_width", config.table_half_width);
  optional_number(doc, "table_near", config.table_near);
  optional_number(doc, "wall_y", config.wall_y);
  optional_number(doc, "wall_height", config.wall_height);
  optional_number(doc, "joint_radius", config.joint_radius);
  optional_number(doc, "camera_jitter", config.camera_jitter);
  optional_number(doc, "texture_amplitude", config.texture_amplitude);
  optional_number(doc, "texture_min_wavelength", config.texture_min_wavelength);
  optional_vector(doc, "ego_eye", config.ego_eye);
  optional_vector(doc, "exo_eye", config.exo_eye);
  optional_vector(doc, "look_at", config.look_at);
  config.validate();
  return config;
}

PoseMapStyle load_pose_map_style(const fs::path& path) {
  const json doc = load_json(path);
  if (!doc.is_object()) throw ValidationError("style", "expected an object");
  PoseMapStyle style;
  optional_number(doc, "keypoint_radius", style.keypoint_radius);
  optional_number(doc, "bone_thickness", style.bone_thickness);
  if (doc.contains("color_scheme")) {
    if (!doc.at("color_scheme").is_string()) throw ValidationError("color_scheme", "expected a string");
    style.color_scheme = pose_color_scheme_from_string(doc.at("color_scheme").get<std::string>());
  }
  optional_vector(doc, "background", style.background);
  style.validate();
  return style;
}

}  // namespace egoview::io
