#include <json.hpp>

#include "egoview/io.hpp"

namespace egoview::io {

using nlohmann::json;

namespace {

fs::path resolve(const fs::path& directory, const json& entry, std::size_t index,
                 const char* name) {
  const std::string label = "entries[" + std::to_string(index) + "]." + name;
  if (!entry.contains(name) || !entry.at(name).is_string()) {
    throw ValidationError(label, "missing path");
  }
  fs::path path = entry.at(name).get<std::string>();
  if (path.is_relative()) path = directory / path;
  if (!fs::exists(path)) throw ValidationError(label, "file not found: " + path.string());
  return path;
}

std::optional<fs::path> resolve_optional(const fs::path& directory, const json& entry,
                                         std::size_t index, const char* name) {
  if (!entry.contains(name) || entry.at(name).is_null()) return std::nullopt;
  return resolve(directory, entry, index, name);
}

std::string relative_to(const fs::path& path, const fs::path& directory) {
  const fs::path rel = path.lexically_relative(directory);
  return (rel.empty() ? path : rel).generic_string();
}

}  // namespace

Manifest load_manifest(const fs::path& path) {
  json doc;
  const std::string text = read_file(path);
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), e.byte > 0 ? e.byte - 1 : 0, e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc.at("entries").is_array()) {
    throw ValidationError("entries", "manifest needs an 'entries' array");
  }

  Manifest manifest;
  manifest.directory = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const json& entries = doc.at("entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const json& e = entries[i];
    if (!e.is_object()) throw ValidationError("entries[" + std::to_string(i) + "]", "expected an object");
    ManifestEntry entry;
    entry.name = e.contains("name") && e.at("name").is_string() ? e.at("name").get<std::string>()
                                                                : "entry" + std::to_string(i);
    entry.exo_image_path = resolve(manifest.directory, e, i, "exo_image_path");
    entry.exo_depth_path = resolve(manifest.directory, e, i, "exo_depth_path");
    entry.exo_pose_path = resolve(manifest.directory, e, i, "exo_pose_path");
    entry.ego_pose_path = resolve(manifest.directory, e, i, "ego_pose_path");
    entry.ego_intrinsics_path = resolve(manifest.directory, e, i, "ego_intrinsics_path");
    entry.exo_intrinsics_path = resolve(manifest.directory, e, i, "exo_intrinsics_path");
    entry.hand_depth_path = resolve_optional(manifest.directory, e, i, "hand_depth_path");
    entry.ego_gt_image_path = resolve_optional(manifest.directory, e, i, "ego_gt_image_path");
    entry.ego_gt_depth_path = resolve_optional(manifest.directory, e, i, "ego_gt_depth_path");
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void save_manifest(const fs::path& path, const Manifest& manifest) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    json doc{{"name", e.name},
             {"exo_image_path", relative_to(e.exo_image_path, dir)},
             {"exo_depth_path", relative_to(e.exo_depth_path, dir)},
             {"exo_pose_path", relative_to(e.exo_pose_path, dir)},
             {"ego_pose_path", relative_to(e.ego_pose_path, dir)},
             {"ego_intrinsics_path", relative_to(e.ego_intrinsics_path, dir)},
             {"exo_intrinsics_path", relative_to(e.exo_intrinsics_path, dir)}};
    if (e.hand_depth_path) doc["hand_depth_path"] = relative_to(*e.hand_depth_path, dir);
    if (e.ego_gt_image_path) doc["ego_gt_image_path"] = relative_to(*e.ego_gt_image_path, dir);
    if (e.ego_gt_depth_path) doc["ego_gt_depth_path"] = relative_to(*e.ego_gt_depth_path, dir);
    entries.push_back(std::move(doc));
  }
  write_file(path, json{{"version", 1}, {"entries", entries}}.dump(2) + "\n");
}

}  // namespace egoview::io
