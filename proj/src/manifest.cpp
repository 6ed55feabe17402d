#include "ctxsal/manifest.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace ctxsal {

using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string relativize(const fs::path& base, const fs::path& p) {
  if (base.empty()) return p.string();
  auto rel = p.lexically_relative(base);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return p.string();
}

}  // namespace

DatasetManifest load_manifest(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::MissingFile, "manifest " + path.string());
  std::ifstream in(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Io, path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("images") || !doc["images"].is_array()) {
    throw Error(ErrorCode::Io, path.string() + ": expected an object with an \"images\" array");
  }

  const fs::path base = path.parent_path();
  DatasetManifest manifest;
  std::set<std::string> seen;
  for (const auto& item : doc["images"]) {
    ManifestEntry entry;
    try {
      entry.image_id = item.at("id").get<std::string>();
      entry.image_path = resolve(base, item.at("image_path").get<std::string>());
      if (item.contains("gt_path") && !item["gt_path"].is_null())
        entry.ground_truth_path = resolve(base, item["gt_path"].get<std::string>());
      if (item.contains("proposals_dir") && !item["proposals_dir"].is_null())
        entry.proposals_dir = resolve(base, item["proposals_dir"].get<std::string>());
      if (item.contains("features_path") && !item["features_path"].is_null())
        entry.features_path = resolve(base, item["features_path"].get<std::string>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Io, path.string() + ": malformed entry: " + e.what());
    }
    const std::string ctx = "entry '" + entry.image_id + "': ";
    if (!seen.insert(entry.image_id).second) {
      throw Error(ErrorCode::InvalidArgument, ctx + "duplicate id");
    }
    if (!fs::is_regular_file(entry.image_path)) {
      throw Error(ErrorCode::MissingFile, ctx + "image_path " + entry.image_path.string());
    }
    if (entry.ground_truth_path && !fs::is_regular_file(*entry.ground_truth_path)) {
      throw Error(ErrorCode::MissingFile, ctx + "gt_path " + entry.ground_truth_path->string());
    }
    if (entry.proposals_dir && !fs::is_directory(*entry.proposals_dir)) {
      throw Error(ErrorCode::MissingFile, ctx + "proposals_dir " + entry.proposals_dir->string());
    }
    if (entry.features_path && !fs::is_regular_file(*entry.features_path)) {
      throw Error(ErrorCode::MissingFile, ctx + "features_path " + entry.features_path->string());
    }
    std::tie(entry.width, entry.height) = read_image_size(entry.image_path);
    if (entry.ground_truth_path) {
      const auto [gw, gh] = read_image_size(*entry.ground_truth_path);
      if (gw != entry.width || gh != entry.height) {
        throw Error(ErrorCode::DimensionMismatch,
                    ctx + "ground truth is " + std::to_string(gw) + "x" + std::to_string(gh) + " but image is " +
                        std::to_string(entry.width) + "x" + std::to_string(entry.height));
      }
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void save_manifest(const fs::path& path, const DatasetManifest& manifest) {
  const fs::path base = path.parent_path().empty() ? fs::path() : fs::absolute(path.parent_path());
  json images = json::array();
  for (const auto& e : manifest.entries) {
    json item;
    item["id"] = e.image_id;
    item["image_path"] = relativize(base, fs::absolute(e.image_path));
    if (e.ground_truth_path) item["gt_path"] = relativize(base, fs::absolute(*e.ground_truth_path));
    if (e.proposals_dir) item["proposals_dir"] = relativize(base, fs::absolute(*e.proposals_dir));
    if (e.features_path) item["features_path"] = relativize(base, fs::absolute(*e.features_path));
    images.push_back(std::move(item));
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write manifest " + path.string());
  out << json{{"images", images}}.dump(2) << '\n';
}

}  // namespace ctxsal
