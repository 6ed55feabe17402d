#pragma once

#include "ctxsal/io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ctxsal {

struct ManifestEntry {
  std::string image_id;
  fs::path image_path;
  std::optional<fs::path> ground_truth_path;
  std::optional<fs::path> proposals_dir;  // unset => builtin generator
  std::optional<fs::path> features_path;  // unset => raw RGB
  int width = 0;
  int height = 0;

  bool builtin_proposals() const { return !proposals_dir.has_value(); }
  bool rgb_features() const { return !features_path.has_value(); }
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::size_t size() const { return entries.size(); }
};

/// Parses and validates a manifest. Relative paths resolve against the
/// manifest's directory; every referenced file must exist and ground truth
/// must match its image in size.
DatasetManifest load_manifest(const fs::path& path);

/// Writes the manifest with paths relative to the manifest directory when
/// they lie beneath it.
void save_manifest(const fs::path& path, const DatasetManifest& manifest);

}  // namespace ctxsal
