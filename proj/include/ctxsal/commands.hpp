#pragma once

#include "ctxsal/config.hpp"
#include "ctxsal/eval.hpp"
#include "ctxsal/manifest.hpp"
#include "ctxsal/synth.hpp"

#include <cstdint>
#include <filesystem>

namespace ctxsal {

// Batch workflow behind the command-line tool. Each command is a pure
// function of its inputs and the configured seed.

struct SynthReport {
  fs::path manifest;
  fs::path config;
  std::size_t images = 0;
};

/// Writes images/<id>.png, gt/<id>.png, manifest.json and a config.json
/// scaled to the synthetic image size.
SynthReport cmd_synth(const fs::path& out_dir, int n_images, std::uint64_t seed, const SynthParams& params = {});

/// Proposal settings that suit synthetic images of the given size.
RunConfig synthetic_run_config(const SynthParams& params, std::uint64_t seed);

/// Writes <out_dir>/<image_id>/<k>.png for entries that use the builtin
/// generator; entries with external proposals are skipped. Returns the
/// number of images processed.
std::size_t cmd_propose(const fs::path& manifest_path, const fs::path& out_dir, const RunConfig& cfg);

struct TrainReport {
  std::size_t images = 0;
  std::size_t object_rows = 0;
  std::size_t context_rows = 0;
};

TrainReport cmd_train(const fs::path& manifest_path, const RunConfig& cfg, const fs::path& model_out);

/// Writes <maps_out>/<image_id>.png for every entry.
std::size_t cmd_predict(const fs::path& manifest_path, const fs::path& model_path, const fs::path& maps_out,
                        const RunConfig& cfg);

struct EvalReport {
  PRCurve curve;
  BestF best;
  std::size_t images = 0;
};

/// Reads <maps_dir>/<image_id>.png, writes pr_curve.csv and summary.json
/// into `report_out`.
EvalReport cmd_eval(const fs::path& maps_dir, const fs::path& manifest_path, const fs::path& report_out,
                    const RunConfig& cfg);

/// Records for one manifest entry, with labels when ground truth exists.
std::vector<ProposalRecord> process_entry(const ManifestEntry& entry, const RunConfig& cfg, bool with_labels);

}  // namespace ctxsal
