#include "ctxsal/commands.hpp"

#include "ctxsal/io.hpp"
#include "ctxsal/parallel.hpp"
#include "ctxsal/pipeline.hpp"
#include "ctxsal/proposals.hpp"

#include <cstdio>
#include <fstream>

namespace ctxsal {

using nlohmann::json;

namespace {

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::Io, "cannot create directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open for writing: " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

std::string image_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img_%04zu", i);
  return buf;
}

FeatureFieldf features_for(const ManifestEntry& entry, const ImageBuffer& image, const RunConfig& cfg) {
  if (cfg.features == FeatureSource::Rgb) return rgb_features(image);
  if (!entry.features_path) {
    throw Error(ErrorCode::MissingFile, "entry '" + entry.image_id + "': tensor features requested but no features_path");
  }
  auto field = read_tensor(*entry.features_path);
  if (!field.same_extent(image.width(), image.height())) {
    throw Error(ErrorCode::DimensionMismatch, "entry '" + entry.image_id + "': feature tensor is " +
                                                  std::to_string(field.width()) + "x" + std::to_string(field.height()) +
                                                  ", image is " + std::to_string(image.width()) + "x" +
                                                  std::to_string(image.height()));
  }
  return field;
}

std::vector<BinaryMask> proposals_for(const ManifestEntry& entry, const ImageBuffer& image, const RunConfig& cfg) {
  if (entry.builtin_proposals()) return generate_builtin(image, cfg.builtin_params()).masks;
  return load_proposals(*entry.proposals_dir, cfg.min_area, cfg.max_proposals, std::pair{image.width(), image.height()})
      .masks;
}

template <typename Fn>
auto with_entry_context(const ManifestEntry& entry, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "entry '" + entry.image_id + "': " + e.what());
  }
}

}  // namespace

RunConfig synthetic_run_config(const SynthParams& params, std::uint64_t seed) {
  RunConfig cfg;
  cfg.seed = seed;
  // The 4500 px default assumes benchmark-sized images.
  cfg.min_area = std::max<std::int64_t>(16, std::int64_t{params.width} * params.height / 128);
  cfg.max_proposals = 128;
  return cfg;
}

SynthReport cmd_synth(const fs::path& out_dir, int n_images, std::uint64_t seed, const SynthParams& params) {
  if (n_images < 0) throw Error(ErrorCode::InvalidArgument, "image count must be >= 0");
  make_dir(out_dir / "images");
  make_dir(out_dir / "gt");
  DatasetManifest manifest;
  for (int i = 0; i < n_images; ++i) {
    const auto sample = synthesize_image(seed, static_cast<std::uint64_t>(i), params);
    ManifestEntry entry;
    entry.image_id = image_name(static_cast<std::size_t>(i));
    entry.image_path = out_dir / "images" / (entry.image_id + ".png");
    entry.ground_truth_path = out_dir / "gt" / (entry.image_id + ".png");
    write_image_png(entry.image_path, sample.image);
    write_mask_png(*entry.ground_truth_path, sample.ground_truth);
    manifest.entries.push_back(std::move(entry));
  }
  SynthReport report;
  report.manifest = out_dir / "manifest.json";
  report.config = out_dir / "config.json";
  report.images = manifest.size();
  save_manifest(report.manifest, manifest);
  write_text(report.config, to_json(synthetic_run_config(params, seed)).dump(2) + "\n");
  return report;
}

std::size_t cmd_propose(const fs::path& manifest_path, const fs::path& out_dir, const RunConfig& cfg) {
  cfg.validate();
  const auto manifest = load_manifest(manifest_path);
  make_dir(out_dir);
  std::vector<const ManifestEntry*> builtin;
  for (const auto& e : manifest.entries) {
    if (e.builtin_proposals()) builtin.push_back(&e);
  }
  parallel_for(builtin.size(), cfg.jobs, [&](std::size_t i) {
    const auto& entry = *builtin[i];
    with_entry_context(entry, [&] {
      const auto image = read_image(entry.image_path);
      save_proposals(out_dir / entry.image_id, generate_builtin(image, cfg.builtin_params()).masks);
      return 0;
    });
  });
  return builtin.size();
}

std::vector<ProposalRecord> process_entry(const ManifestEntry& entry, const RunConfig& cfg, bool with_labels) {
  return with_entry_context(entry, [&] {
    const auto image = read_image(entry.image_path);
    const auto field = features_for(entry, image, cfg);
    auto records = extract_records(proposals_for(entry, image, cfg), field, cfg.context_params());
    if (with_labels) {
      if (!entry.ground_truth_path) throw Error(ErrorCode::MissingFile, "ground truth required for training");
      const auto gt = read_mask_png(*entry.ground_truth_path);
      assign_labels(records, gt);
    }
    return records;
  });
}

TrainReport cmd_train(const fs::path& manifest_path, const RunConfig& cfg, const fs::path& model_out) {
  cfg.validate();
  const auto manifest = load_manifest(manifest_path);
  for (const auto& e : manifest.entries) {
    if (!e.ground_truth_path) throw Error(ErrorCode::MissingFile, "entry '" + e.image_id + "': no gt_path for training");
  }
  std::vector<TrainingRows> per_image(manifest.size());
  parallel_for(manifest.size(), cfg.jobs,
               [&](std::size_t i) { per_image[i].append(process_entry(manifest.entries[i], cfg, true)); });

  TrainingRows rows;
  for (auto& r : per_image) {
    std::move(r.object_features.begin(), r.object_features.end(), std::back_inserter(rows.object_features));
    rows.object_labels.insert(rows.object_labels.end(), r.object_labels.begin(), r.object_labels.end());
    rows.context_features.insert(rows.context_features.end(), r.context_features.begin(), r.context_features.end());
    rows.context_labels.insert(rows.context_labels.end(), r.context_labels.begin(), r.context_labels.end());
  }
  const auto model = train_models(rows, cfg.forest_config(0), cfg.forest_config(1), cfg.jobs);
  if (model_out.has_parent_path()) make_dir(model_out.parent_path());
  save_model(model, model_out);
  return {manifest.size(), rows.object_labels.size(), rows.context_labels.size()};
}

std::size_t cmd_predict(const fs::path& manifest_path, const fs::path& model_path, const fs::path& maps_out,
                        const RunConfig& cfg) {
  cfg.validate();
  const auto manifest = load_manifest(manifest_path);
  const auto model = load_model(model_path);
  make_dir(maps_out);
  parallel_for(manifest.size(), cfg.jobs, [&](std::size_t i) {
    const auto& entry = manifest.entries[i];
    auto records = process_entry(entry, cfg, false);
    with_entry_context(entry, [&] {
      const auto map = score_and_fuse(records, model, entry.width, entry.height, cfg.fusion_params());
      write_gray_png(maps_out / (entry.image_id + ".png"), to_gray(map));
      return 0;
    });
  });
  return manifest.size();
}

EvalReport cmd_eval(const fs::path& maps_dir, const fs::path& manifest_path, const fs::path& report_out,
                    const RunConfig& cfg) {
  const auto manifest = load_manifest(manifest_path);
  std::vector<SaliencyMap> maps(manifest.size());
  std::vector<BinaryMask> gts(manifest.size());
  parallel_for(manifest.size(), cfg.jobs, [&](std::size_t i) {
    const auto& entry = manifest.entries[i];
    with_entry_context(entry, [&] {
      if (!entry.ground_truth_path) throw Error(ErrorCode::MissingFile, "no gt_path for evaluation");
      maps[i] = from_gray(read_gray_png(maps_dir / (entry.image_id + ".png")));
      gts[i] = read_mask_png(*entry.ground_truth_path);
      return 0;
    });
  });

  EvalReport report;
  report.images = manifest.size();
  report.curve = pr_curve(maps, gts, cfg.aggregation);
  report.best = best_f(report.curve, cfg.beta2);

  make_dir(report_out);
  write_text(report_out / "pr_curve.csv", curve_csv(report.curve, cfg.beta2));
  const json summary{{"best_f", report.best.f},
                     {"threshold", report.best.threshold},
                     {"threshold_level", report.best.index},
                     {"precision", report.best.precision},
                     {"recall", report.best.recall},
                     {"images", report.images},
                     {"beta2", cfg.beta2},
                     {"aggregation", cfg.aggregation == Aggregation::Pooled ? "pooled" : "per_image"}};
  write_text(report_out / "summary.json", summary.dump(2) + "\n");
  return report;
}

}  // namespace ctxsal
