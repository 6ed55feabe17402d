// ctxsal: context-proposal salient object detection, batch command line.

#include "ctxsal/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

struct Overrides {
  std::string config_path;
  std::optional<double> lambda;
  std::optional<double> sigma;
  std::optional<int> trees;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> min_area;
  std::optional<int> max_proposals;
  std::optional<std::string> features;
  std::optional<std::string> fusion;
  std::optional<std::string> pair_normalization;
  std::optional<std::string> aggregation;
  std::optional<int> jobs;
  bool no_normalize = false;
};

void add_overrides(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config_path, "JSON run configuration; flags override its values");
  app.add_option("--lambda", o.lambda, "context-feature damping constant");
  app.add_option("--sigma", o.sigma, "Gaussian sigma (pixels) for context sampling");
  app.add_option("--trees", o.trees, "trees per random forest");
  app.add_option("--seed", o.seed, "random seed (falls back to CTXSAL_SEED)");
  app.add_option("--min-area", o.min_area, "minimum proposal area in pixels");
  app.add_option("--max-proposals", o.max_proposals, "maximum proposals per image");
  app.add_option("--features", o.features, "feature source")->check(CLI::IsMember({"rgb", "tensor"}));
  app.add_option("--fusion", o.fusion, "per-pixel fusion rule")->check(CLI::IsMember({"mean", "max"}));
  app.add_option("--pair-normalization", o.pair_normalization, "context-feature normaliser")
      ->check(CLI::IsMember({"valid_pairs", "object_area"}));
  app.add_option("--aggregation", o.aggregation, "PR aggregation across images")
      ->check(CLI::IsMember({"per_image", "pooled"}));
  app.add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--no-normalize", o.no_normalize, "skip min-max normalization of fused maps");
}

ctxsal::RunConfig resolve(const Overrides& o) {
  ctxsal::RunConfig cfg;
  cfg.seed = ctxsal::seed_from_env(cfg.seed);
  if (!o.config_path.empty()) {
    const auto env_seed = cfg.seed;
    cfg = ctxsal::load_config(o.config_path);
    // A config file without a seed keeps the environment fallback.
    nlohmann::json j;
    std::ifstream(o.config_path) >> j;
    if (!j.contains("seed")) cfg.seed = env_seed;
  }
  nlohmann::json patch = nlohmann::json::object();
  if (o.lambda) patch["lambda"] = *o.lambda;
  if (o.sigma) patch["sigma"] = *o.sigma;
  if (o.trees) patch["trees"] = *o.trees;
  if (o.seed) patch["seed"] = *o.seed;
  if (o.min_area) patch["min_area"] = *o.min_area;
  if (o.max_proposals) patch["max_proposals"] = *o.max_proposals;
  if (o.features) patch["features"] = *o.features;
  if (o.fusion) patch["fusion"] = *o.fusion;
  if (o.pair_normalization) patch["pair_normalization"] = *o.pair_normalization;
  if (o.aggregation) patch["aggregation"] = *o.aggregation;
  if (o.jobs) patch["jobs"] = *o.jobs;
  if (o.no_normalize) patch["normalize_map"] = false;
  ctxsal::merge_json(cfg, patch);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Salient object detection from object and context proposals"};
  app.require_subcommand(1);
  Overrides overrides;

  std::string manifest;
  std::string out_dir;
  std::string model;
  std::string maps;
  std::string report;
  int n_images = 0;
  int width = ctxsal::SynthParams{}.width;
  int height = ctxsal::SynthParams{}.height;

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset (images, ground truth, manifest)");
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("-n,--images", n_images, "number of images")->required()->check(CLI::NonNegativeNumber);
  synth->add_option("--width", width, "image width")->check(CLI::Range(24, 4096));
  synth->add_option("--height", height, "image height")->check(CLI::Range(24, 4096));
  add_overrides(*synth, overrides);

  auto* propose = app.add_subcommand("propose", "write builtin proposal masks for every manifest entry");
  propose->add_option("--manifest", manifest, "dataset manifest")->required();
  propose->add_option("--out", out_dir, "output directory")->required();
  add_overrides(*propose, overrides);

  auto* train = app.add_subcommand("train", "train the object and context forests");
  train->add_option("--manifest", manifest, "dataset manifest (with ground truth)")->required();
  train->add_option("--model", model, "model file to write")->required();
  add_overrides(*train, overrides);

  auto* predict = app.add_subcommand("predict", "write saliency maps");
  predict->add_option("--manifest", manifest, "dataset manifest")->required();
  predict->add_option("--model", model, "trained model file")->required();
  predict->add_option("--out", maps, "directory for <id>.png maps")->required();
  add_overrides(*predict, overrides);

  auto* eval = app.add_subcommand("eval", "PR curve and best F-measure of saliency maps");
  eval->add_option("--maps", maps, "directory of <id>.png maps")->required();
  eval->add_option("--manifest", manifest, "dataset manifest (with ground truth)")->required();
  eval->add_option("--out", report, "report directory")->required();
  add_overrides(*eval, overrides);

  auto* config = app.add_subcommand("config", "print the effective configuration as JSON");
  add_overrides(*config, overrides);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = resolve(overrides);
    if (synth->parsed()) {
      const auto r = ctxsal::cmd_synth(out_dir, n_images, cfg.seed, {width, height});
      std::cout << "wrote " << r.images << " images; manifest " << r.manifest.string() << '\n';
    } else if (propose->parsed()) {
      const auto n = ctxsal::cmd_propose(manifest, out_dir, cfg);
      std::cout << "wrote proposals for " << n << " images\n";
    } else if (train->parsed()) {
      const auto r = ctxsal::cmd_train(manifest, cfg, model);
      std::cout << "trained on " << r.images << " images: " << r.object_rows << " object rows, " << r.context_rows
                << " context rows\n";
    } else if (predict->parsed()) {
      const auto n = ctxsal::cmd_predict(manifest, model, maps, cfg);
      std::cout << "wrote " << n << " saliency maps\n";
    } else if (eval->parsed()) {
      const auto r = ctxsal::cmd_eval(maps, manifest, report, cfg);
      std::cout << "best F = " << r.best.f << " at threshold " << r.best.index << "/255 (P=" << r.best.precision
                << ", R=" << r.best.recall << ") over " << r.images << " images\n";
    } else if (config->parsed()) {
      std::cout << ctxsal::to_json(cfg).dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "ctxsal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
