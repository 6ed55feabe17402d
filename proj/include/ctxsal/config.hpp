#pragma once

#include "ctxsal/context_features.hpp"
#include "ctxsal/eval.hpp"
#include "ctxsal/forest.hpp"
#include "ctxsal/pipeline.hpp"
#include "ctxsal/proposals.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ctxsal {

enum class FeatureSource { Rgb, Tensor };

/// Every tunable of a run. Defaults are the published hyperparameters where
/// those exist.
struct RunConfig {
  double lambda = 40.0;
  double sigma = 3.0;
  std::vector<double> orientations = OrientationSet::standard().angles;
  int n_trees = 200;
  int min_samples_leaf = 5;
  int max_depth = 0;
  std::int64_t min_area = kDefaultMinArea;
  int max_proposals = kDefaultMaxProposals;
  std::uint64_t seed = 0;
  FeatureSource features = FeatureSource::Rgb;
  FusionMode fusion = FusionMode::Mean;
  bool normalize_map = true;
  PairNormalization pair_normalization = PairNormalization::ValidPairs;
  Aggregation aggregation = Aggregation::PerImageMean;
  double beta2 = kDefaultBeta2;
  std::vector<double> k_scales = BuiltinParams{}.k_scales;
  int min_segment_size = BuiltinParams{}.min_segment_size;
  int jobs = 1;

  ContextParams context_params() const;
  ForestConfig forest_config(std::uint64_t stream) const;
  BuiltinParams builtin_params() const;
  FusionParams fusion_params() const { return {fusion, normalize_map}; }

  void validate() const;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Overlays the keys present in `j` onto `cfg`; unknown keys are rejected.
void merge_json(RunConfig& cfg, const nlohmann::json& j);

RunConfig load_config(const std::filesystem::path& path);

/// Seed taken from CTXSAL_SEED when set, otherwise `fallback`.
std::uint64_t seed_from_env(std::uint64_t fallback);

}  // namespace ctxsal
