#include "ctxsal/config.hpp"

#include "ctxsal/rng.hpp"

#include <cstdlib>
#include <fstream>

namespace ctxsal {

using nlohmann::json;

namespace {

const char* name(FeatureSource f) { return f == FeatureSource::Rgb ? "rgb" : "tensor"; }
const char* name(FusionMode m) { return m == FusionMode::Mean ? "mean" : "max"; }
const char* name(PairNormalization n) { return n == PairNormalization::ValidPairs ? "valid_pairs" : "object_area"; }
const char* name(Aggregation a) { return a == Aggregation::PerImageMean ? "per_image" : "pooled"; }

template <typename Enum>
Enum parse_enum(const json& v, const char* key, std::initializer_list<std::pair<const char*, Enum>> options) {
  const auto s = v.get<std::string>();
  for (const auto& [n, e] : options) {
    if (s == n) return e;
  }
  throw Error(ErrorCode::InvalidArgument, std::string("bad value '") + s + "' for " + key);
}

}  // namespace

ContextParams RunConfig::context_params() const {
  ContextParams p;
  p.lambda = lambda;
  p.sigma = sigma;
  p.orientations = OrientationSet{orientations};
  p.normalization = pair_normalization;
  return p;
}

ForestConfig RunConfig::forest_config(std::uint64_t stream) const {
  ForestConfig f;
  f.n_trees = n_trees;
  f.min_samples_leaf = min_samples_leaf;
  f.max_depth = max_depth;
  // Object and context forests draw from distinct seeds.
  f.seed = CounterRng::mix(seed + stream);
  return f;
}

BuiltinParams RunConfig::builtin_params() const {
  BuiltinParams p;
  p.k_scales = k_scales;
  p.min_area = min_area;
  p.max_count = max_proposals;
  p.seed = seed;
  p.min_segment_size = min_segment_size;
  return p;
}

void RunConfig::validate() const {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be non-negative");
  OrientationSet{orientations}.validate();
  if (n_trees < 1) throw Error(ErrorCode::InvalidArgument, "trees must be >= 1");
  if (min_area < 0) throw Error(ErrorCode::InvalidArgument, "min_area must be >= 0");
  if (max_proposals < 1) throw Error(ErrorCode::InvalidArgument, "max_proposals must be >= 1");
  if (jobs < 1) throw Error(ErrorCode::InvalidArgument, "jobs must be >= 1");
  if (k_scales.empty()) throw Error(ErrorCode::InvalidArgument, "k_scales must be non-empty");
  if (!(beta2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta2 must be positive");
}

json to_json(const RunConfig& cfg) {
  return json{
      {"lambda", cfg.lambda},
      {"sigma", cfg.sigma},
      {"orientations", cfg.orientations},
      {"trees", cfg.n_trees},
      {"min_samples_leaf", cfg.min_samples_leaf},
      {"max_depth", cfg.max_depth},
      {"min_area", cfg.min_area},
      {"max_proposals", cfg.max_proposals},
      {"seed", cfg.seed},
      {"features", name(cfg.features)},
      {"fusion", name(cfg.fusion)},
      {"normalize_map", cfg.normalize_map},
      {"pair_normalization", name(cfg.pair_normalization)},
      {"aggregation", name(cfg.aggregation)},
      {"beta2", cfg.beta2},
      {"k_scales", cfg.k_scales},
      {"min_segment_size", cfg.min_segment_size},
      {"jobs", cfg.jobs},
  };
}

void merge_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "lambda") cfg.lambda = v.get<double>();
      else if (key == "sigma") cfg.sigma = v.get<double>();
      else if (key == "orientations") cfg.orientations = v.get<std::vector<double>>();
      else if (key == "trees") cfg.n_trees = v.get<int>();
      else if (key == "min_samples_leaf") cfg.min_samples_leaf = v.get<int>();
      else if (key == "max_depth") cfg.max_depth = v.get<int>();
      else if (key == "min_area") cfg.min_area = v.get<std::int64_t>();
      else if (key == "max_proposals") cfg.max_proposals = v.get<int>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "features")
        cfg.features = parse_enum<FeatureSource>(v, "features", {{"rgb", FeatureSource::Rgb}, {"tensor", FeatureSource::Tensor}});
      else if (key == "fusion")
        cfg.fusion = parse_enum<FusionMode>(v, "fusion", {{"mean", FusionMode::Mean}, {"max", FusionMode::Max}});
      else if (key == "normalize_map") cfg.normalize_map = v.get<bool>();
      else if (key == "pair_normalization")
        cfg.pair_normalization = parse_enum<PairNormalization>(
            v, "pair_normalization",
            {{"valid_pairs", PairNormalization::ValidPairs}, {"object_area", PairNormalization::ObjectArea}});
      else if (key == "aggregation")
        cfg.aggregation = parse_enum<Aggregation>(
            v, "aggregation", {{"per_image", Aggregation::PerImageMean}, {"pooled", Aggregation::Pooled}});
      else if (key == "beta2") cfg.beta2 = v.get<double>();
      else if (key == "k_scales") cfg.k_scales = v.get<std::vector<double>>();
      else if (key == "min_segment_size") cfg.min_segment_size = v.get<int>();
      else if (key == "jobs") cfg.jobs = v.get<int>();
      else throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "config " + path.string());
  RunConfig cfg;
  try {
    merge_json(cfg, json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Io, path.string() + ": " + e.what());
  }
  return cfg;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  if (const char* s = std::getenv("CTXSAL_SEED"); s && *s) {
    char* end = nullptr;
    const auto v = std::strtoull(s, &end, 10);
    if (end && *end == '\0') return v;
    throw Error(ErrorCode::InvalidArgument, "CTXSAL_SEED is not an unsigned integer");
  }
  return fallback;
}

}  // namespace ctxsal
