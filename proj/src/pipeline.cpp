#include "ctxsal/pipeline.hpp"

#include "ctxsal/labels.hpp"
#include "ctxsal/morphology.hpp"
#include "ctxsal/object_features.hpp"

#include <algorithm>
#include <cmath>

namespace ctxsal {

std::vector<ProposalRecord> extract_records(const std::vector<BinaryMask>& proposals, const FeatureFieldf& field,
                                            const ContextParams& params) {
  const auto smoothed = smooth_field(field, params.sigma);
  std::vector<ProposalRecord> records;
  records.reserve(proposals.size());
  for (const auto& mask : proposals) {
    if (!field.same_extent(mask.width(), mask.height())) {
      throw Error(ErrorCode::DimensionMismatch, "proposal mask does not match feature field");
    }
    ProposalRecord r;
    r.object_mask = mask;
    auto context = generate_context(mask);
    r.context_mask = std::move(context.context);
    r.dilation_count = context.dilation_count;
    r.context_valid = context.valid;
    r.f_object = pool_object_feature(mask, field);
    if (r.context_valid) {
      r.context_detail = context_features(r.object_mask, r.context_mask, field, smoothed, params);
      r.f_context = r.context_detail.as_vector();
    }
    records.push_back(std::move(r));
  }
  return records;
}

void assign_labels(std::vector<ProposalRecord>& records, const BinaryMask& ground_truth) {
  for (auto& r : records) {
    r.sal_object = sal_object(r.object_mask, ground_truth);
    if (r.context_valid) r.sal_context = sal_context(r.object_mask, r.context_mask, ground_truth);
  }
}

void TrainingRows::append(const std::vector<ProposalRecord>& records) {
  for (const auto& r : records) {
    if (!r.sal_object) continue;
    object_features.push_back(r.f_object);
    object_labels.push_back(*r.sal_object);
    if (r.context_valid && r.sal_context) {
      context_features.push_back(r.f_context);
      context_labels.push_back(*r.sal_context);
    }
  }
}

SaliencyModel train_models(const TrainingRows& rows, const ForestConfig& object_config,
                           const ForestConfig& context_config, int jobs) {
  if (rows.object_features.size() < 2 || rows.context_features.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "need at least two labelled records for each forest");
  }
  const auto dim = rows.object_features.front().size();
  Eigen::MatrixXd object_x(static_cast<Eigen::Index>(rows.object_features.size()), dim);
  for (std::size_t i = 0; i < rows.object_features.size(); ++i) {
    if (rows.object_features[i].size() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "object features differ in dimension across records");
    }
    object_x.row(static_cast<Eigen::Index>(i)) = rows.object_features[i].transpose();
  }
  Eigen::MatrixXd context_x(static_cast<Eigen::Index>(rows.context_features.size()), 3);
  for (std::size_t i = 0; i < rows.context_features.size(); ++i) {
    context_x.row(static_cast<Eigen::Index>(i)) = rows.context_features[i].transpose();
  }
  const Eigen::Map<const Eigen::VectorXd> object_y(rows.object_labels.data(),
                                                   static_cast<Eigen::Index>(rows.object_labels.size()));
  const Eigen::Map<const Eigen::VectorXd> context_y(rows.context_labels.data(),
                                                    static_cast<Eigen::Index>(rows.context_labels.size()));

  SaliencyModel model;
  auto stats = fit_whitening(object_x);
  model.object = train_forest(apply_whitening_rows(stats, object_x), object_y, object_config, jobs);
  model.object.whitening = std::move(stats);
  model.context = train_forest(context_x, context_y, context_config, jobs);
  return model;
}

double score_record(const ProposalRecord& record, const SaliencyModel& model) {
  if (record.f_object.size() != model.object.feature_dim) {
    throw Error(ErrorCode::ModelDimensionMismatch,
                "object feature has " + std::to_string(record.f_object.size()) + " dims, model expects " +
                    std::to_string(model.object.feature_dim));
  }
  if (model.context.feature_dim != 3) throw Error(ErrorCode::ModelDimensionMismatch, "context model is not 3-d");
  const Eigen::VectorXd object_input =
      model.object.whitening ? apply_whitening(*model.object.whitening, record.f_object) : record.f_object;
  double score = model.object.predict(object_input);
  if (record.context_valid) score += model.context.predict(record.f_context);
  return score;
}

SaliencyMap fuse_scores(int width, int height, const std::vector<const BinaryMask*>& masks,
                        const std::vector<double>& scores, FusionMode mode) {
  if (masks.size() != scores.size()) throw Error(ErrorCode::InvalidArgument, "mask and score counts differ");
  SaliencyMap map(width, height);
  const auto n = static_cast<std::size_t>(width) * height;
  std::vector<double> sum(n, 0.0);
  std::vector<std::int32_t> count(n, 0);
  std::vector<double> best(n, -std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < masks.size(); ++k) {
    const auto& m = *masks[k];
    if (m.width() != width || m.height() != height) {
      throw Error(ErrorCode::DimensionMismatch, "proposal mask does not match map size");
    }
    const bool* bits = m.data();
    for (std::size_t i = 0; i < n; ++i) {
      if (!bits[i]) continue;
      sum[i] += scores[k];
      ++count[i];
      best[i] = std::max(best[i], scores[k]);
    }
  }
  double* out = map.scores.data();
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] == 0) continue;
    out[i] = mode == FusionMode::Max ? best[i] : sum[i] / count[i];
  }
  return map;
}

void normalize_minmax(SaliencyMap& map) {
  if (map.scores.size() == 0) return;
  const double lo = map.scores.minCoeff();
  const double hi = map.scores.maxCoeff();
  if (!(hi > lo)) {
    map.scores.setZero();
    return;
  }
  map.scores = ((map.scores - lo) / (hi - lo)).cwiseMax(0.0).cwiseMin(1.0);
}

SaliencyMap score_and_fuse(std::vector<ProposalRecord>& records, const SaliencyModel& model, int width, int height,
                           const FusionParams& params) {
  std::vector<const BinaryMask*> masks;
  std::vector<double> scores;
  for (auto& r : records) {
    r.predicted_score = score_record(r, model);
    masks.push_back(&r.object_mask);
    scores.push_back(r.predicted_score);
  }
  auto map = fuse_scores(width, height, masks, scores, params.mode);
  if (params.normalize) normalize_minmax(map);
  return map;
}

GrayImage to_gray(const SaliencyMap& map) {
  GrayImage out{map.width(), map.height(), {}};
  out.pixels.resize(static_cast<std::size_t>(map.scores.size()));
  const double* in = map.scores.data();
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(in[i], 0.0, 1.0) * 255.0));
  }
  return out;
}

SaliencyMap from_gray(const GrayImage& image) {
  SaliencyMap map(image.width, image.height);
  double* out = map.scores.data();
  for (std::size_t i = 0; i < image.pixels.size(); ++i) out[i] = image.pixels[i] / 255.0;
  return map;
}

}  // namespace ctxsal
