#pragma once

#include "ctxsal/context_features.hpp"
#include "ctxsal/forest.hpp"
#include "ctxsal/io.hpp"
#include "ctxsal/types.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace ctxsal {

/// One object proposal with its context ring, descriptors and (at training
/// time) regression targets.
struct ProposalRecord {
  BinaryMask object_mask;
  BinaryMask context_mask;
  int dilation_count = 0;
  bool context_valid = false;
  Eigen::VectorXd f_object;
  Eigen::Vector3d f_context = Eigen::Vector3d::Zero();
  ContextFeatureVector context_detail;
  std::optional<double> sal_object;
  std::optional<double> sal_context;  // unset when the context is invalid
  double predicted_score = 0.0;
};

/// Context ring, pooled object feature and context features for each
/// proposal. The field is smoothed once and shared by all proposals.
std::vector<ProposalRecord> extract_records(const std::vector<BinaryMask>& proposals, const FeatureFieldf& field,
                                            const ContextParams& params);

/// Fills sal_object for every record and sal_context for those with a valid
/// context.
void assign_labels(std::vector<ProposalRecord>& records, const BinaryMask& ground_truth);

/// Training matrices accumulated over many images.
struct TrainingRows {
  std::vector<Eigen::VectorXd> object_features;
  std::vector<double> object_labels;
  std::vector<Eigen::Vector3d> context_features;
  std::vector<double> context_labels;

  void append(const std::vector<ProposalRecord>& records);
};

/// Fits whitening on the object rows, then trains the object forest on the
/// whitened rows and the context forest on the raw context rows.
SaliencyModel train_models(const TrainingRows& rows, const ForestConfig& object_config,
                           const ForestConfig& context_config, int jobs = 1);

/// Per-pixel scores, stored (y, x) row-major.
struct SaliencyMap {
  using Scores = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Scores scores;

  SaliencyMap() = default;
  SaliencyMap(int width, int height) : scores(Scores::Zero(height, width)) {}

  int width() const { return static_cast<int>(scores.cols()); }
  int height() const { return static_cast<int>(scores.rows()); }
  double operator()(int x, int y) const { return scores(y, x); }
};

enum class FusionMode { Mean, Max };

struct FusionParams {
  FusionMode mode = FusionMode::Mean;
  bool normalize = true;  // min-max to [0,1]; constant maps become all zero
};

/// Object-forest prediction plus context-forest prediction (object only when
/// the context is invalid). Throws ModelDimensionMismatch.
double score_record(const ProposalRecord& record, const SaliencyModel& model);

/// Per-pixel mean (or max) of the scores of the masks covering the pixel;
/// uncovered pixels are 0. No normalization.
SaliencyMap fuse_scores(int width, int height, const std::vector<const BinaryMask*>& masks,
                        const std::vector<double>& scores, FusionMode mode);

void normalize_minmax(SaliencyMap& map);

/// Scores every record (writing predicted_score) and fuses them into a map.
SaliencyMap score_and_fuse(std::vector<ProposalRecord>& records, const SaliencyModel& model, int width, int height,
                           const FusionParams& params = {});

/// 8-bit encoding: round(score * 255), half away from zero.
GrayImage to_gray(const SaliencyMap& map);
SaliencyMap from_gray(const GrayImage& image);

}  // namespace ctxsal
