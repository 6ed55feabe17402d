#include "ctxsal/eval.hpp"

#include <algorithm>
#include <cstdio>

namespace ctxsal {

std::vector<double> default_thresholds() {
  std::vector<double> t(256);
  for (int l = 0; l < 256; ++l) t[l] = l / 255.0;
  return t;
}

namespace {

struct Counts {
  std::vector<std::int64_t> selected;  // |B_t|
  std::vector<std::int64_t> hits;      // |B_t ∩ S|
  std::int64_t salient = 0;            // |S|
};

// Each pixel is binned by how many thresholds it reaches; suffix sums give
// the binarization counts at every threshold in one pass.
Counts count_binarizations(const SaliencyMap& map, const BinaryMask& gt, const std::vector<double>& thresholds) {
  const auto t = thresholds.size();
  std::vector<std::int64_t> reach_all(t + 1, 0);
  std::vector<std::int64_t> reach_salient(t + 1, 0);
  const double* scores = map.scores.data();
  const bool* truth = gt.data();
  Counts c;
  for (std::int64_t i = 0; i < gt.pixel_count(); ++i) {
    const auto level = static_cast<std::size_t>(std::upper_bound(thresholds.begin(), thresholds.end(), scores[i]) -
                                                 thresholds.begin());
    ++reach_all[level];
    if (truth[i]) {
      ++reach_salient[level];
      ++c.salient;
    }
  }
  c.selected.assign(t, 0);
  c.hits.assign(t, 0);
  std::int64_t all = 0;
  std::int64_t sal = 0;
  for (std::size_t k = t; k-- > 0;) {
    all += reach_all[k + 1];
    sal += reach_salient[k + 1];
    c.selected[k] = all;
    c.hits[k] = sal;
  }
  return c;
}

double precision_of(std::int64_t hits, std::int64_t selected) {
  return selected == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(selected);
}

}  // namespace

PRCurve pr_curve(const std::vector<SaliencyMap>& maps, const std::vector<BinaryMask>& ground_truth,
                 const std::vector<double>& thresholds, Aggregation aggregation) {
  if (maps.size() != ground_truth.size()) throw Error(ErrorCode::InvalidArgument, "map and ground-truth counts differ");
  if (maps.empty()) throw Error(ErrorCode::InsufficientData, "no maps to evaluate");
  if (thresholds.empty() || !std::is_sorted(thresholds.begin(), thresholds.end()) ||
      std::adjacent_find(thresholds.begin(), thresholds.end()) != thresholds.end()) {
    throw Error(ErrorCode::InvalidArgument, "thresholds must be strictly increasing");
  }
  const auto t = thresholds.size();
  PRCurve curve;
  curve.thresholds = thresholds;
  curve.precision.assign(t, 0.0);
  curve.recall.assign(t, 0.0);
  std::vector<std::int64_t> pooled_selected(t, 0);
  std::vector<std::int64_t> pooled_hits(t, 0);
  std::int64_t pooled_salient = 0;

  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].width() != ground_truth[i].width() || maps[i].height() != ground_truth[i].height()) {
      throw Error(ErrorCode::DimensionMismatch, "map " + std::to_string(i) + " does not match its ground truth");
    }
    const auto c = count_binarizations(maps[i], ground_truth[i], thresholds);
    if (c.salient == 0) throw Error(ErrorCode::EmptyGroundTruth, "ground truth " + std::to_string(i) + " is empty");
    for (std::size_t k = 0; k < t; ++k) {
      curve.precision[k] += precision_of(c.hits[k], c.selected[k]);
      curve.recall[k] += static_cast<double>(c.hits[k]) / static_cast<double>(c.salient);
      pooled_selected[k] += c.selected[k];
      pooled_hits[k] += c.hits[k];
    }
    pooled_salient += c.salient;
  }
  for (std::size_t k = 0; k < t; ++k) {
    if (aggregation == Aggregation::Pooled) {
      curve.precision[k] = precision_of(pooled_hits[k], pooled_selected[k]);
      curve.recall[k] = static_cast<double>(pooled_hits[k]) / static_cast<double>(pooled_salient);
    } else {
      curve.precision[k] /= static_cast<double>(maps.size());
      curve.recall[k] /= static_cast<double>(maps.size());
    }
  }
  return curve;
}

double f_measure(double precision, double recall, double beta2) {
  const double denominator = beta2 * precision + recall;
  if (denominator <= 0.0) return 0.0;
  return (1.0 + beta2) * precision * recall / denominator;
}

BestF best_f(const PRCurve& curve, double beta2) {
  if (curve.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty PR curve");
  BestF best;
  best.f = -1.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const double f = f_measure(curve.precision[k], curve.recall[k], beta2);
    if (f > best.f) best = {f, k, curve.thresholds[k], curve.precision[k], curve.recall[k]};
  }
  return best;
}

std::string curve_csv(const PRCurve& curve, double beta2) {
  std::string out = "threshold,precision,recall,f\n";
  char line[128];
  for (std::size_t k = 0; k < curve.size(); ++k) {
    std::snprintf(line, sizeof line, "%.6f,%.9f,%.9f,%.9f\n", curve.thresholds[k], curve.precision[k],
                  curve.recall[k], f_measure(curve.precision[k], curve.recall[k], beta2));
    out += line;
  }
  return out;
}

}  // namespace ctxsal
