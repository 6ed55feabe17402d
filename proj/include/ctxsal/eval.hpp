#pragma once

#include "ctxsal/pipeline.hpp"
#include "ctxsal/types.hpp"

#include <string>
#include <vector>

namespace ctxsal {

inline constexpr double kDefaultBeta2 = 0.3;

struct PRCurve {
  std::vector<double> thresholds;
  std::vector<double> precision;
  std::vector<double> recall;

  std::size_t size() const { return thresholds.size(); }
};

enum class Aggregation {
  PerImageMean,  // mean of per-image precision and recall
  Pooled,        // precision and recall of the summed pixel counts
};

/// The 256 levels 0/255, 1/255, ..., 255/255.
std::vector<double> default_thresholds();

/// Binarizes each map at every threshold (score >= T) and compares against
/// its ground truth. Precision of an empty binarization is 1.
/// `thresholds` must be strictly increasing.
PRCurve pr_curve(const std::vector<SaliencyMap>& maps, const std::vector<BinaryMask>& ground_truth,
                 const std::vector<double>& thresholds, Aggregation aggregation = Aggregation::PerImageMean);

inline PRCurve pr_curve(const std::vector<SaliencyMap>& maps, const std::vector<BinaryMask>& ground_truth,
                        Aggregation aggregation = Aggregation::PerImageMean) {
  return pr_curve(maps, ground_truth, default_thresholds(), aggregation);
}

/// F = (1 + b2) P R / (b2 P + R); 0 when P = R = 0.
double f_measure(double precision, double recall, double beta2 = kDefaultBeta2);

struct BestF {
  double f = 0.0;
  std::size_t index = 0;  // lowest threshold index attaining the maximum
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

BestF best_f(const PRCurve& curve, double beta2 = kDefaultBeta2);

/// "threshold,precision,recall,f" header plus one row per threshold.
std::string curve_csv(const PRCurve& curve, double beta2 = kDefaultBeta2);

}  // namespace ctxsal
