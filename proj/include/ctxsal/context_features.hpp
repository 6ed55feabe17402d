#pragma once

#include "ctxsal/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace ctxsal {

/// Line orientations in [0, pi). A line through a pixel is sampled in both
/// directions, so pi and 0 describe the same line.
struct OrientationSet {
  std::vector<double> angles;

  static OrientationSet standard() {
    return {{0.0, std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4}};
  }
  static OrientationSet horizontal() { return {{0.0}}; }
  static OrientationSet vertical() { return {{std::numbers::pi / 2}}; }

  void validate() const;
};

struct RayEndpoints {
  Pixel u;  // first context pixel along +(cos phi, sin phi)
  Pixel d;  // first context pixel along -(cos phi, sin phi)
  bool valid = false;
};

/// How the per-pair sums are turned into C1/C2/C3.
enum class PairNormalization {
  ValidPairs,  // divide by the number of (pixel, orientation) pairs with context on both sides
  ObjectArea,  // divide by |M| regardless of excluded lines
};

struct ContextParams {
  double lambda = 40.0;
  double sigma = 3.0;
  OrientationSet orientations = OrientationSet::standard();
  OrientationSet horizontal = OrientationSet::horizontal();
  PairNormalization normalization = PairNormalization::ValidPairs;
};

struct ContextFeatureVector {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  std::int64_t valid_pairs = 0;             // pairs feeding c1 and c2
  std::int64_t valid_pairs_horizontal = 0;  // pairs feeding c3

  Eigen::Vector3d as_vector() const { return {c1, c2, c3}; }
};

/// Separable isotropic Gaussian, kernel radius ceil(3 sigma), renormalized to
/// unit sum, edge pixels replicated. sigma == 0 returns the input.
template <typename Scalar>
FeatureField<Scalar> smooth_field(const FeatureField<Scalar>& field, double sigma);

/// Normalized 1-D Gaussian taps for `sigma`, length 2*ceil(3 sigma)+1.
std::vector<double> gaussian_kernel(double sigma);

/// Deduplicated pixel offsets visited by a unit-step march along
/// (cos phi, sin phi), each sample rounded half away from zero. The march is
/// long enough to leave any raster whose extent is at most `max_extent`.
std::vector<Pixel> ray_offsets(double phi, int max_extent);

/// Marches from `p` in both directions along `phi` and reports the first
/// context pixel on each side; invalid when either march leaves the image.
RayEndpoints ray_endpoints(const BinaryMask& m, const BinaryMask& c, Pixel p, double phi);

inline double contrast_from_distances(double s_d, double s_u, double s_du, double lambda) {
  return std::atan(std::min(s_d, s_u) / (s_du + lambda));
}

inline double continuity_from_distance(double s_du, double lambda) { return std::atan(1.0 / (s_du + lambda)); }

/// Contrast-and-continuity score of one object point against its two
/// context points.
template <typename DerivedM, typename DerivedU, typename DerivedD>
double point_contrast_c1(const Eigen::MatrixBase<DerivedM>& f_m, const Eigen::MatrixBase<DerivedU>& f_u,
                         const Eigen::MatrixBase<DerivedD>& f_d, double lambda) {
  const double s_u = (f_u.template cast<double>() - f_m.template cast<double>()).norm();
  const double s_d = (f_d.template cast<double>() - f_m.template cast<double>()).norm();
  const double s_du = (f_d.template cast<double>() - f_u.template cast<double>()).norm();
  return contrast_from_distances(s_d, s_u, s_du, lambda);
}

/// Continuity-only score of the two context points.
template <typename DerivedU, typename DerivedD>
double point_continuity_c2(const Eigen::MatrixBase<DerivedU>& f_u, const Eigen::MatrixBase<DerivedD>& f_d,
                           double lambda) {
  return continuity_from_distance((f_d.template cast<double>() - f_u.template cast<double>()).norm(), lambda);
}

/// Per-pair values are summed in ascending order so that the result depends
/// only on the multiset of pair values, not on pixel enumeration order.
double canonical_sum(std::vector<double>& values);

/// C1, C2 and C3 of an object/context pair. `field` supplies f at object
/// pixels, `smoothed` supplies f at the context endpoints.
/// Throws DegenerateContext when `c` is empty.
template <typename Scalar>
ContextFeatureVector context_features(const BinaryMask& m, const BinaryMask& c, const FeatureField<Scalar>& field,
                                      const FeatureField<Scalar>& smoothed, const ContextParams& params);

/// Convenience overload that smooths `field` with params.sigma first.
template <typename Scalar>
ContextFeatureVector context_features(const BinaryMask& m, const BinaryMask& c, const FeatureField<Scalar>& field,
                                      const ContextParams& params);

}  // namespace ctxsal
