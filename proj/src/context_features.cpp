#include "ctxsal/context_features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ctxsal {

void OrientationSet::validate() const {
  if (angles.empty()) throw Error(ErrorCode::InvalidArgument, "orientation set is empty");
  for (const double a : angles) {
    if (!(a >= 0.0 && a < std::numbers::pi)) {
      throw Error(ErrorCode::InvalidArgument, "orientation " + std::to_string(a) + " outside [0, pi)");
    }
  }
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    total += taps[i + radius];
  }
  for (auto& t : taps) t /= total;
  return taps;
}

template <typename Scalar>
FeatureField<Scalar> smooth_field(const FeatureField<Scalar>& field, double sigma) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be non-negative");
  if (sigma == 0.0) return field;

  const auto taps = gaussian_kernel(sigma);
  const int radius = static_cast<int>(taps.size() / 2);
  const int w = field.width();
  const int h = field.height();
  FeatureField<Scalar> out(w, h, field.channels());
  std::vector<double> row_pass(static_cast<std::size_t>(w) * h);

  for (int ch = 0; ch < field.channels(); ++ch) {
    const Scalar* src = field.planes().row(ch).data();
    Scalar* dst = out.planes().row(ch).data();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int xx = std::clamp(x + k, 0, w - 1);
          acc += taps[k + radius] * static_cast<double>(src[std::int64_t{y} * w + xx]);
        }
        row_pass[std::int64_t{y} * w + x] = acc;
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int yy = std::clamp(y + k, 0, h - 1);
          acc += taps[k + radius] * row_pass[std::int64_t{yy} * w + x];
        }
        dst[std::int64_t{y} * w + x] = static_cast<Scalar>(acc);
      }
    }
  }
  return out;
}

std::vector<Pixel> ray_offsets(double phi, int max_extent) {
  const double dx = std::cos(phi);
  const double dy = std::sin(phi);
  std::vector<Pixel> offsets;
  Pixel last{0, 0};
  for (int k = 1;; ++k) {
    const Pixel p{static_cast<int>(std::round(k * dx)), static_cast<int>(std::round(k * dy))};
    if (p == last) continue;
    offsets.push_back(p);
    last = p;
    if (std::abs(p.x) > max_extent || std::abs(p.y) > max_extent) break;
  }
  return offsets;
}

namespace {

void check_pair_shapes(const BinaryMask& m, const BinaryMask& c) {
  if (!m.same_shape(c)) throw Error(ErrorCode::DimensionMismatch, "object and context masks differ in size");
}

// Returns the linear index of the first context pixel reached from p by
// walking the offsets with the given sign, or -1 when the walk leaves the
// raster first.
std::int32_t march(const BinaryMask& c, Pixel p, const std::vector<Pixel>& offsets, int sign) {
  for (const auto& o : offsets) {
    const int x = p.x + sign * o.x;
    const int y = p.y + sign * o.y;
    if (!c.in_bounds(x, y)) return -1;
    if (c(x, y)) return y * c.width() + x;
  }
  return -1;
}

// Offsets that form a constant lattice step (all four standard orientations
// do) allow first hits to be shared along the line.
bool lattice_step(const std::vector<Pixel>& offsets, Pixel& step) {
  step = offsets.front();
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    if (offsets[i].x != k * step.x || offsets[i].y != k * step.y) return false;
  }
  return true;
}

// First hits for every object pixel, in the order of `object_pixels`.
std::vector<std::int32_t> first_hits(const BinaryMask& c, const std::vector<std::int32_t>& object_pixels,
                                     const std::vector<Pixel>& offsets, int sign) {
  const int w = c.width();
  std::vector<std::int32_t> hits(object_pixels.size());
  Pixel step;
  if (!lattice_step(offsets, step)) {
    for (std::size_t i = 0; i < object_pixels.size(); ++i) {
      hits[i] = march(c, {object_pixels[i] % w, object_pixels[i] / w}, offsets, sign);
    }
    return hits;
  }

  constexpr std::int32_t kUnknown = -2;
  std::vector<std::int32_t> memo(static_cast<std::size_t>(c.pixel_count()), kUnknown);
  std::vector<std::int32_t> path;
  const int sx = sign * step.x;
  const int sy = sign * step.y;
  for (std::size_t i = 0; i < object_pixels.size(); ++i) {
    const std::int32_t start = object_pixels[i];
    if (memo[start] != kUnknown) {
      hits[i] = memo[start];
      continue;
    }
    path.clear();
    path.push_back(start);
    int x = start % w;
    int y = start / w;
    std::int32_t result;
    for (;;) {
      x += sx;
      y += sy;
      if (!c.in_bounds(x, y)) {
        result = -1;
        break;
      }
      const std::int32_t q = y * w + x;
      if (c(x, y)) {
        result = q;
        break;
      }
      if (memo[q] != kUnknown) {
        result = memo[q];
        break;
      }
      path.push_back(q);
    }
    for (const auto q : path) memo[q] = result;
    hits[i] = result;
  }
  return hits;
}

template <typename Scalar>
double feature_distance(const FeatureField<Scalar>& a, std::int64_t ia, const FeatureField<Scalar>& b,
                        std::int64_t ib) {
  const Scalar* pa = a.planes().data();
  const Scalar* pb = b.planes().data();
  const std::int64_t stride = a.planes().cols();
  double acc = 0.0;
  for (int ch = 0; ch < a.channels(); ++ch) {
    const double diff = static_cast<double>(pb[ch * stride + ib]) - static_cast<double>(pa[ch * stride + ia]);
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

struct OrientationHits {
  std::vector<std::int32_t> u;
  std::vector<std::int32_t> d;
};

OrientationHits endpoints_for(const BinaryMask& c, const std::vector<std::int32_t>& object_pixels, double phi) {
  const auto offsets = ray_offsets(phi, std::max(c.width(), c.height()));
  return {first_hits(c, object_pixels, offsets, +1), first_hits(c, object_pixels, offsets, -1)};
}

}  // namespace

RayEndpoints ray_endpoints(const BinaryMask& m, const BinaryMask& c, Pixel p, double phi) {
  check_pair_shapes(m, c);
  if (!m.in_bounds(p.x, p.y) || !m(p)) {
    throw Error(ErrorCode::InvalidArgument, "ray origin must be an object pixel");
  }
  const auto offsets = ray_offsets(phi, std::max(c.width(), c.height()));
  const auto u = march(c, p, offsets, +1);
  const auto d = march(c, p, offsets, -1);
  RayEndpoints out;
  out.valid = u >= 0 && d >= 0;
  if (u >= 0) out.u = {u % c.width(), u / c.width()};
  if (d >= 0) out.d = {d % c.width(), d / c.width()};
  return out;
}

double canonical_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (const double v : values) total += v;
  return total;
}

template <typename Scalar>
ContextFeatureVector context_features(const BinaryMask& m, const BinaryMask& c, const FeatureField<Scalar>& field,
                                      const FeatureField<Scalar>& smoothed, const ContextParams& params) {
  check_pair_shapes(m, c);
  if (!field.same_extent(m.width(), m.height()) || !smoothed.same_extent(m.width(), m.height()) ||
      field.channels() != smoothed.channels()) {
    throw Error(ErrorCode::DimensionMismatch, "feature field does not match mask size");
  }
  if (!(params.lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  params.orientations.validate();
  params.horizontal.validate();
  if (mask_area(c) == 0) throw Error(ErrorCode::DegenerateContext, "context mask is empty");

  std::vector<std::int32_t> object_pixels;
  const bool* bits = m.data();
  for (std::int64_t i = 0; i < m.pixel_count(); ++i) {
    if (bits[i]) object_pixels.push_back(static_cast<std::int32_t>(i));
  }

  std::vector<double> c1_values;
  std::vector<double> c2_values;
  std::vector<double> c3_values;
  c1_values.reserve(object_pixels.size() * params.orientations.angles.size());
  c2_values.reserve(c1_values.capacity());

  auto accumulate = [&](const OrientationSet& set, std::vector<double>& contrast, std::vector<double>* continuity) {
    for (const double phi : set.angles) {
      const auto hits = endpoints_for(c, object_pixels, phi);
      for (std::size_t i = 0; i < object_pixels.size(); ++i) {
        const auto u = hits.u[i];
        const auto d = hits.d[i];
        if (u < 0 || d < 0) continue;
        const double s_u = feature_distance(field, object_pixels[i], smoothed, u);
        const double s_d = feature_distance(field, object_pixels[i], smoothed, d);
        const double s_du = feature_distance(smoothed, u, smoothed, d);
        contrast.push_back(contrast_from_distances(s_d, s_u, s_du, params.lambda));
        if (continuity) continuity->push_back(continuity_from_distance(s_du, params.lambda));
      }
    }
  };
  accumulate(params.orientations, c1_values, &c2_values);
  accumulate(params.horizontal, c3_values, nullptr);

  ContextFeatureVector out;
  out.valid_pairs = static_cast<std::int64_t>(c1_values.size());
  out.valid_pairs_horizontal = static_cast<std::int64_t>(c3_values.size());
  const double sum1 = canonical_sum(c1_values);
  const double sum2 = canonical_sum(c2_values);
  const double sum3 = canonical_sum(c3_values);
  if (params.normalization == PairNormalization::ObjectArea) {
    const auto area = static_cast<double>(object_pixels.size());
    out.c1 = sum1 / area;
    out.c2 = sum2 / area;
    out.c3 = sum3 / area;
  } else {
    if (out.valid_pairs > 0) {
      out.c1 = sum1 / static_cast<double>(out.valid_pairs);
      out.c2 = sum2 / static_cast<double>(out.valid_pairs);
    }
    if (out.valid_pairs_horizontal > 0) out.c3 = sum3 / static_cast<double>(out.valid_pairs_horizontal);
  }
  return out;
}

template <typename Scalar>
ContextFeatureVector context_features(const BinaryMask& m, const BinaryMask& c, const FeatureField<Scalar>& field,
                                      const ContextParams& params) {
  return context_features(m, c, field, smooth_field(field, params.sigma), params);
}

template FeatureField<float> smooth_field(const FeatureField<float>&, double);
template FeatureField<double> smooth_field(const FeatureField<double>&, double);
template ContextFeatureVector context_features(const BinaryMask&, const BinaryMask&, const FeatureField<float>&,
                                               const FeatureField<float>&, const ContextParams&);
template ContextFeatureVector context_features(const BinaryMask&, const BinaryMask&, const FeatureField<double>&,
                                               const FeatureField<double>&, const ContextParams&);
template ContextFeatureVector context_features(const BinaryMask&, const BinaryMask&, const FeatureField<float>&,
                                               const ContextParams&);
template ContextFeatureVector context_features(const BinaryMask&, const BinaryMask&, const FeatureField<double>&,
                                               const ContextParams&);

}  // namespace ctxsal
