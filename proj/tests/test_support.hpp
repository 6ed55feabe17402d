#pragma once

// Generators and brute-force reference implementations shared by the test
// binaries. Nothing here calls into the code paths it is used to check.

#include "ctxsal/context_features.hpp"
#include "ctxsal/eval.hpp"
#include "ctxsal/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

namespace testing_support {

using ctxsal::BinaryMask;
using ctxsal::FeatureFieldd;
using ctxsal::FeatureFieldf;
using ctxsal::Aggregation;
using ctxsal::FeatureField;
using ctxsal::SaliencyMap;

inline std::int64_t count_set(const BinaryMask& m) {
  std::int64_t n = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) n += m(x, y) ? 1 : 0;
  return n;
}

/// Union of random rectangles and discs; occasionally the full raster or a
/// border-hugging strip. Never empty.
inline BinaryMask random_blob_mask(std::mt19937_64& rng, int w, int h) {
  BinaryMask m(w, h);
  std::uniform_int_distribution<int> kind(0, 19);
  const int k = kind(rng);
  if (k == 0) {
    m.bits().setConstant(true);
    return m;
  }
  if (k == 1) {
    const int cols = std::uniform_int_distribution<int>(1, std::max(1, w / 3))(rng);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < cols; ++x) m(x, y) = true;
    return m;
  }
  const int blobs = std::uniform_int_distribution<int>(1, 4)(rng);
  for (int b = 0; b < blobs; ++b) {
    const int cx = std::uniform_int_distribution<int>(0, w - 1)(rng);
    const int cy = std::uniform_int_distribution<int>(0, h - 1)(rng);
    const int rx = std::uniform_int_distribution<int>(0, std::max(1, w / 3))(rng);
    const int ry = std::uniform_int_distribution<int>(0, std::max(1, h / 3))(rng);
    const bool disc = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
    for (int y = std::max(0, cy - ry); y <= std::min(h - 1, cy + ry); ++y) {
      for (int x = std::max(0, cx - rx); x <= std::min(w - 1, cx + rx); ++x) {
        if (disc && rx > 0 && ry > 0) {
          const double dx = double(x - cx) / rx;
          const double dy = double(y - cy) / ry;
          if (dx * dx + dy * dy > 1.0) continue;
        }
        m(x, y) = true;
      }
    }
  }
  if (count_set(m) == 0) m(w / 2, h / 2) = true;
  return m;
}

inline BinaryMask random_noise_mask(std::mt19937_64& rng, int w, int h, double p) {
  BinaryMask m(w, h);
  std::bernoulli_distribution coin(p);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m(x, y) = coin(rng);
  return m;
}

inline BinaryMask rect_mask(int w, int h, int x0, int y0, int rw, int rh) {
  BinaryMask m(w, h);
  for (int y = y0; y < y0 + rh; ++y)
    for (int x = x0; x < x0 + rw; ++x) m(x, y) = true;
  return m;
}

/// Set-union of 3x3 blocks around every set pixel.
inline BinaryMask oracle_dilate(const BinaryMask& m) {
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y)) continue;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (m.in_bounds(x + dx, y + dy)) out(x + dx, y + dy) = true;
    }
  }
  return out;
}

struct OracleContext {
  BinaryMask context;
  int n = 0;
  bool valid = false;
};

/// Dilates step by step, recomputing the full ring and its area each time.
inline OracleContext oracle_context(const BinaryMask& m) {
  const auto object_area = count_set(m);
  BinaryMask grown = m;
  OracleContext out;
  auto ring_of = [&](const BinaryMask& g) {
    BinaryMask r(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x) r(x, y) = g(x, y) && !m(x, y);
    return r;
  };
  for (;;) {
    BinaryMask next = oracle_dilate(grown);
    if (next == grown) break;
    grown = next;
    ++out.n;
    if (count_set(ring_of(grown)) >= object_area) break;
  }
  out.context = ring_of(grown);
  out.valid = count_set(out.context) > 0;
  return out;
}

template <typename Scalar>
ctxsal::FeatureField<Scalar> random_field(std::mt19937_64& rng, int w, int h, int channels, double lo = 0.0,
                                          double hi = 1.0) {
  ctxsal::FeatureField<Scalar> f(w, h, channels);
  std::uniform_real_distribution<double> u(lo, hi);
  for (int c = 0; c < channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) f(c, x, y) = static_cast<Scalar>(u(rng));
  return f;
}

/// Direct 2-D convolution with the separable kernel's outer product,
/// replicating edge pixels.
template <typename Scalar>
ctxsal::FeatureField<double> oracle_smooth(const ctxsal::FeatureField<Scalar>& f, double sigma) {
  const int r = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> g(2 * r + 1);
  double total = 0;
  for (int i = -r; i <= r; ++i) total += g[i + r] = std::exp(-(i * i) / (2 * sigma * sigma));
  ctxsal::FeatureField<double> out(f.width(), f.height(), f.channels());
  for (int c = 0; c < f.channels(); ++c) {
    for (int y = 0; y < f.height(); ++y) {
      for (int x = 0; x < f.width(); ++x) {
        double acc = 0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const int xx = std::clamp(x + dx, 0, f.width() - 1);
            const int yy = std::clamp(y + dy, 0, f.height() - 1);
            acc += g[dx + r] * g[dy + r] / (total * total) * f(c, xx, yy);
          }
        }
        out(c, x, y) = acc;
      }
    }
  }
  return out;
}

struct NaiveHit {
  int x = -1;
  int y = -1;
  bool ok = false;
};

/// Walks k = 1, 2, ... along +-(cos phi, sin phi), rounding half away from
/// zero, until a context pixel is met or the raster is left.
inline NaiveHit naive_march(const BinaryMask& c, int px, int py, double phi, int sign) {
  const double dx = sign * std::cos(phi);
  const double dy = sign * std::sin(phi);
  for (int k = 1;; ++k) {
    const double fx = px + k * dx;
    const double fy = py + k * dy;
    const int x = static_cast<int>(fx >= 0 ? std::floor(fx + 0.5) : -std::floor(-fx + 0.5));
    const int y = static_cast<int>(fy >= 0 ? std::floor(fy + 0.5) : -std::floor(-fy + 0.5));
    if (x < 0 || y < 0 || x >= c.width() || y >= c.height()) return {};
    if (c(x, y)) return {x, y, true};
  }
}

template <typename Scalar>
double naive_distance(const ctxsal::FeatureField<Scalar>& a, int ax, int ay, const ctxsal::FeatureField<Scalar>& b,
                      int bx, int by) {
  double acc = 0;
  for (int ch = 0; ch < a.channels(); ++ch) {
    const double d = static_cast<double>(b(ch, bx, by)) - static_cast<double>(a(ch, ax, ay));
    acc += d * d;
  }
  return std::sqrt(acc);
}

struct NaiveFeatures {
  std::vector<double> c1;
  std::vector<double> c2;
  std::vector<double> c3;
  std::int64_t area = 0;
};

/// Pixel x orientation x channel loops producing every per-pair value.
template <typename Scalar>
NaiveFeatures naive_pair_values(const BinaryMask& m, const BinaryMask& c, const ctxsal::FeatureField<Scalar>& f,
                                const ctxsal::FeatureField<Scalar>& smoothed, const std::vector<double>& phis,
                                const std::vector<double>& horizontal, double lambda) {
  NaiveFeatures out;
  auto pairs = [&](int x, int y, double phi, std::vector<double>& contrast, std::vector<double>* continuity) {
    const auto u = naive_march(c, x, y, phi, +1);
    const auto d = naive_march(c, x, y, phi, -1);
    if (!u.ok || !d.ok) return;
    const double su = naive_distance(f, x, y, smoothed, u.x, u.y);
    const double sd = naive_distance(f, x, y, smoothed, d.x, d.y);
    const double sdu = naive_distance(smoothed, u.x, u.y, smoothed, d.x, d.y);
    contrast.push_back(std::atan(std::min(sd, su) / (sdu + lambda)));
    if (continuity) continuity->push_back(std::atan(1.0 / (sdu + lambda)));
  };
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y)) continue;
      ++out.area;
      for (const double phi : phis) pairs(x, y, phi, out.c1, &out.c2);
      for (const double phi : horizontal) pairs(x, y, phi, out.c3, nullptr);
    }
  }
  return out;
}

inline double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0;
  for (const double x : v) s += x;
  return s;
}

inline double shuffled_sum(std::vector<double> v, std::mt19937_64& rng) {
  std::shuffle(v.begin(), v.end(), rng);
  double s = 0;
  for (const double x : v) s += x;
  return s;
}

inline BinaryMask rotate90(const BinaryMask& m) {
  // (x, y) -> (h-1-y, x)
  BinaryMask out(m.height(), m.width());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) out(m.height() - 1 - y, x) = m(x, y);
  return out;
}

template <typename S>
FeatureField<S> rotate90(const FeatureField<S>& f) {
  FeatureField<S> out(f.height(), f.width(), f.channels());
  for (int c = 0; c < f.channels(); ++c)
    for (int y = 0; y < f.height(); ++y)
      for (int x = 0; x < f.width(); ++x) out(c, f.height() - 1 - y, x) = f(c, x, y);
  return out;
}

inline BinaryMask flip_h(const BinaryMask& m) {
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) out(m.width() - 1 - x, y) = m(x, y);
  return out;
}

template <typename S>
FeatureField<S> flip_h(const FeatureField<S>& f) {
  FeatureField<S> out(f.width(), f.height(), f.channels());
  for (int c = 0; c < f.channels(); ++c)
    for (int y = 0; y < f.height(); ++y)
      for (int x = 0; x < f.width(); ++x) out(c, f.width() - 1 - x, y) = f(c, x, y);
  return out;
}

struct Counts {
  double tp = 0;
  double detected = 0;
  double salient = 0;
};

inline Counts enumerate(const SaliencyMap& map, const BinaryMask& gt, double t) {
  Counts c;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      const bool b = map(x, y) >= t;
      c.detected += b;
      c.salient += gt(x, y);
      c.tp += b && gt(x, y);
    }
  return c;
}

/// Exhaustive P and R at threshold t: per-image means, or ratios of summed
/// counts.
inline std::pair<double, double> oracle_pr(const std::vector<SaliencyMap>& maps,
                                           const std::vector<BinaryMask>& gts, double t, Aggregation agg) {
  if (agg == Aggregation::Pooled) {
    Counts total;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const auto c = enumerate(maps[i], gts[i], t);
      total.tp += c.tp;
      total.detected += c.detected;
      total.salient += c.salient;
    }
    return {total.detected == 0 ? 1.0 : total.tp / total.detected, total.tp / total.salient};
  }
  double p = 0;
  double r = 0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto c = enumerate(maps[i], gts[i], t);
    p += c.detected == 0 ? 1.0 : c.tp / c.detected;
    r += c.tp / c.salient;
  }
  return {p / maps.size(), r / maps.size()};
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ctxsal_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support

