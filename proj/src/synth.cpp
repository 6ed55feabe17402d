#include "ctxsal/synth.hpp"

#include "ctxsal/rng.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ctxsal {

namespace {

struct Grating {
  double fx;
  double fy;
  double phase;
  double amplitude;
};

Eigen::Vector3d random_color(CounterRng& rng, double lo, double hi) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

}  // namespace

SynthImage synthesize_image(std::uint64_t seed, std::uint64_t index, const SynthParams& params) {
  CounterRng rng(seed, index);
  const int w = params.width;
  const int h = params.height;

  const Eigen::Vector3d base = random_color(rng, 0.25, 0.75);
  Grating gratings[2];
  for (auto& g : gratings) {
    const double freq = rng.uniform(0.04, 0.2);
    const double angle = rng.uniform(0.0, std::numbers::pi);
    g = {freq * std::cos(angle), freq * std::sin(angle), rng.uniform(0.0, 2 * std::numbers::pi),
         rng.uniform(0.03, 0.07)};
  }
  const Eigen::Vector3d tint = random_color(rng, 0.5, 1.0);

  SynthImage out{ImageBuffer(w, h, 3), BinaryMask(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double texture = 0.0;
      for (const auto& g : gratings) {
        texture += g.amplitude * std::sin(2 * std::numbers::pi * (g.fx * x + g.fy * y) + g.phase);
      }
      for (int c = 0; c < 3; ++c) {
        const double v = base(c) + tint(c) * texture + rng.uniform(-0.03, 0.03);
        out.image(x, y, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }

  const int shapes = params.min_shapes + static_cast<int>(rng.below(params.max_shapes - params.min_shapes + 1));
  constexpr int kMargin = 4;
  for (int s = 0; s < shapes; ++s) {
    const bool ellipse = rng.below(2) == 1;
    const int sw = std::max(6, static_cast<int>(rng.uniform(0.18, 0.42) * w));
    const int sh = std::max(6, static_cast<int>(rng.uniform(0.18, 0.42) * h));
    const int x0 = kMargin + static_cast<int>(rng.below(static_cast<std::uint64_t>(w - sw - 2 * kMargin + 1)));
    const int y0 = kMargin + static_cast<int>(rng.below(static_cast<std::uint64_t>(h - sh - 2 * kMargin + 1)));
    Eigen::Vector3d color;
    do {
      color = random_color(rng, 0.0, 1.0);
    } while ((color - base).norm() < 0.45);

    const double cx = x0 + (sw - 1) / 2.0;
    const double cy = y0 + (sh - 1) / 2.0;
    const double rx = sw / 2.0;
    const double ry = sh / 2.0;
    for (int y = y0; y < y0 + sh; ++y) {
      for (int x = x0; x < x0 + sw; ++x) {
        if (ellipse) {
          const double dx = (x - cx) / rx;
          const double dy = (y - cy) / ry;
          if (dx * dx + dy * dy > 1.0) continue;
        }
        out.ground_truth(x, y) = true;
        for (int c = 0; c < 3; ++c) {
          out.image(x, y, c) = static_cast<float>(std::clamp(color(c) + rng.uniform(-0.02, 0.02), 0.0, 1.0));
        }
      }
    }
  }
  return out;
}

}  // namespace ctxsal
