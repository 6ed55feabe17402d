#include "ctxsal/morphology.hpp"

#include <vector>

namespace ctxsal {
namespace {

// Frontier growth: the pixels added by dilation step k are exactly the unset
// 8-neighbours of the pixels added at step k-1, so each step costs O(frontier).
class FrontierDilator {
 public:
  explicit FrontierDilator(const BinaryMask& seed) : grown_(seed), width_(seed.width()), height_(seed.height()) {
    const bool* bits = grown_.data();
    for (std::int64_t i = 0; i < grown_.pixel_count(); ++i) {
      if (bits[i]) frontier_.push_back(static_cast<std::int32_t>(i));
    }
  }

  // Returns the number of newly set pixels.
  std::int64_t step() {
    next_.clear();
    bool* bits = grown_.data();
    for (const auto idx : frontier_) {
      const int x = idx % width_;
      const int y = idx / width_;
      const int y0 = y > 0 ? y - 1 : y;
      const int y1 = y + 1 < height_ ? y + 1 : y;
      const int x0 = x > 0 ? x - 1 : x;
      const int x1 = x + 1 < width_ ? x + 1 : x;
      for (int yy = y0; yy <= y1; ++yy) {
        for (int xx = x0; xx <= x1; ++xx) {
          const std::int32_t n = yy * width_ + xx;
          if (!bits[n]) {
            bits[n] = true;
            next_.push_back(n);
          }
        }
      }
    }
    frontier_.swap(next_);
    return static_cast<std::int64_t>(frontier_.size());
  }

  const BinaryMask& grown() const { return grown_; }

 private:
  BinaryMask grown_;
  int width_;
  int height_;
  std::vector<std::int32_t> frontier_;
  std::vector<std::int32_t> next_;
};

}  // namespace

BinaryMask dilate_n8(const BinaryMask& m) {
  FrontierDilator dilator(m);
  dilator.step();
  return dilator.grown();
}

BinaryMask context_ring(const BinaryMask& m, int n) {
  FrontierDilator dilator(m);
  for (int i = 0; i < n; ++i) {
    if (dilator.step() == 0) break;
  }
  return BinaryMask(dilator.grown().bits() && !m.bits());
}

ContextResult generate_context(const BinaryMask& m) {
  const std::int64_t object_area = mask_area(m);
  if (object_area == 0) throw Error(ErrorCode::EmptyMask, "context of an empty proposal");

  FrontierDilator dilator(m);
  ContextResult result;
  std::int64_t ring_area = 0;
  while (ring_area < object_area) {
    const auto added = dilator.step();
    if (added == 0) {
      result.saturated = true;
      break;
    }
    ring_area += added;
    ++result.dilation_count;
  }
  result.context = BinaryMask(dilator.grown().bits() && !m.bits());
  result.valid = ring_area > 0;
  return result;
}

}  // namespace ctxsal
