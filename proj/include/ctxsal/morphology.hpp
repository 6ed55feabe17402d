#pragma once

#include "ctxsal/types.hpp"

namespace ctxsal {

/// One dilation with the 3x3 all-ones element, clipped to the raster.
BinaryMask dilate_n8(const BinaryMask& m);

/// Context ring C = dilate^n(M) \ M for the smallest n with |C| >= |M|.
///
/// When repeated dilation stops growing (the ring has reached every pixel it
/// can) before the area condition holds, the saturated ring is returned with
/// `saturated = true`; it is still usable when non-empty. `dilation_count` is
/// the number of dilations that actually grew the mask, so a full-image
/// object yields n = 0 and an empty, invalid context.
struct ContextResult {
  BinaryMask context;
  int dilation_count = 0;
  bool valid = false;
  bool saturated = false;
};

/// Throws EmptyMask when `m` has no set pixel.
ContextResult generate_context(const BinaryMask& m);

/// Ring obtained from exactly `n` dilations (no area condition).
BinaryMask context_ring(const BinaryMask& m, int n);

}  // namespace ctxsal
