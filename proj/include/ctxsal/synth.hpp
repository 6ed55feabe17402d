#pragma once

#include "ctxsal/types.hpp"

#include <cstdint>

namespace ctxsal {

struct SynthParams {
  int width = 128;
  int height = 96;
  int min_shapes = 1;
  int max_shapes = 3;
};

struct SynthImage {
  ImageBuffer image;
  BinaryMask ground_truth;
};

/// Image `index` of the dataset drawn with `seed`: one to three flat-coloured
/// rectangles or ellipses over a textured background. Ground truth is the
/// union of the shapes and is never empty.
SynthImage synthesize_image(std::uint64_t seed, std::uint64_t index, const SynthParams& params = {});

}  // namespace ctxsal
