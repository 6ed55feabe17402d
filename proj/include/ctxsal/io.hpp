#pragma once

#include "ctxsal/types.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ctxsal {

namespace fs = std::filesystem;

// Images: PNG (gray, gray+alpha, RGB, RGBA; 8 or 16 bit) and binary/ASCII PPM.
// Gray inputs are expanded to three identical channels, alpha is dropped.
ImageBuffer read_image(const fs::path& path);
void write_image_png(const fs::path& path, const ImageBuffer& image);

// Masks: 8-bit grayscale PNG. On read, any value >= 128 is foreground.
BinaryMask read_mask_png(const fs::path& path);
void write_mask_png(const fs::path& path, const BinaryMask& mask);

/// Reads only the PNG/PPM header.
std::pair<int, int> read_image_size(const fs::path& path);

/// 8-bit grayscale raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};
GrayImage read_gray_png(const fs::path& path);
void write_gray_png(const fs::path& path, const GrayImage& image);

// Feature tensor file: "CSFT", u32 version=1, u32 width, u32 height,
// u32 channels, then width*height*channels little-endian float32 in planar
// channel-major order.
inline constexpr std::uint32_t kTensorVersion = 1;

std::vector<std::uint8_t> encode_tensor(const FeatureFieldf& field);
FeatureFieldf decode_tensor(const std::vector<std::uint8_t>& bytes);
FeatureFieldf read_tensor(const fs::path& path);
void write_tensor(const fs::path& path, const FeatureFieldf& field);

std::vector<std::uint8_t> read_file_bytes(const fs::path& path);
void write_file_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace ctxsal
