#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace ctxsal {

enum class ErrorCode {
  MissingFile,
  MissingDirectory,
  DimensionMismatch,
  EmptyMask,
  EmptyContext,
  DegenerateContext,
  InsufficientData,
  NonFiniteInput,
  CorruptModel,
  ModelDimensionMismatch,
  EmptyGroundTruth,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raster coordinate: origin top-left, x to the right, y downward.
struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

using MaskArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Binary pixel set over a width x height raster. Stored as a row-major
/// boolean array indexed (y, x); houses object proposals, context rings and
/// ground truth alike.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height) : bits_(MaskArray::Constant(height, width, false)) {}
  explicit BinaryMask(MaskArray bits) : bits_(std::move(bits)) {}

  int width() const { return static_cast<int>(bits_.cols()); }
  int height() const { return static_cast<int>(bits_.rows()); }
  std::int64_t pixel_count() const { return bits_.size(); }

  bool operator()(int x, int y) const { return bits_(y, x); }
  bool& operator()(int x, int y) { return bits_(y, x); }
  bool operator()(Pixel p) const { return bits_(p.y, p.x); }

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width() && y < height(); }
  bool same_shape(const BinaryMask& other) const {
    return width() == other.width() && height() == other.height();
  }

  const MaskArray& bits() const { return bits_; }
  MaskArray& bits() { return bits_; }
  const bool* data() const { return bits_.data(); }
  bool* data() { return bits_.data(); }

  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.same_shape(b) && (a.bits_ == b.bits_).all();
  }

 private:
  MaskArray bits_;
};

/// Number of set pixels.
std::int64_t mask_area(const BinaryMask& m);

/// |a ∩ b|; masks must share a shape.
std::int64_t intersection_area(const BinaryMask& a, const BinaryMask& b);

/// Interleaved row-major image with values in [0,1]. Rows of the storage are
/// pixels (y * width + x), columns are channels.
class ImageBuffer {
 public:
  using Storage = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels)
      : width_(width), height_(height), data_(Storage::Zero(std::int64_t{width} * height, channels)) {}
  ImageBuffer(int width, int height, Storage data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return static_cast<int>(data_.cols()); }
  bool empty() const { return data_.size() == 0; }

  float operator()(int x, int y, int c) const { return data_(std::int64_t{y} * width_ + x, c); }
  float& operator()(int x, int y, int c) { return data_(std::int64_t{y} * width_ + x, c); }

  const Storage& data() const { return data_; }
  Storage& data() { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  Storage data_;
};

/// Per-pixel feature map in planar channel-major layout: storage rows are
/// channels, columns are pixels in row-major order, so each channel plane is
/// contiguous.
template <typename Scalar_>
class FeatureField {
 public:
  using Scalar = Scalar_;
  using Planes = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  FeatureField() = default;
  FeatureField(int width, int height, int channels)
      : width_(width), height_(height), planes_(Planes::Zero(channels, std::int64_t{width} * height)) {}
  FeatureField(int width, int height, Planes planes)
      : width_(width), height_(height), planes_(std::move(planes)) {
    if (planes_.cols() != std::int64_t{width} * height) {
      throw Error(ErrorCode::DimensionMismatch, "feature planes do not match width*height");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return static_cast<int>(planes_.rows()); }
  std::int64_t index(int x, int y) const { return std::int64_t{y} * width_ + x; }

  Scalar operator()(int channel, int x, int y) const { return planes_(channel, index(x, y)); }
  Scalar& operator()(int channel, int x, int y) { return planes_(channel, index(x, y)); }

  auto pixel(int x, int y) const { return planes_.col(index(x, y)); }

  const Planes& planes() const { return planes_; }
  Planes& planes() { return planes_; }

  bool all_finite() const { return planes_.allFinite(); }
  bool same_extent(int width, int height) const { return width_ == width && height_ == height; }

  template <typename Other>
  FeatureField<Other> cast() const {
    return FeatureField<Other>(width_, height_, planes_.template cast<Other>());
  }

 private:
  int width_ = 0;
  int height_ = 0;
  Planes planes_;
};

using FeatureFieldf = FeatureField<float>;
using FeatureFieldd = FeatureField<double>;

/// Raw channel values of the image as a feature field, no colour transform.
FeatureFieldf rgb_features(const ImageBuffer& image);

}  // namespace ctxsal
