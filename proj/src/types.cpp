#include "ctxsal/types.hpp"

namespace ctxsal {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MissingDirectory: return "MissingDirectory";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::EmptyContext: return "EmptyContext";
    case ErrorCode::DegenerateContext: return "DegenerateContext";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::ModelDimensionMismatch: return "ModelDimensionMismatch";
    case ErrorCode::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::int64_t mask_area(const BinaryMask& m) { return m.bits().count(); }

std::int64_t intersection_area(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch, "mask shapes differ");
  }
  return (a.bits() && b.bits()).count();
}

ImageBuffer::ImageBuffer(int width, int height, Storage data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.rows() != std::int64_t{width} * height) {
    throw Error(ErrorCode::DimensionMismatch, "image storage does not match width*height");
  }
  if (data_.size() > 0 && (data_.minCoeff() < 0.0f || data_.maxCoeff() > 1.0f)) {
    throw Error(ErrorCode::InvalidArgument, "image values must lie in [0,1]");
  }
}

FeatureFieldf rgb_features(const ImageBuffer& image) {
  // Interleaved (pixels x channels) transposed into planar (channels x pixels).
  FeatureFieldf::Planes planes = image.data().matrix().transpose();
  return FeatureFieldf(image.width(), image.height(), std::move(planes));
}

}  // namespace ctxsal
