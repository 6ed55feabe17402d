#include "ctxsal/object_features.hpp"

namespace ctxsal {

template <typename Scalar>
Eigen::VectorXd pool_object_feature(const BinaryMask& m, const FeatureField<Scalar>& field) {
  if (!field.same_extent(m.width(), m.height())) {
    throw Error(ErrorCode::DimensionMismatch, "feature field does not match mask size");
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(field.channels());
  std::int64_t count = 0;
  const bool* bits = m.data();
  for (std::int64_t i = 0; i < m.pixel_count(); ++i) {
    if (!bits[i]) continue;
    sum += field.planes().col(i).template cast<double>();
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::EmptyMask, "pooling over an empty proposal");
  return sum / static_cast<double>(count);
}

template Eigen::VectorXd pool_object_feature(const BinaryMask&, const FeatureField<float>&);
template Eigen::VectorXd pool_object_feature(const BinaryMask&, const FeatureField<double>&);

}  // namespace ctxsal
