#pragma once

#include "ctxsal/types.hpp"

#include <Eigen/Core>

namespace ctxsal {

/// Mean of the field over the set pixels of `m`, per channel.
template <typename Scalar>
Eigen::VectorXd pool_object_feature(const BinaryMask& m, const FeatureField<Scalar>& field);

/// Per-dimension standardization statistics, fitted on training rows only.
struct WhiteningStats {
  static constexpr double kStdFloor = 1e-8;

  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  Eigen::Index dim() const { return mean.size(); }
};

/// Population mean/std of each column of an N x D matrix (N >= 2), with std
/// floored at kStdFloor.
template <typename Derived>
WhiteningStats fit_whitening(const Eigen::MatrixBase<Derived>& rows) {
  if (rows.rows() < 2) throw Error(ErrorCode::InsufficientData, "whitening needs at least two rows");
  if (!rows.allFinite()) throw Error(ErrorCode::NonFiniteInput, "whitening input contains NaN or Inf");
  const auto x = rows.template cast<double>().eval();
  WhiteningStats stats;
  stats.mean = x.colwise().mean().transpose();
  const auto centered = (x.rowwise() - stats.mean.transpose()).eval();
  stats.std = (centered.array().square().colwise().sum() / static_cast<double>(x.rows())).sqrt().transpose();
  stats.std = stats.std.cwiseMax(WhiteningStats::kStdFloor);
  return stats;
}

/// (v - mean) / std, elementwise.
template <typename Derived>
Eigen::VectorXd apply_whitening(const WhiteningStats& stats, const Eigen::MatrixBase<Derived>& v) {
  if (v.size() != stats.dim()) throw Error(ErrorCode::DimensionMismatch, "vector and whitening dims differ");
  return ((v.template cast<double>().array() - stats.mean.array()) / stats.std.array()).matrix();
}

template <typename Derived>
Eigen::VectorXd unapply_whitening(const WhiteningStats& stats, const Eigen::MatrixBase<Derived>& w) {
  if (w.size() != stats.dim()) throw Error(ErrorCode::DimensionMismatch, "vector and whitening dims differ");
  return (w.template cast<double>().array() * stats.std.array() + stats.mean.array()).matrix();
}

/// Row-wise whitening of an N x D matrix.
template <typename Derived>
Eigen::MatrixXd apply_whitening_rows(const WhiteningStats& stats, const Eigen::MatrixBase<Derived>& rows) {
  if (rows.cols() != stats.dim()) throw Error(ErrorCode::DimensionMismatch, "matrix and whitening dims differ");
  return ((rows.template cast<double>().rowwise() - stats.mean.transpose()).array().rowwise() /
          stats.std.transpose().array())
      .matrix();
}

}  // namespace ctxsal
