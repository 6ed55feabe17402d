#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ctxsal/object_features.hpp"
#include "test_support.hpp"

using namespace ctxsal;
using namespace testing_support;

TEST_CASE("pooling is the per-channel mean over the mask") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const auto m = random_blob_mask(rng, 20, 15);
    const auto f = random_field<float>(rng, 20, 15, 4, -2.0, 2.0);
    const auto v = pool_object_feature(m, f);
    REQUIRE(v.size() == 4);
    for (int c = 0; c < 4; ++c) {
      double acc = 0;
      for (int y = 0; y < 15; ++y)
        for (int x = 0; x < 20; ++x)
          if (m(x, y)) acc += f(c, x, y);
      CHECK(v(c) == doctest::Approx(acc / static_cast<double>(count_set(m))).epsilon(1e-12));
    }
  }
}

TEST_CASE("pooling a constant field returns the constant") {
  FeatureFieldd f(8, 8, 2);
  f.planes().row(0).setConstant(0.3);
  f.planes().row(1).setConstant(-7.0);
  const auto v = pool_object_feature(rect_mask(8, 8, 2, 2, 3, 3), f);
  CHECK(v(0) == doctest::Approx(0.3));
  CHECK(v(1) == doctest::Approx(-7.0));
}

TEST_CASE("pooling rejects empty masks and mismatched fields") {
  FeatureFieldd f(8, 8, 2);
  CHECK_THROWS_AS(pool_object_feature(BinaryMask(8, 8), f), Error);
  CHECK_THROWS_AS(pool_object_feature(rect_mask(7, 8, 0, 0, 2, 2), f), Error);
}

TEST_CASE("whitening standardizes training columns") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(3.0, 5.0);
  Eigen::MatrixXd x(200, 3);
  for (int i = 0; i < 200; ++i) x.row(i) << n(rng), 2 * n(rng) - 4, 1.5;
  const auto stats = fit_whitening(x);
  const auto w = apply_whitening_rows(stats, x);
  for (int c = 0; c < 2; ++c) {
    CHECK(std::abs(w.col(c).mean()) < 1e-12);
    CHECK(std::sqrt(w.col(c).array().square().mean()) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Constant column: std floored, whitened to 0.
  CHECK(stats.std(2) == WhiteningStats::kStdFloor);
  CHECK(w.col(2).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd v = x.row(i).transpose();
    CHECK((unapply_whitening(stats, apply_whitening(stats, v)) - v).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((apply_whitening(stats, v) - w.row(i).transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("whitening input checks") {
  CHECK_THROWS_AS(fit_whitening(Eigen::MatrixXd::Ones(1, 3)), Error);
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(4, 2);
  x(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(fit_whitening(x), Error);
  const Eigen::MatrixXd r = Eigen::MatrixXd::Random(5, 2);
  const auto stats = fit_whitening(r);
  CHECK_THROWS_AS(apply_whitening(stats, Eigen::VectorXd::Zero(3)), Error);
}
