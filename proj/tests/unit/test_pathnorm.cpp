#include <gtest/gtest.h>

#include <cmath>

#include "pathnorm.hpp"

using namespace pathprox;

namespace {

// Sum over every input -> hidden -> output path.
double triple_sum(const ShallowParams& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.hidden(); ++i) {
    for (std::size_t j = 0; j < p.inputs(); ++j) {
      for (std::size_t k = 0; k < p.outputs(); ++k) {
        s += std::fabs(p.W(i, j) * p.V(i, k));
      }
    }
  }
  return s;
}

// Column l1 norms of V summed, times the largest row l1 norm of W.
double product_oracle(const ShallowParams& p) {
  double cols = 0.0;
  for (std::size_t k = 0; k < p.outputs(); ++k) {
    for (std::size_t i = 0; i < p.hidden(); ++i) cols += std::fabs(p.V(i, k));
  }
  double best = 0.0;
  for (std::size_t i = 0; i < p.hidden(); ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < p.inputs(); ++j) r += std::fabs(p.W(i, j));
    best = std::max(best, r);
  }
  return cols * best;
}

ShallowParams make(std::vector<std::vector<double>> v,
                   std::vector<std::vector<double>> w) {
  return ShallowParams(DenseMatrix::from_rows(v), DenseMatrix::from_rows(w));
}

}  // namespace

TEST(PathNorm, AllOnesExample) {
  const auto p = make({{1}, {1}}, {{1, 1}, {1, 1}});
  EXPECT_EQ(triple_sum(p), 4.0);
  EXPECT_EQ(path_norm_1(p), 4.0);
  EXPECT_EQ(product_oracle(p), 4.0);
  EXPECT_EQ(product_bound(p), 4.0);
}

TEST(PathNorm, ZeroOutputLayer) {
  Rng rng(1);
  auto p = ShallowParams::random(4, 3, 2, rng);
  for (double& v : p.V.data()) v = 0.0;
  EXPECT_EQ(path_norm_1(p), 0.0);
  EXPECT_EQ(product_bound(p), 0.0);
}

TEST(PathNorm, UnequalRowsExample) {
  const auto p = make({{1}, {1}}, {{1, 0}, {1, 1}});
  EXPECT_EQ(triple_sum(p), 3.0);
  EXPECT_EQ(path_norm_1(p), 3.0);
  EXPECT_EQ(product_oracle(p), 4.0);
  EXPECT_EQ(product_bound(p), 4.0);
}

TEST(PathNorm, FactoredFormMatchesTripleSum) {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const auto p = ShallowParams::random(1 + rng.index(6), 1 + rng.index(6),
                                         1 + rng.index(4), rng);
    EXPECT_NEAR(path_norm_1(p), triple_sum(p), 1e-12 * triple_sum(p));
    EXPECT_NEAR(product_bound(p), product_oracle(p), 1e-12 * product_oracle(p));
  }
}

TEST(PathNorm, NeverExceedsProductBound) {
  Rng rng(3);
  for (int t = 0; t < 1000; ++t) {
    const auto p = ShallowParams::random(1 + rng.index(8), 1 + rng.index(8),
                                         1 + rng.index(5), rng);
    const double pb = product_bound(p);
    EXPECT_LE(path_norm_1(p), pb + 1e-12 * pb);
  }
}

TEST(PathNorm, InvariantUnderNeuronRescaling) {
  Rng rng(4);
  auto p = ShallowParams::random(5, 4, 3, rng);
  const double before = path_norm_1(p);
  for (std::size_t i = 0; i < p.hidden(); ++i) {
    const double c = 0.25 + 3.0 * rng.uniform();
    for (double& w : p.W.row(i)) w *= c;
    for (double& v : p.V.row(i)) v /= c;
  }
  EXPECT_NEAR(path_norm_1(p), before, 1e-12 * before);
}

TEST(Lipschitz, ZeroOutputLayerGivesZeroRatio) {
  Rng rng(5);
  auto p = ShallowParams::random(4, 3, 2, rng);
  for (double& v : p.V.data()) v = 0.0;
  EXPECT_EQ(empirical_lipschitz_ratio(p, ActivationKind::kElu, rng, 500), 0.0);
}

// In the positive regime ELU is the identity, so h(x) = x and every pair
// gives a ratio of exactly 1 when m = 1.
TEST(Lipschitz, ScalarIdentityNetOnAGrid) {
  const auto p = make({{1}}, {{1}});
  double worst = 0.0;
  for (int a = 0; a <= 40; ++a) {
    for (int b = 0; b <= 40; ++b) {
      if (a == b) continue;
      const double x = -1.0 + a / 20.0, u = -1.0 + b / 20.0;
      const double num = std::fabs(forward(p, ActivationKind::kElu, std::vector<double>{x})[0] -
                                   forward(p, ActivationKind::kElu, std::vector<double>{u})[0]);
      worst = std::max(worst, num / std::fabs(x - u));
    }
  }
  EXPECT_LE(worst, 1.0 + 1e-12);
  Rng rng(6);
  EXPECT_LE(empirical_lipschitz_ratio(p, ActivationKind::kElu, rng, 10000),
            1.0 + 1e-12);
}

TEST(Lipschitz, SampledRatioBelowPathNorm) {
  Rng rng(7);
  for (auto act : {ActivationKind::kElu, ActivationKind::kSoftplus}) {
    const auto p = ShallowParams::random(4, 3, 2, rng);
    const auto rep = lipschitz_report(p, act, rng, 10000);
    EXPECT_EQ(rep.samples, 10000u);
    EXPECT_GT(rep.empirical_ratio_max, 0.0);
    EXPECT_LE(rep.empirical_ratio_max, rep.path_norm * (1 + 1e-8));
    EXPECT_LE(rep.path_norm, rep.product_bound * (1 + 1e-12));
  }
}

// Single-output nets: |h(x) - h(u)| <= path_norm * ||x - u||_inf.
TEST(Lipschitz, SingleOutputConsistency) {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto p = ShallowParams::random(6, 4, 1, rng);
    const double bound = path_norm_1(p);
    for (int s = 0; s < 200; ++s) {
      std::vector<double> x(4), u(4);
      double dist = 0.0;
      for (std::size_t j = 0; j < 4; ++j) {
        x[j] = rng.uniform(-1, 1);
        u[j] = rng.uniform(-1, 1);
        dist = std::max(dist, std::fabs(x[j] - u[j]));
      }
      const double diff = std::fabs(forward(p, ActivationKind::kElu, x)[0] -
                                    forward(p, ActivationKind::kElu, u)[0]);
      EXPECT_LE(diff, bound * dist * (1 + 1e-8));
    }
  }
}
