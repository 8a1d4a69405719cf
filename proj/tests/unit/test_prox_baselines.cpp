#include <gtest/gtest.h>

#include <cmath>

#include "prox_baselines.hpp"

using namespace pathprox;

namespace {

// Scalar minimiser of 1/2 (u - z)^2 + tau |u| by dense grid search.
double grid_soft(double z, double tau) {
  double best = 0.0, best_h = INFINITY;
  for (int i = -40000; i <= 40000; ++i) {
    const double u = i * 1e-4;
    const double h = 0.5 * (u - z) * (u - z) + tau * std::fabs(u);
    if (h < best_h) {
      best_h = h;
      best = u;
    }
  }
  return best;
}

}  // namespace

TEST(SoftThreshold, Examples) {
  EXPECT_EQ(soft_threshold(std::vector<double>{3, -0.5, -2, 1}, 1.0),
            (std::vector<double>{2, 0, -1, 0}));
  EXPECT_EQ(soft_threshold(std::vector<double>{0.7, -0.2}, 0.0),
            (std::vector<double>{0.7, -0.2}));
  EXPECT_TRUE(soft_threshold(std::vector<double>{}, 1.0).empty());
}

TEST(SoftThreshold, MatchesGridMinimiser) {
  for (double z : {-3.1, -0.4, 0.0, 0.25, 1.7}) {
    for (double tau : {0.0, 0.3, 1.0}) {
      EXPECT_NEAR(soft_threshold(std::vector<double>{z}, tau)[0], grid_soft(z, tau), 1e-4);
    }
  }
}

TEST(SoftThreshold, NegativeThresholdIsRejected) {
  EXPECT_THROW(soft_threshold(std::vector<double>{1}, -0.1), Error);
}

TEST(ProjectL1Ball, Examples) {
  EXPECT_EQ(project_l1_ball(std::vector<double>{1, 1}, 1.0),
            (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(project_l1_ball(std::vector<double>{0.2, -0.3}, 1.0),
            (std::vector<double>{0.2, -0.3}));
  const auto r = project_l1_ball(std::vector<double>{3, -1, 0.5}, 2.0);
  EXPECT_NEAR(r[0], 2.0, 1e-15);
  EXPECT_EQ(r[1], 0.0);
  EXPECT_EQ(r[2], 0.0);
  EXPECT_THROW(project_l1_ball(std::vector<double>{1}, 0.0), Error);
}

TEST(ProjectL1Ball, FeasibleIdempotentNonexpansive) {
  Rng rng(41);
  for (int t = 0; t < 500; ++t) {
    const std::size_t len = 1 + rng.index(10);
    std::vector<double> a(len), b(len);
    for (std::size_t i = 0; i < len; ++i) {
      a[i] = 3 * rng.normal();
      b[i] = 3 * rng.normal();
    }
    const double r = 0.1 + 2 * rng.uniform();
    const auto pa = project_l1_ball(a, r);
    const auto pb = project_l1_ball(b, r);
    EXPECT_LE(l1_norm(pa), r * (1 + 1e-12));
    const auto ppa = project_l1_ball(pa, r);
    for (std::size_t i = 0; i < len; ++i) EXPECT_NEAR(ppa[i], pa[i], 1e-12);
    EXPECT_LE(squared_distance(pa, pb), squared_distance(a, b) * (1 + 1e-12) + 1e-15);
    // Projection optimality: <a - pa, u - pa> <= 0 for u in the ball.
    std::vector<double> u(len, 0.0);
    u[rng.index(len)] = (rng.uniform() < 0.5 ? -r : r);
    double ip = 0.0;
    for (std::size_t i = 0; i < len; ++i) ip += (a[i] - pa[i]) * (u[i] - pa[i]);
    EXPECT_LE(ip, 1e-10);
  }
}

TEST(LinfOpnorm, RowProjectionBoundsTheNorm) {
  const auto W = DenseMatrix::from_rows({{3, -1}, {0.2, 0.1}});
  EXPECT_EQ(linf_opnorm(W), 4.0);
  const auto P = project_linf_opnorm(W, ParsevalConstraint(1.0));
  EXPECT_LE(linf_opnorm(P), 1.0 + 1e-15);
  EXPECT_EQ(P(1, 0), 0.2);
  EXPECT_EQ(P(1, 1), 0.1);
  EXPECT_THROW(ParsevalConstraint(0.0), Error);
}
