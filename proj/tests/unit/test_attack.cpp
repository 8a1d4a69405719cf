#include <gtest/gtest.h>

#include <cmath>

#include "attack.hpp"

using namespace pathprox;

namespace {

// Two outputs, one input: logits (x, -x) through the identity regime of ELU.
ShallowParams linear_1d() {
  return ShallowParams(DenseMatrix::from_rows({{1.0, -1.0}}), DenseMatrix::from_rows({{1.0}}));
}

Dataset small_set() {
  auto d = generate_blobs(60, 5, 4);
  return d;
}

}  // namespace

TEST(Pgd, ZeroEpsilonReturnsTheInput) {
  Rng rng(71), r(1);
  const auto p = ShallowParams::random(4, 3, 2, rng);
  const std::vector<double> x{0.2, 0.5, 0.9};
  EXPECT_EQ(pgd_linf(p, ActivationKind::kElu, x, 1, AttackConfig::standard(0.0), r), x);
}

TEST(Pgd, ZeroNetworkLeavesLossAtLogTwo) {
  const auto p = ShallowParams::zeros(3, 2, 2);
  Rng r(2);
  const std::vector<double> x{0.4, 0.6};
  const auto adv = pgd_linf(p, ActivationKind::kElu, x, 0, AttackConfig::standard(0.1), r);
  EXPECT_NEAR(sample_cross_entropy(p, ActivationKind::kElu, adv, 0), std::log(2.0), 1e-15);
}

// With label 0 the loss decreases in x, so the attack walks to x - eps.
TEST(Pgd, LinearCornerExample) {
  Rng r(3);
  AttackConfig cfg = AttackConfig::standard(0.1);
  cfg.random_init = false;
  const auto adv = pgd_linf(linear_1d(), ActivationKind::kElu, std::vector<double>{0.5}, 0, cfg, r);
  EXPECT_NEAR(adv[0], 0.4, 1e-12);
}

TEST(Pgd, StaysInTheBoxAndNeverLowersTheLoss) {
  Rng rng(72);
  for (int t = 0; t < 30; ++t) {
    const auto p = ShallowParams::random(6, 4, 3, rng);
    std::vector<double> x(4);
    for (double& v : x) v = rng.uniform();
    const int label = static_cast<int>(rng.index(3));
    AttackConfig cfg = AttackConfig::standard(0.2, t);
    cfg.random_init = t % 2 == 0;
    Rng r(t);
    const auto adv = pgd_linf(p, ActivationKind::kElu, x, label, cfg, r);
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_LE(std::fabs(adv[j] - x[j]), 0.2 + 1e-12);
      EXPECT_GE(adv[j], 0.0);
      EXPECT_LE(adv[j], 1.0);
    }
    if (!cfg.random_init) {
      EXPECT_GE(sample_cross_entropy(p, ActivationKind::kElu, adv, label),
                sample_cross_entropy(p, ActivationKind::kElu, x, label));
    }
  }
}

TEST(Attack, ConfigValidation) {
  AttackConfig cfg = AttackConfig::standard(-0.1);
  EXPECT_THROW(cfg.validate(), Error);
  cfg = AttackConfig::standard(0.1);
  cfg.iters = 0;
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_DOUBLE_EQ(AttackConfig::standard(0.2).step, 0.01);
}

TEST(RobustError, ZeroEpsilonEqualsCleanError) {
  Rng rng(73);
  const auto p = ShallowParams::random(5, 5, 2, rng);
  const auto d = small_set();
  EXPECT_EQ(robust_error(p, ActivationKind::kElu, d, AttackConfig::standard(0.0)),
            clean_error(p, ActivationKind::kElu, d));
}

TEST(RobustError, DeterministicAndAtLeastClean) {
  Rng rng(74);
  const auto p = ShallowParams::random(5, 5, 2, rng);
  const auto d = small_set();
  const auto cfg = AttackConfig::standard(0.1, 9);
  const double a = robust_error(p, ActivationKind::kElu, d, cfg);
  EXPECT_EQ(a, robust_error(p, ActivationKind::kElu, d, cfg));
  EXPECT_GE(a, clean_error(p, ActivationKind::kElu, d));
}

TEST(RobustError, CurveIsMonotone) {
  Rng rng(75);
  const auto p = ShallowParams::random(6, 5, 2, rng);
  const auto d = small_set();
  const std::vector<double> eps{0.3, 0.0, 0.05, 0.1, 0.2};
  const auto curve = robust_error_curve(p, ActivationKind::kElu, d, eps, AttackConfig::standard(0.1, 1));
  ASSERT_EQ(curve.size(), eps.size());
  EXPECT_EQ(curve[1], clean_error(p, ActivationKind::kElu, d));
  EXPECT_LE(curve[1], curve[2]);
  EXPECT_LE(curve[2], curve[3]);
  EXPECT_LE(curve[3], curve[4]);
  EXPECT_LE(curve[4], curve[0]);
}

// A linear classifier with margin larger than eps * ||w||_1 cannot be broken.
TEST(RobustError, MarginExample) {
  Dataset d;
  d.features = DenseMatrix::from_rows({{0.9}, {0.1}});
  d.labels = {0, 1};
  const auto p = linear_1d();  // logit gap 2x: class 0 iff x > 0
  EXPECT_EQ(clean_error(p, ActivationKind::kIdentity, d), 0.5);
  Dataset pos;
  pos.features = DenseMatrix::from_rows({{0.9}, {0.8}});
  pos.labels = {0, 0};
  EXPECT_EQ(robust_error(p, ActivationKind::kIdentity, pos, AttackConfig::standard(0.5)), 0.0);
}
