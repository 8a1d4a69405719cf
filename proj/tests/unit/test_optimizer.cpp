#include <gtest/gtest.h>

#include <cmath>

#include "optimizer.hpp"
#include "pathnorm.hpp"
#include "prox_baselines.hpp"

using namespace pathprox;

namespace {

constexpr RegKind kAllRegs[] = {RegKind::kNone, RegKind::kL1, RegKind::kPathNorm,
                                RegKind::kParseval};

ShallowParams scaled(const ShallowParams& p, double c) {
  ShallowParams out = p;
  for (double& v : out.V.data()) v *= c;
  for (double& v : out.W.data()) v *= c;
  return out;
}

Dataset tiny_data() { return generate_blobs(120, 4, 3); }

TrainConfig tiny_config(RegKind reg, double lambda) {
  TrainConfig cfg;
  cfg.reg = reg;
  cfg.lambda = lambda;
  cfg.epochs = 3;
  cfg.batch = 20;
  cfg.hidden = 8;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST(ProxGradStep, QuadraticFromZeroWithoutRegulariser) {
  Rng rng(61);
  const auto anchor = ShallowParams::random(3, 2, 2, rng);
  const QuadraticObjective f(anchor);
  DenseMatrix gV, gW;
  const auto z0 = ShallowParams::zeros(3, 2, 2);
  f.value_and_grad(z0, gV, gW);
  const auto z1 = prox_grad_step(z0, gV, gW, RegKind::kNone, 0.0, 0.5);
  EXPECT_EQ(z1, scaled(anchor, 0.5));
}

TEST(ProxGradStep, L1IsSoftThresholdOfTheGradientStep) {
  const ShallowParams z(DenseMatrix::from_rows({{1.0}}), DenseMatrix::from_rows({{-0.3, 2.0}}));
  const auto out = prox_grad_step(z, DenseMatrix(1, 1), DenseMatrix(1, 2), RegKind::kL1, 1.0, 0.5);
  EXPECT_EQ(out.V(0, 0), 0.5);
  EXPECT_EQ(out.W(0, 0), 0.0);
  EXPECT_EQ(out.W(0, 1), 1.5);
}

TEST(ProxGradStep, PathNormUsesTheScaledProx) {
  const ShallowParams z(DenseMatrix::from_rows({{1.0}}), DenseMatrix::from_rows({{1.0}}));
  const auto out = prox_grad_step(z, DenseMatrix(1, 1), DenseMatrix(1, 1), RegKind::kPathNorm, 1.0, 0.5);
  EXPECT_NEAR(out.V(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(out.W(0, 0), 2.0 / 3.0, 1e-15);
}

TEST(ProxGradStep, ShapeMismatchIsRejected) {
  const auto z = ShallowParams::zeros(2, 2, 1);
  EXPECT_THROW(prox_grad_step(z, DenseMatrix(2, 2), DenseMatrix(2, 2), RegKind::kNone, 0, 0.1),
               Error);
}

TEST(Parseval, ProjectsRowsOfWAndColumnsOfV) {
  Rng rng(62);
  auto z = scaled(ShallowParams::random(5, 4, 3, rng), 10.0);
  const auto out = apply_regularizer(z, RegKind::kParseval, 2.0, 0.1);
  EXPECT_LE(linf_opnorm(out.W), 0.5 + 1e-12);
  EXPECT_LE(linf_opnorm(out.V.transposed()), 0.5 + 1e-12);
  EXPECT_EQ(reg_value(out, RegKind::kParseval), 0.0);
}

TEST(Subgradient, SignOfZeroIsZero) {
  const ShallowParams z(DenseMatrix::from_rows({{0.0, 2.0}}), DenseMatrix::from_rows({{-1.0}}));
  const auto out = subgradient_step(z, DenseMatrix(1, 2), DenseMatrix(1, 1), RegKind::kL1, 1.0, 0.1);
  EXPECT_EQ(out.V(0, 0), 0.0);
  EXPECT_NEAR(out.V(0, 1), 1.9, 1e-15);
  EXPECT_NEAR(out.W(0, 0), -0.9, 1e-15);
  // Path-norm subgradient: d/dv = sign(v) * ||w||_1, d/dw = sign(w) * ||v||_1.
  const auto pn = subgradient_step(z, DenseMatrix(1, 2), DenseMatrix(1, 1), RegKind::kPathNorm, 1.0, 0.1);
  EXPECT_EQ(pn.V(0, 0), 0.0);
  EXPECT_NEAR(pn.V(0, 1), 1.9, 1e-15);
  EXPECT_NEAR(pn.W(0, 0), -0.8, 1e-15);
}

TEST(ProxGrad, QuadraticDescentAndChecks) {
  Rng rng(63);
  for (RegKind reg : kAllRegs) {
    for (double eta : {0.1, 0.5, 0.9}) {
      const auto anchor = scaled(ShallowParams::random(4, 3, 2, rng), 3.0);
      const QuadraticObjective f(anchor);
      const auto run = run_prox_grad(f, ShallowParams::random(4, 3, 2, rng), reg, 0.3, eta, 200);
      ASSERT_EQ(run.records.size(), 201u);
      for (std::size_t k = 1; k < run.records.size(); ++k) {
        EXPECT_LE(run.records[k].F, run.records[k - 1].F + 1e-12);
      }
      EXPECT_TRUE(sufficient_decrease_check(run.records, eta, 1.0));
      EXPECT_TRUE(displacement_bound_check(run.records, eta, 1.0, 0.0));
    }
  }
}

TEST(ProxGrad, PreconditionsAreEnforced) {
  const std::vector<IterateRecord> recs(3);
  try {
    sufficient_decrease_check(recs, 1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kPrecondition);
  }
  EXPECT_THROW(displacement_bound_check(recs, 2.0, 1.0, 0.0), Error);
  const QuadraticObjective f(ShallowParams::zeros(1, 1, 1));
  EXPECT_THROW(run_prox_grad(f, ShallowParams::zeros(1, 1, 1), RegKind::kNone, 0, 0.5, 0), Error);
}

TEST(ProxGrad, ChecksDetectABrokenSequence) {
  std::vector<IterateRecord> recs{{0, 1.0, 1.0, 0, 0}, {1, 2.0, 2.0, 0, 0.5}};
  EXPECT_FALSE(sufficient_decrease_check(recs, 0.5, 1.0));
}

TEST(Train, ValidationRejectsBadConfigs) {
  auto cfg = tiny_config(RegKind::kParseval, 0.0);
  EXPECT_THROW(cfg.validate(), Error);
  cfg = tiny_config(RegKind::kL1, -1.0);
  EXPECT_THROW(cfg.validate(), Error);
  cfg = tiny_config(RegKind::kNone, 0.0);
  cfg.batch = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Train, DeterministicUnderFixedSeed) {
  const auto [train, test] = split_dataset(tiny_data(), 0.25, 1);
  const auto cfg = tiny_config(RegKind::kPathNorm, 1e-2);
  const auto a = run_stochastic(train, &test, cfg);
  const auto b = run_stochastic(train, &test, cfg);
  EXPECT_EQ(a.params, b.params);
  ASSERT_EQ(a.epochs.size(), 3u);
  for (std::size_t e = 0; e < 3; ++e) {
    EXPECT_EQ(a.epochs[e].objective, b.epochs[e].objective);
    EXPECT_EQ(a.epochs[e].clean_error, b.epochs[e].clean_error);
  }
}

TEST(Train, ZeroLambdaPathNormEqualsNoRegulariser) {
  const auto data = tiny_data();
  const auto a = run_stochastic(data, nullptr, tiny_config(RegKind::kNone, 0.0));
  const auto b = run_stochastic(data, nullptr, tiny_config(RegKind::kPathNorm, 0.0));
  EXPECT_EQ(a.params, b.params);
}

// A hidden unit whose output weights hit zero keeps its input weights: the
// trivial point (0, y) leaves y untouched.
TEST(Train, LargeLambdaZeroesTheOutputLayer) {
  const auto data = tiny_data();
  const auto r = run_stochastic(data, nullptr, tiny_config(RegKind::kPathNorm, 5.0));
  for (double v : r.params.V.data()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.epochs.back().reg_value, 0.0);
  EXPECT_LT(r.epochs.back().nnz_fraction, 1.0);
}

TEST(Train, CallbackSeesEveryEpochAndRobustErrorWhenAsked) {
  const auto [train, test] = split_dataset(tiny_data(), 0.25, 2);
  auto cfg = tiny_config(RegKind::kL1, 1e-3);
  cfg.attack = AttackConfig::standard(0.05, 3);
  std::size_t calls = 0;
  const auto r = run_stochastic(train, &test, cfg, std::nullopt, [&](const EpochMetrics& m) {
    ++calls;
    EXPECT_EQ(m.epoch, calls);
    ASSERT_TRUE(m.robust_error.has_value());
    EXPECT_GE(*m.robust_error, m.clean_error);
  });
  EXPECT_EQ(calls, 3u);
  EXPECT_EQ(r.epochs.size(), 3u);
}

TEST(Train, InitShapeMustMatch) {
  const auto data = tiny_data();
  EXPECT_THROW(run_stochastic(data, nullptr, tiny_config(RegKind::kNone, 0.0),
                              ShallowParams::zeros(8, 3, 2)),
               Error);
}
