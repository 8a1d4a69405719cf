#include <gtest/gtest.h>

#include <cmath>

#include "prox_single.hpp"
#include "verify.hpp"

using namespace pathprox;

namespace {

struct GridMin {
  double v, w, h;
};

// Brute-force minimum of 1/2 (v-a)^2 + 1/2 (w-b)^2 + lam v w over a grid of
// the nonnegative quadrant, for scalar x = a, y = [b].
GridMin grid_minimum(double a, double b, double lam) {
  GridMin best{0, 0, INFINITY};
  const int n = 3000;
  const double top = 1.5 * std::max(a, b);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double v = top * i / n, w = top * j / n;
      const double h = 0.5 * (v - a) * (v - a) + 0.5 * (w - b) * (w - b) + lam * v * w;
      if (h < best.h) best = {v, w, h};
    }
  }
  return best;
}

double h_of(const ProxSingleResult& r, double x, const std::vector<double>& y,
            double lam) {
  std::vector<double> aw(r.w.size()), ay(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    aw[j] = std::fabs(r.w[j]);
    ay[j] = std::fabs(y[j]);
  }
  return h_single(std::fabs(r.v), aw, std::fabs(x), ay, lam);
}

}  // namespace

TEST(ProxSingleOracleValues, GridConfirmsTheWorkedExample) {
  const auto g = grid_minimum(1.0, 1.0, 0.5);
  EXPECT_NEAR(g.v, 2.0 / 3.0, 1e-3);
  EXPECT_NEAR(g.w, 2.0 / 3.0, 1e-3);
  EXPECT_NEAR(g.h, 1.0 / 3.0, 1e-6);
}

TEST(ProxSingleOracleValues, GridConfirmsTheTie) {
  // lam = 2: the corners (0, 1) and (1, 0) both reach 1/2.
  const auto g = grid_minimum(1.0, 1.0, 2.0);
  EXPECT_NEAR(g.h, 0.5, 1e-12);
}

TEST(Candidate, EmptySupport) {
  const auto o = magnitude_order(std::vector<double>{1.0});
  const auto c = candidate(0, o, 1.0, 0.5);
  EXPECT_EQ(c.v, 1.0);
  EXPECT_EQ(c.w, (std::vector<double>{0.0}));
  EXPECT_DOUBLE_EQ(c.h, 0.5);
}

TEST(Candidate, FullSupport) {
  const auto o = magnitude_order(std::vector<double>{1.0});
  const auto c = candidate(1, o, 1.0, 0.5);
  EXPECT_NEAR(c.v, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.w[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.h, 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(is_feasible(c));
}

TEST(Candidate, ZeroX) {
  const std::vector<double> y{3.0, -4.0};
  const auto c = candidate(0, magnitude_order(y), 0.0, 0.7);
  EXPECT_EQ(c.v, 0.0);
  EXPECT_EQ(c.w, (std::vector<double>{0.0, 0.0}));
  EXPECT_DOUBLE_EQ(c.h, 12.5);
  EXPECT_FALSE(is_feasible(c));
}

TEST(Candidate, SingularSparsityIsRejected) {
  const auto o = magnitude_order(std::vector<double>{1, 1, 1, 1, 1});
  try {
    candidate(4, o, 1.0, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSingularCandidate);
  }
  EXPECT_THROW(candidate(6, o, 1.0, 0.1), Error);
}

TEST(HSingle, PlugInValues) {
  const std::vector<double> y{1.0, 2.0};
  EXPECT_DOUBLE_EQ(h_single(0.0, y, 3.0, y, 0.4), 4.5);
  EXPECT_DOUBLE_EQ(h_single(3.0, std::vector<double>{0, 0}, 3.0, y, 0.4), 2.5);
  EXPECT_NEAR(h_single(2.0 / 3.0, std::vector<double>{2.0 / 3.0}, 1.0,
                       std::vector<double>{1.0}, 0.5),
              1.0 / 3.0, 1e-15);
}

TEST(SparsityCap, ExcludesSingularValues) {
  EXPECT_EQ(sparsity_cap(0.5, 10), 3u);
  EXPECT_EQ(sparsity_cap(0.3, 20), 11u);
  EXPECT_EQ(sparsity_cap(0.3, 5), 5u);
  EXPECT_EQ(sparsity_cap(1.0, 5), 0u);
  EXPECT_EQ(sparsity_cap(2.0, 5), 0u);
}

TEST(ProxSingle, WorkedExample) {
  const auto r = prox_single(1.0, std::vector<double>{1.0}, 0.5);
  EXPECT_NEAR(r.v, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.w[0], 2.0 / 3.0, 1e-15);
}

TEST(ProxSingle, NegativeInputs) {
  const auto r = prox_single(-1.0, std::vector<double>{-1.0}, 0.5);
  EXPECT_NEAR(r.v, -2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.w[0], -2.0 / 3.0, 1e-15);
}

TEST(ProxSingle, TieGoesToSparserW) {
  const auto r = prox_single(1.0, std::vector<double>{1.0}, 2.0);
  EXPECT_EQ(r.v, 1.0);
  EXPECT_EQ(r.w, (std::vector<double>{0.0}));
  const auto o = prox_single_oracle(1.0, std::vector<double>{1.0}, 2.0);
  EXPECT_NEAR(o.h, 0.5, 1e-12);
}

TEST(ProxSingle, ZeroLambdaIsIdentity) {
  const std::vector<double> y{0.3, -2.0, 0.0};
  const auto r = prox_single(-1.25, y, 0.0);
  EXPECT_EQ(r.v, -1.25);
  EXPECT_EQ(r.w, y);
}

TEST(ProxSingle, NegativeLambdaIsAParameterError) {
  try {
    prox_single(1.0, std::vector<double>{1.0}, -0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParameter);
  }
}

TEST(ProxSingle, NonFiniteInputIsRejected) {
  EXPECT_THROW(prox_single(NAN, std::vector<double>{1.0}, 0.5), Error);
  EXPECT_THROW(prox_single(1.0, std::vector<double>{INFINITY}, 0.5), Error);
}

TEST(ProxSingle, EmptyY) {
  const auto r = prox_single(-2.0, std::vector<double>{}, 0.5);
  EXPECT_EQ(r.v, -2.0);
  EXPECT_TRUE(r.w.empty());
}

TEST(ProxSingle, ZeroXKeepsY) {
  const std::vector<double> y{0.5, -1.5};
  const auto r = prox_single(0.0, y, 0.3);
  EXPECT_EQ(r.v, 0.0);
  EXPECT_EQ(r.w, y);
}

TEST(ProxSingle, MatchesOracleOnExamples) {
  for (auto [x, y, lam] : std::vector<std::tuple<double, std::vector<double>, double>>{
           {1.0, {1.0}, 0.5}, {-1.0, {-1.0}, 0.5}, {1.0, {1.0}, 2.0}}) {
    const auto fast = prox_single(x, y, lam);
    const auto o = prox_single_oracle(x, y, lam);
    EXPECT_NEAR(h_of(fast, x, y, lam), o.h, 1e-12);
    EXPECT_LE(o.refine_gain, 1e-9);
  }
}

TEST(ProxSingle, OracleGuardsItsSize) {
  const std::vector<double> y(kOracleSingleMaxM + 1, 1.0);
  try {
    prox_single_oracle(1.0, y, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kGuard);
  }
}

// The search cap floor(lam^-2) drops s = lam^-2 when it is an integer. The
// oracle, which tries every s, must never find anything better there.
TEST(ProxSingle, CapLosesNothingAtIntegerInverseSquares) {
  Rng rng(21);
  for (double lam : {0.5, 1.0 / 3.0, 0.25, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(5.0)}) {
    for (int t = 0; t < 2000; ++t) {
      const double x = rng.normal() * 3.0;
      const auto y = random_prox_vector(rng, 1 + rng.index(12));
      const auto fast = prox_single(x, y, lam);
      const auto o = prox_single_oracle(x, y, lam);
      ASSERT_NEAR(h_of(fast, x, y, lam), o.h, 1e-9)
          << "lam=" << lam << " x=" << x;
    }
  }
}

// Heavily tied magnitudes: the support must be the same entries the oracle
// picks, not just reach the same h.
TEST(ProxSingle, TiedMagnitudesMatchOracleEntrywise) {
  Rng rng(24);
  const double levels[] = {0.0, 0.5, 1.0, 2.0};
  std::size_t compared = 0;
  for (int t = 0; t < 4000; ++t) {
    const double lam = std::vector<double>{0.05, 0.1, 0.3, 0.5}[t % 4];
    const double x = 4.0 * rng.normal();
    std::vector<double> y(1 + rng.index(10));
    for (double& v : y) v = levels[rng.index(4)] * (rng.uniform() < 0.5 ? -1 : 1);
    const auto o = prox_single_oracle(x, y, lam);
    if (std::fabs(o.h - 0.5 * x * x) < 1e-9) continue;  // tie rules differ
    const auto r = prox_single(x, y, lam);
    ++compared;
    ASSERT_NEAR(r.v, o.v, 1e-9);
    for (std::size_t j = 0; j < y.size(); ++j) ASSERT_NEAR(r.w[j], o.w[j], 1e-9) << j;
  }
  EXPECT_GT(compared, 1000u);
}

TEST(ProxSingle, CoefficientEntersOnlyThroughProduct) {
  Rng rng(22);
  for (int t = 0; t < 100; ++t) {
    const double x = rng.normal();
    const auto y = random_prox_vector(rng, 5);
    const double eta = 0.1 + rng.uniform(), lam = 0.1 + rng.uniform();
    const auto a = prox_single(x, y, eta * lam);
    const auto o = prox_single_oracle(x, y, eta * lam);
    EXPECT_NEAR(h_of(a, x, y, eta * lam), o.h, 1e-9);
  }
}

TEST(ProxBlockSingle, SingleRowReducesToProxSingle) {
  const std::vector<double> v{0.8};
  const DenseMatrix W = DenseMatrix::from_rows({{1.0, -0.2, 0.5}});
  const auto [vo, Wo] = prox_block_single(v, W, 0.4);
  const auto r = prox_single(0.8, W.row(0), 0.4);
  EXPECT_EQ(vo[0], r.v);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(Wo(0, j), r.w[j]);
}

TEST(ProxBlockSingle, ZeroLambdaIsIdentity) {
  const std::vector<double> v{0.8, -1};
  const DenseMatrix W = DenseMatrix::from_rows({{1.0, -0.2}, {3, 4}});
  const auto [vo, Wo] = prox_block_single(v, W, 0.0);
  EXPECT_EQ(vo, v);
  EXPECT_EQ(Wo, W);
}

TEST(ProxBlockSingle, EachRowMatchesItsOracle) {
  Rng rng(23);
  std::vector<double> v(3);
  DenseMatrix W(3, 4);
  for (double& t : v) t = rng.normal();
  for (double& t : W.data()) t = rng.normal();
  const auto [vo, Wo] = prox_block_single(v, W, 0.3);
  for (std::size_t i = 0; i < 3; ++i) {
    const std::vector<double> row(W.row(i).begin(), W.row(i).end());
    const auto o = prox_single_oracle(v[i], row, 0.3);
    const ProxSingleResult got{vo[i], std::vector<double>(Wo.row(i).begin(), Wo.row(i).end())};
    EXPECT_NEAR(h_of(got, v[i], row, 0.3), o.h, 1e-9);
  }
}

TEST(ProxBlockSingle, ShapeMismatch) {
  EXPECT_THROW(prox_block_single(std::vector<double>{1, 2}, DenseMatrix(3, 2), 0.1),
               Error);
}
