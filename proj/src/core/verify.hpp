#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "numerics.hpp"

namespace pathprox {

struct ProxCheckConfig {
  std::size_t trials = 10000;
  std::size_t max_m = 8;  // single-output m is drawn from 1..max_m
  std::size_t max_p = 6;  // multi-output p is drawn from 1..max_p
  std::uint64_t seed = 1;
  std::vector<double> lambdas{0.05, 0.3, 0.9, 1.0, 2.0};
  // Runs prox_single / prox_multi with the inverted selection rule.
  bool inject_fault = false;

  void validate() const;
};

struct SuiteResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  double worst = 0.0;       // largest observed error measure
  std::string first_issue;  // description of the first violation

  bool passed() const noexcept { return violations == 0; }
};

struct ProxCheckReport {
  std::vector<SuiteResult> suites;

  bool passed() const noexcept;
  std::size_t total_violations() const noexcept;
};

// Each suite draws its own instances from Rng(cfg.seed + salt), so suites are
// independent of which others run.

/// |h(prox_single) - h(oracle)| <= 1e-9 and oracle refinement gain <= 1e-9.
SuiteResult check_single_oracle(const ProxCheckConfig& cfg);
/// Same for prox_multi with p, m capped at the oracle limit.
SuiteResult check_multi_oracle(const ProxCheckConfig& cfg);
/// prox_multi with p = 1 agrees entrywise with prox_single to 1e-10.
SuiteResult check_p1_reduction(const ProxCheckConfig& cfg);
/// max{0, .} fixed-point residuals of the returned points.
SuiteResult check_stationarity(const ProxCheckConfig& cfg);
/// |S| lam^2 <= 1 (single, v != 0) and s_v s_w lam^2 <= 1 (multi).
SuiteResult check_sparsity_bounds(const ProxCheckConfig& cfg);
/// Larger |y| never receives a smaller output magnitude.
SuiteResult check_order_consistency(const ProxCheckConfig& cfg);
/// h non-increasing in s (single) and in each of s_v, s_w (multi) over
/// feasible candidates.
SuiteResult check_h_monotonicity(const ProxCheckConfig& cfg);
/// Feasible candidates stay feasible when any sparsity count is lowered.
SuiteResult check_feasibility_monotonicity(const ProxCheckConfig& cfg);
/// The boundary walk returns exactly the exhaustively defined boundary, has
/// at most min(m, p) + 1 members and makes at most m + p + 2 evaluations.
SuiteResult check_mfb(const ProxCheckConfig& cfg);
/// prox(-x, -y) = -prox(x, y) exactly, single and multi.
SuiteResult check_sign_equivariance(const ProxCheckConfig& cfg);

ProxCheckReport run_prox_check(const ProxCheckConfig& cfg);

/// Random prox input: N(0, 1) entries, one in ten scaled by 10, and
/// occasional exact zeros and repeated magnitudes.
std::vector<double> random_prox_vector(Rng& rng, std::size_t len);

}  // namespace pathprox
