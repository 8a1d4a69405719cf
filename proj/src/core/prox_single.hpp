#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "numerics.hpp"

namespace pathprox {

// Candidate entries in (-kFeasibilityClamp, 0] are snapped to exactly 0
// before any sign test.
inline constexpr double kFeasibilityClamp = 1e-12;

/// Stationary point with the `s` largest |y| entries active.
/// `w` is stored in descending-magnitude order of y.
struct ProxCandidateSingle {
  std::size_t s = 0;
  double v = 0.0;
  std::vector<double> w;
  double h = 0.0;
};

/// 1/2 (v - |x|)^2 + 1/2 sum (w_j - |y_j|)^2 + lam * v * sum w_j.
double h_single(double v, std::span<const double> w, double x_abs,
                std::span<const double> y_abs, double lam);

/// Closed-form candidate for sparsity `s`. Throws kSingularCandidate when
/// 1 - s * lam^2 <= 0.
ProxCandidateSingle candidate(std::size_t s, const MagnitudeOrder& order_y,
                              double x_abs, double lam);

/// v > 0 and (s == 0 or the s-th largest w entry > 0).
bool is_feasible(const ProxCandidateSingle& c);

/// Largest sparsity the search may consider: min(floor(lam^-2), m) with
/// singular values (1 - s lam^2 <= 0) excluded.
std::size_t sparsity_cap(double lam, std::size_t m);

struct ProxSingleResult {
  double v = 0.0;
  std::vector<double> w;
};

/// Which candidate wins the final comparison. `kInvertedForTesting` picks the
/// worst one and exists only so the verification harness can prove it
/// detects a broken selection step.
enum class SelectionRule { kMinimum, kInvertedForTesting };

/// Global minimiser of 1/2 (v - x)^2 + 1/2 ||w - y||^2 + lam |v| ||w||_1.
/// lam == 0 returns the input unchanged; lam < 0 throws kParameter.
ProxSingleResult prox_single(double x, std::span<const double> y, double lam,
                             SelectionRule rule = SelectionRule::kMinimum);

struct OracleSingleResult {
  double v = 0.0;
  std::vector<double> w;
  double h = 0.0;  // objective of the sign-free problem at (|v|, |w|)
  // How much projected-gradient refinement lowered h from the enumerated
  // winner; anything above 1e-9 means enumeration missed the optimum.
  double refine_gain = 0.0;
};

inline constexpr std::size_t kOracleSingleMaxM = 20;

/// Exhaustive enumeration of every stationary candidate plus the trivial
/// point, followed by 10^3 projected-gradient steps from the winner.
/// Shares no code with prox_single.
OracleSingleResult prox_single_oracle(double x, std::span<const double> y,
                                      double lam);

/// Applies prox_single to every hidden unit: x = v_in[i], y = row i of W_in.
std::pair<std::vector<double>, DenseMatrix> prox_block_single(
    std::span<const double> v_in, const DenseMatrix& W_in, double lam);

}  // namespace pathprox
