#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "model.hpp"
#include "numerics.hpp"
#include "prox_single.hpp"

namespace pathprox {

/// Number of active entries in the v part and in the w part.
struct SparsityPair {
  std::size_t s_v = 0;
  std::size_t s_w = 0;

  auto operator<=>(const SparsityPair&) const = default;
};

/// Stationary point for one sparsity pair; `v` and `w` are stored in the
/// descending-magnitude order of x and y respectively.
struct ProxCandidateMulti {
  SparsityPair pair;
  std::vector<double> v;
  std::vector<double> w;
  double h = 0.0;
};

/// 1/2 ||v - |x|||^2 + 1/2 ||w - |y|||^2 + lam * sum(v) * sum(w).
double h_multi(std::span<const double> v, std::span<const double> w,
               std::span<const double> x_abs, std::span<const double> y_abs,
               double lam);

/// Throws kSingularCandidate when 1 - s_v s_w lam^2 <= 0.
ProxCandidateMulti candidate_multi(SparsityPair pair,
                                   const MagnitudeOrder& order_x,
                                   const MagnitudeOrder& order_y, double lam);

/// s_v * s_w * lam^2 < 1 - 1e-15.
bool pair_admissible(SparsityPair pair, double lam);

/// Admissible, and the smallest active v and w entries are >= 0 (after the
/// noise clamp). An empty side is vacuously feasible. O(1).
bool pair_feasible(SparsityPair pair, const MagnitudeOrder& order_x,
                   const MagnitudeOrder& order_y, double lam);

/// Sparsity pairs on the maximal feasibility boundary.
struct MfbSet {
  std::vector<SparsityPair> pairs;
  // Number of pair_feasible evaluations made by the walk.
  std::size_t evaluations = 0;
};

/// Monotone staircase walk from (0, m): s_v only grows, s_w only shrinks.
MfbSet mfb(const MagnitudeOrder& order_x, const MagnitudeOrder& order_y,
           double lam);

struct ProxMultiResult {
  std::vector<double> v;
  std::vector<double> w;
};

/// Global minimiser of 1/2 ||v - x||^2 + 1/2 ||w - y||^2 + lam ||v||_1 ||w||_1.
/// lam == 0 returns the input; lam < 0 throws kParameter.
ProxMultiResult prox_multi(std::span<const double> x,
                           std::span<const double> y, double lam,
                           SelectionRule rule = SelectionRule::kMinimum);

struct OracleMultiResult {
  std::vector<double> v;
  std::vector<double> w;
  double h = 0.0;
  double refine_gain = 0.0;
};

inline constexpr std::size_t kOracleMultiMaxDim = 6;

/// Evaluates every pair in {0..p} x {0..m} plus both trivial points, then
/// refines the winner by projected gradient. Independent of prox_multi.
OracleMultiResult prox_multi_oracle(std::span<const double> x,
                                    std::span<const double> y, double lam);

/// Row i of V and row i of W form one independent prox problem.
ShallowParams prox_full(const ShallowParams& params, double lam);

}  // namespace pathprox
