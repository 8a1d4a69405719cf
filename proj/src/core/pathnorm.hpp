#pragma once

#include <cstddef>

#include "model.hpp"
#include "numerics.hpp"

namespace pathprox {

/// sum_i (sum_j |W_ij|) * (sum_k |V_ik|), i.e. the 1-path-norm of the block.
double path_norm_1(const ShallowParams& params);

/// ||V^T||_{inf,1} * ||W||_inf: column l1 norms of V summed, times the
/// largest row l1 norm of W.
double product_bound(const ShallowParams& params);

struct LipschitzReport {
  double path_norm = 0.0;
  double product_bound = 0.0;
  double empirical_ratio_max = 0.0;
  std::size_t samples = 0;
};

/// Largest ||h(x) - h(u)||_1 / ||x - u||_inf over `samples` random pairs
/// drawn uniformly from [-box, box]^m. Pairs with x == u are skipped.
double empirical_lipschitz_ratio(const ShallowParams& params,
                                 ActivationKind act, Rng& rng,
                                 std::size_t samples, double box = 1.0);

LipschitzReport lipschitz_report(const ShallowParams& params,
                                 ActivationKind act, Rng& rng,
                                 std::size_t samples = 10000);

}  // namespace pathprox
