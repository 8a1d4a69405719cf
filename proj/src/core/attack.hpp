#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dataset.hpp"
#include "model.hpp"

namespace pathprox {

/// l_inf PGD settings. The defaults follow the usual protocol: 40 steps of
/// size epsilon / 20 from a random start.
struct AttackConfig {
  double epsilon = 0.1;
  std::size_t iters = 40;
  double step = 0.005;
  bool random_init = true;
  std::uint64_t seed = 0;

  static AttackConfig standard(double epsilon, std::uint64_t seed = 0);
  void validate() const;
};

/// Sign-gradient ascent on the cross-entropy inside the epsilon box around
/// `x`, intersected with [0, 1]^m. Returns the iterate with the highest loss
/// (the start point included).
std::vector<double> pgd_linf(const ShallowParams& params, ActivationKind act,
                             std::span<const double> x, int label,
                             const AttackConfig& cfg, Rng& rng);

/// Fraction of samples misclassified by the network.
double clean_error(const ShallowParams& params, ActivationKind act,
                   const Dataset& data);

/// Fraction of samples for which some point of the epsilon box (the clean
/// point or the PGD result) is misclassified. Sample i draws its random
/// start from Rng(cfg.seed + i), so the result is order independent.
double robust_error(const ShallowParams& params, ActivationKind act,
                    const Dataset& data, const AttackConfig& cfg);

/// Robust error for every epsilon in `epsilons` (any order), each attack
/// using step epsilon / 20 and the iteration count, start rule and seed of
/// `proto`. A sample broken at some epsilon counts as broken at every larger
/// one, because the smaller box lies inside the larger; the curve is
/// therefore nondecreasing in epsilon.
std::vector<double> robust_error_curve(const ShallowParams& params,
                                       ActivationKind act, const Dataset& data,
                                       const std::vector<double>& epsilons,
                                       const AttackConfig& proto);

}  // namespace pathprox
