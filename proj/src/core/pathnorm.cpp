#include "pathnorm.hpp"

#include <algorithm>
#include <cmath>

namespace pathprox {

double path_norm_1(const ShallowParams& params) {
  double total = 0.0;
  for (std::size_t i = 0; i < params.hidden(); ++i) {
    total += l1_norm(params.W.row(i)) * l1_norm(params.V.row(i));
  }
  return total;
}

double product_bound(const ShallowParams& params) {
  // Summing the column l1 norms of V is the same as summing every |V_ik|.
  const double v_norm = l1_norm(params.V.data());
  double w_norm = 0.0;
  for (std::size_t i = 0; i < params.hidden(); ++i) {
    w_norm = std::max(w_norm, l1_norm(params.W.row(i)));
  }
  return v_norm * w_norm;
}

double empirical_lipschitz_ratio(const ShallowParams& params,
                                 ActivationKind act, Rng& rng,
                                 std::size_t samples, double box) {
  const std::size_t m = params.inputs();
  std::vector<double> x(m), u(m);
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    double dist = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      x[j] = rng.uniform(-box, box);
      u[j] = rng.uniform(-box, box);
      dist = std::max(dist, std::fabs(x[j] - u[j]));
    }
    if (dist == 0.0) continue;
    const auto hx = forward(params, act, x);
    const auto hu = forward(params, act, u);
    double diff = 0.0;
    for (std::size_t k = 0; k < hx.size(); ++k) diff += std::fabs(hx[k] - hu[k]);
    best = std::max(best, diff / dist);
  }
  return best;
}

LipschitzReport lipschitz_report(const ShallowParams& params,
                                 ActivationKind act, Rng& rng,
                                 std::size_t samples) {
  LipschitzReport report;
  report.path_norm = path_norm_1(params);
  report.product_bound = product_bound(params);
  report.empirical_ratio_max =
      empirical_lipschitz_ratio(params, act, rng, samples);
  report.samples = samples;
  return report;
}

}  // namespace pathprox
