#include "attack.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pathprox {

AttackConfig AttackConfig::standard(double epsilon, std::uint64_t seed) {
  AttackConfig cfg;
  cfg.epsilon = epsilon;
  cfg.iters = 40;
  cfg.step = epsilon / 20.0;
  cfg.random_init = true;
  cfg.seed = seed;
  return cfg;
}

void AttackConfig::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::kParameter, "attack epsilon must be >= 0");
  }
  if (iters < 1) throw Error(ErrorKind::kParameter, "attack needs iters >= 1");
  if (!(step > 0.0) && epsilon > 0.0) {
    throw Error(ErrorKind::kParameter, "attack step must be > 0");
  }
}

std::vector<double> pgd_linf(const ShallowParams& params, ActivationKind act,
                             std::span<const double> x, int label,
                             const AttackConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t m = x.size();
  std::vector<double> lo(m), hi(m);
  for (std::size_t j = 0; j < m; ++j) {
    lo[j] = std::max(0.0, x[j] - cfg.epsilon);
    hi[j] = std::min(1.0, x[j] + cfg.epsilon);
    // Inputs outside the data range keep their own coordinate feasible.
    lo[j] = std::min(lo[j], x[j]);
    hi[j] = std::max(hi[j], x[j]);
  }
  std::vector<double> best(x.begin(), x.end());
  if (cfg.epsilon == 0.0) return best;
  double best_loss = sample_cross_entropy(params, act, x, label);

  std::vector<double> cur = best;
  if (cfg.random_init) {
    for (std::size_t j = 0; j < m; ++j) {
      cur[j] = std::clamp(x[j] + rng.uniform(-cfg.epsilon, cfg.epsilon), lo[j],
                          hi[j]);
    }
    const double l = sample_cross_entropy(params, act, cur, label);
    if (l > best_loss) {
      best_loss = l;
      best = cur;
    }
  }
  std::vector<double> grad;
  for (std::size_t it = 0; it < cfg.iters; ++it) {
    sample_cross_entropy(params, act, cur, label, &grad);
    for (std::size_t j = 0; j < m; ++j) {
      const double s = grad[j] > 0.0 ? 1.0 : (grad[j] < 0.0 ? -1.0 : 0.0);
      cur[j] = std::clamp(cur[j] + cfg.step * s, lo[j], hi[j]);
    }
    const double l = sample_cross_entropy(params, act, cur, label);
    if (l > best_loss) {
      best_loss = l;
      best = cur;
    }
  }
  return best;
}

double clean_error(const ShallowParams& params, ActivationKind act,
                   const Dataset& data) {
  if (data.size() == 0) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    wrong += predict(params, act, data.features.row(r)) != data.labels[r];
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double robust_error(const ShallowParams& params, ActivationKind act,
                    const Dataset& data, const AttackConfig& cfg) {
  cfg.validate();
  if (data.size() == 0) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    auto x = data.features.row(r);
    const int label = data.labels[r];
    if (predict(params, act, x) != label) {
      ++wrong;
      continue;
    }
    Rng rng(cfg.seed + r);
    const auto adv = pgd_linf(params, act, x, label, cfg, rng);
    wrong += predict(params, act, adv) != label;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

std::vector<double> robust_error_curve(const ShallowParams& params,
                                       ActivationKind act, const Dataset& data,
                                       const std::vector<double>& epsilons,
                                       const AttackConfig& proto) {
  std::vector<std::size_t> order(epsilons.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return epsilons[a] < epsilons[b];
  });
  std::vector<AttackConfig> cfgs;
  for (double eps : epsilons) {
    AttackConfig cfg = proto;
    cfg.epsilon = eps;
    cfg.step = eps / 20.0;
    cfg.validate();
    cfgs.push_back(cfg);
  }
  std::vector<std::size_t> wrong(epsilons.size(), 0);
  for (std::size_t r = 0; r < data.size(); ++r) {
    auto x = data.features.row(r);
    const int label = data.labels[r];
    bool broken = predict(params, act, x) != label;
    for (std::size_t i : order) {
      if (!broken) {
        Rng rng(proto.seed + r);
        const auto adv = pgd_linf(params, act, x, label, cfgs[i], rng);
        broken = predict(params, act, adv) != label;
      }
      wrong[i] += broken;
    }
  }
  std::vector<double> out(epsilons.size(), 0.0);
  if (data.size() == 0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(wrong[i]) / static_cast<double>(data.size());
  }
  return out;
}

}  // namespace pathprox
