#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <span>

#include "prox_multi.hpp"
#include "prox_single.hpp"

namespace pathprox {

namespace {

constexpr double kOracleTol = 1e-9;
constexpr double kReductionTol = 1e-10;
constexpr double kStationarityTol = 1e-10;

std::string fmt_vec(std::span<const double> a) {
  std::string s = "[";
  char buf[32];
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", a[i]);
    if (i) s += ", ";
    s += buf;
  }
  return s + "]";
}

std::string describe(std::span<const double> x, std::span<const double> y,
                     double lam) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", lam);
  return "x=" + fmt_vec(x) + " y=" + fmt_vec(y) + " lam=" + buf;
}

class Tracker {
 public:
  explicit Tracker(std::string name) { r_.name = std::move(name); }

  void instance() { ++r_.instances; }

  void check(bool ok, double err, const std::function<std::string()>& what) {
    ++r_.checks;
    if (std::isfinite(err)) r_.worst = std::max(r_.worst, err);
    if (!ok) {
      if (r_.violations == 0) r_.first_issue = what();
      ++r_.violations;
    }
  }

  SuiteResult done() { return std::move(r_); }

 private:
  SuiteResult r_;
};

std::vector<double> abs_of(std::span<const double> a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::fabs(a[i]);
  return out;
}

std::size_t count_nonzero(std::span<const double> a) {
  return static_cast<std::size_t>(
      std::count_if(a.begin(), a.end(), [](double t) { return t != 0.0; }));
}

double sum_abs(std::span<const double> a) {
  double s = 0.0;
  for (double t : a) s += std::fabs(t);
  return s;
}

double max_abs(std::span<const double> a) {
  double s = 0.0;
  for (double t : a) s = std::max(s, std::fabs(t));
  return s;
}

SelectionRule rule_of(const ProxCheckConfig& cfg) {
  return cfg.inject_fault ? SelectionRule::kInvertedForTesting
                          : SelectionRule::kMinimum;
}

// Draws the per-trial problem shape and coefficient.
struct Draw {
  Rng& rng;
  const ProxCheckConfig& cfg;

  double lambda(std::size_t trial) const {
    return cfg.lambdas[trial % cfg.lambdas.size()];
  }
  std::size_t dim(std::size_t cap) const { return 1 + rng.index(cap); }
};

std::size_t single_cap(const ProxCheckConfig& cfg) {
  return std::min(cfg.max_m, kOracleSingleMaxM);
}
std::size_t multi_cap_m(const ProxCheckConfig& cfg) {
  return std::min(cfg.max_m, kOracleMultiMaxDim);
}
std::size_t multi_cap_p(const ProxCheckConfig& cfg) {
  return std::min(cfg.max_p, kOracleMultiMaxDim);
}

// Largest |a_j| ordering violation: a_j > a_l in output while |in_j| is
// smaller than |in_l| by more than 1e-12.
bool order_consistent(std::span<const double> out, std::span<const double> in) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::size_t l = 0; l < out.size(); ++l) {
      if (std::fabs(out[j]) > std::fabs(out[l]) &&
          std::fabs(in[j]) < std::fabs(in[l]) - 1e-12) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

void ProxCheckConfig::validate() const {
  if (trials == 0) throw Error(ErrorKind::kParameter, "trials must be >= 1");
  if (max_m == 0) throw Error(ErrorKind::kParameter, "max-m must be >= 1");
  if (max_p == 0) throw Error(ErrorKind::kParameter, "max-p must be >= 1");
  if (lambdas.empty()) {
    throw Error(ErrorKind::kParameter, "need at least one lambda");
  }
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw Error(ErrorKind::kParameter, "check lambdas must be > 0");
    }
  }
}

bool ProxCheckReport::passed() const noexcept {
  return std::all_of(suites.begin(), suites.end(),
                     [](const SuiteResult& s) { return s.passed(); });
}

std::size_t ProxCheckReport::total_violations() const noexcept {
  std::size_t n = 0;
  for (const auto& s : suites) n += s.violations;
  return n;
}

std::vector<double> random_prox_vector(Rng& rng, std::size_t len) {
  std::vector<double> v(len);
  for (std::size_t j = 0; j < len; ++j) {
    const double r = rng.uniform();
    if (r < 0.05) {
      v[j] = 0.0;
    } else if (r < 0.10 && j > 0) {
      v[j] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * std::fabs(v[j - 1]);
    } else {
      v[j] = rng.normal() * (rng.uniform() < 0.1 ? 10.0 : 1.0);
    }
  }
  return v;
}

SuiteResult check_single_oracle(const ProxCheckConfig& cfg) {
  cfg.validate();
  Tracker t("single_oracle");
  Rng rng(cfg.seed + 101);
  Draw d{rng, cfg};
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const double lam = d.lambda(trial);
    const std::size_t m = d.dim(single_cap(cfg));
    const double x = random_prox_vector(rng, 1)[0];
    const auto y = random_prox_vector(rng, m);
    t.instance();
    const auto fast = prox_single(x, y, lam, rule_of(cfg));
    const auto oracle = prox_single_oracle(x, y, lam);
    const double h_fast = h_single(std::fabs(fast.v), abs_of(fast.w),
                                   std::fabs(x), abs_of(y), lam);
    const double err = std::fabs(h_fast - oracle.h);
    const std::span<const double> xs(&x, 1);
    t.check(err <= kOracleTol, err, [&] {
      return describe(xs, y, lam) + ": h(fast)=" + std::to_string(h_fast) +
             " h(oracle)=" + std::to_string(oracle.h);
    });
    t.check(oracle.refine_gain <= kOracleTol, oracle.refine_gain, [&] {
      return describe(xs, y, lam) + ": refinement improved on enumeration by " +
             std::to_string(oracle.refine_gain);
    });
  }
  return t.done();
}

SuiteResult check_multi_oracle(const ProxCheckConfig& cfg) {
  cfg.validate();
  Tracker t("multi_oracle");
  Rng rng(cfg.seed + 202);
  Draw d{rng, cfg};
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const double lam = d.lambda(trial);
    const std::size_t p = d.dim(multi_cap_p(cfg));
    const std::size_t m = d.dim(multi_cap_m(cfg));
    const auto x = random_prox_vector(rng, p);
    const auto y = random_prox_vector(rng, m);
    t.instance();
    const auto fast = prox_multi(x, y, lam, rule_of(cfg));
    const auto oracle = prox_multi_oracle(x, y, lam);
    const double h_fast =
        h_multi(abs_of(fast.v), abs_of(fast.w), abs_of(x), abs_of(y), lam);
    const double err = std::fabs(h_fast - oracle.h);
    t.check(err <= kOracleTol, err, [&] {
      return describe(x, y, lam) + ": h(fast)=" + std::to_string(h_fast) +
             " h(oracle)=" + std::to_string(oracle.h);
    });
    t.check(oracle.refine_gain <= kOracleTol, oracle.refine_gain, [&] {
      return describe(x, y, lam) + ": refinement improved on enumeration by " +
             std::to_string(oracle.refine_gain);
    });
  }
  return t.done();
}

SuiteResult check_p1_reduction(const ProxCheckConfig& cfg) {
  cfg.validate();
  Tracker t("p1_reduction");
  Rng rng(cfg.seed + 303);
  Draw d{rng, cfg};
  const std::size_t n = std::max<std::size_t>(1, cfg.trials / 10);
  for (std::size_t trial = 0; trial < n; ++trial) {
    const double lam = d.lambda(trial);
    const std::size_t m = d.dim(cfg.max_m);
    const auto x = random_prox_vector(rng, 1);
    const auto y = random_prox_vector(rng, m);
    t.instance();
    const auto single = prox_single(x[0], y, lam, rule_of(cfg));
    const auto multi = prox_multi(x, y, lam);
    double err = std::fabs(single.v - multi.v[0]);
    for (std::size_t j = 0; j < m; ++j) {
      err = std::max(err, std::fabs(single.w[j] - multi.w[j]));
    }
    t.check(err <= kReductionTol, err, [&] {
      return describe(x, y, lam) + ": single and p=1 multi differ by " +
             std::to_string(err);
    });
  }
  return t.done();
}

SuiteResult check_stationarity(const ProxCheckConfig& cfg) {
  cfg.validate();
  Tracker t("stationarity");
  Rng rng(cfg.seed + 404);
  Draw d{rng, cfg};
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const double lam = d.lambda(trial);
    {
      const std::size_t m = d.dim(cfg.max_m);
      const double x = random_prox_vector(rng, 1)[0];
      const auto y = random_prox_vector(rng, m);
      t.instance();
      const auto r = prox_single(x, y, lam, rule_of(cfg));
      const double v = std::fabs(r.v);
      double res = std::fabs(v - std::max(0.0, std::fabs(x) - lam * sum_abs(r.w)));
      for (std::size_t j = 0; j < m; ++j) {
        res = std::max(res, std::fabs(std::fabs(r.w[j]) -
                                      std::max(0.0, std::fabs(y[j]) - lam * v)));
      }
      const double scale =
          std::max({1.0, std::fabs(x), max_abs(y), lam * sum_abs(y)});
      const std::span<const double> xs(&x, 1);
      t.check(res <= kStationarityTol * scale, res / scale, [&] {
        return describe(xs, y, lam) + ": single residual " + std::to_string(res);
      });
    }
    {
      const std::size_t p = d.dim(cfg.max_p);
      const std::size_t m = d.dim(cfg.max_m);
      const auto x = random_prox_vector(rng, p);
      const auto y = random_prox_vector(rng, m);
      t.instance();
      const auto r = prox_multi(x, y, lam, rule_of(cfg));
      const double sv = sum_abs(r.v);
      const double sw = sum_abs(r.w);
      double res = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        res = std::max(res, std::fabs(std::fabs(r.v[k]) -
                                      std::max(0.0, std::fabs(x[k]) - lam * sw)));
      }
      for (std::size_t j = 0; j < m; ++j) {
        res = std::max(res, std::fabs(std::fabs(r.w[j]) -
                                      std::max(0.0, std::fabs(y[j]) - lam * sv)));
      }
      const double scale = std::max({1.0, max_abs(x), max_abs(y),
                                     lam * sum_abs(x), lam * sum_abs(y)});
      t.check(res <= kStationarityTol * scale, res / scale, [&] {
        return describe(x, y, lam) + ": multi residual " + std::to_string(res);
      });
    }
  }
  return t.done();
}

SuiteResult check_sparsity_bounds(const ProxCheckConfig& cfg) {
  cfg.validate();
  Tracker t("sparsity_bounds");
  Rng rng(cfg.seed + 505);
  Draw d{rng, cfg};
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const double lam = d.lambda(trial);
    {
      const std::size_t m = d.dim(cfg.max_m);
      const double x = random_prox_vector(rng, 1)[0];
      const auto y = random_prox_vector(rng, m);
      t.instance();
      const auto r = prox_single(x, y, lam, rule_of(cfg));
      if (r.v != 0.0) {
        const double load = static_cast<double>(count_nonzero(r.w)) * lam * lam;
        const std::span<const double> xs(&x, 1);
        t.check(load <= 1.0 + 1e-12, load, [&] {
          return describe(xs, y, lam) + ": |S| lam^2 = " + std::to_string(load);
        });
      }
    }
    {
      const std::size_t p = d.dim(cfg.max_p);
      const std::size_t m = d.dim(cfg.max_m);
      const auto x = random_prox_vector(rng, p);
      const auto y = random_prox_vector(rng, m);
      t.instance();
      const auto r = prox_multi(x, y, lam, rule_of(cfg));
      const std::size_t sv = count_nonzero(r.v);
      const std::size_t sw = count_nonzero(r.w);
      if (sv > 0 && sw > 0) {
        const double load = static_cast<double>(sv * sw) * lam * lam;
        t.check(load <= 1.0 + 1e-12, load, [&] {
          return describe(x, y, lam) + ": s_v s_w lam^2 = " +
                 std::to_string(load);
        });
      }
    }
  }
  return t.done();
}

SuiteResult check_order_consistency(const ProxCheckConfig& cfg) {
  cfg.validate();
  Tracker t("order_consistency");
  Rng rng(cfg.seed + 606);
  Draw d{rng, cfg};
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const double lam = d.lambda(trial);
    const std::size_t p = d.dim(cfg.max_p);
    const std::size_t m = d.dim(cfg.max_m);
    const auto x = random_prox_vector(rng, p);
    const auto y = random_prox_vector(rng, m);
    t.instance();
    const auto s = prox_single(x[0], y, lam, rule_of(cfg));
    t.check(order_consistent(s.w, y), 0.0, [&] {
      return describe(std::span<const double>(x.data(), 1), y, lam) +
             ": single output order differs from |y| order";
    });
    const auto r = prox_multi(x, y, lam, rule_of(cfg));
    t.check(order_consistent(r.v, x) && order_consistent(r.w, y), 0.0, [&] {
      return describe(x, y, lam) + ": multi output order differs from input";
    });
  }
  return t.done();
}

SuiteResult check_h_monotonicity(const ProxCheckConfig& cfg) {
  cfg.validate();
  Tracker t("h_monotonicity");
  Rng rng(cfg.seed + 707);
  Draw d{rng, cfg};
  auto tol = [](double h) { return 1e-12 * std::max(1.0, std::fabs(h)); };
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const double lam = d.lambda(trial);
    {
      const std::size_t m = d.dim(cfg.max_m);
      const double x = random_prox_vector(rng, 1)[0];
      const auto y = random_prox_vector(rng, m);
      const auto oy = magnitude_order(y);
      t.instance();
      for (std::size_t s = 2; s <= m; ++s) {
        if (!(1.0 - static_cast<double>(s) * lam * lam > 0.0)) break;
        const auto hi = candidate(s, oy, std::fabs(x), lam);
        if (!is_feasible(hi)) continue;
        const auto lo = candidate(s - 1, oy, std::fabs(x), lam);
        const double gap = hi.h - lo.h;
        const std::span<const double> xs(&x, 1);
        t.check(gap <= tol(lo.h), std::max(0.0, gap), [&] {
          return describe(xs, y, lam) + ": h(" + std::to_string(s) + ") - h(" +
                 std::to_string(s - 1) + ") = " + std::to_string(gap);
        });
      }
    }
    {
      const std::size_t p = d.dim(cfg.max_p);
      const std::size_t m = d.dim(cfg.max_m);
      const auto x = random_prox_vector(rng, p);
      const auto y = random_prox_vector(rng, m);
      const auto ox = magnitude_order(x);
      const auto oy = magnitude_order(y);
      t.instance();
      for (std::size_t a = 0; a <= p; ++a) {
        for (std::size_t b = 0; b <= m; ++b) {
          const SparsityPair here{a, b};
          if (!pair_feasible(here, ox, oy, lam)) continue;
          const double h = candidate_multi(here, ox, oy, lam).h;
          auto compare = [&](SparsityPair below) {
            const double h_below = candidate_multi(below, ox, oy, lam).h;
            const double gap = h - h_below;
            t.check(gap <= tol(h_below), std::max(0.0, gap), [&] {
              return describe(x, y, lam) + ": h(" + std::to_string(a) + "," +
                     std::to_string(b) + ") exceeds h(" +
                     std::to_string(below.s_v) + "," +
                     std::to_string(below.s_w) + ") by " + std::to_string(gap);
            });
          };
          if (b > 0) compare({a, b - 1});
          if (a > 0) compare({a - 1, b});
        }
      }
    }
  }
  return t.done();
}

SuiteResult check_feasibility_monotonicity(const ProxCheckConfig& cfg) {
  cfg.validate();
  Tracker t("feasibility_monotonicity");
  Rng rng(cfg.seed + 808);
  Draw d{rng, cfg};
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const double lam = d.lambda(trial);
    {
      const std::size_t m = d.dim(cfg.max_m);
      const double x = random_prox_vector(rng, 1)[0];
      const auto y = random_prox_vector(rng, m);
      const auto oy = magnitude_order(y);
      t.instance();
      std::vector<bool> feas;
      for (std::size_t s = 0; s <= m; ++s) {
        if (!(1.0 - static_cast<double>(s) * lam * lam > 0.0)) break;
        feas.push_back(is_feasible(candidate(s, oy, std::fabs(x), lam)));
      }
      for (std::size_t k = 2; k < feas.size(); ++k) {
        if (!feas[k]) continue;
        for (std::size_t i = 1; i < k; ++i) {
          const std::span<const double> xs(&x, 1);
          t.check(feas[i], 0.0, [&] {
            return describe(xs, y, lam) + ": s=" + std::to_string(k) +
                   " feasible but s=" + std::to_string(i) + " is not";
          });
        }
      }
    }
    {
      const std::size_t p = d.dim(cfg.max_p);
      const std::size_t m = d.dim(cfg.max_m);
      const auto x = random_prox_vector(rng, p);
      const auto y = random_prox_vector(rng, m);
      const auto ox = magnitude_order(x);
      const auto oy = magnitude_order(y);
      t.instance();
      std::vector<std::vector<bool>> feas(p + 1, std::vector<bool>(m + 1));
      for (std::size_t a = 0; a <= p; ++a) {
        for (std::size_t b = 0; b <= m; ++b) {
          feas[a][b] = pair_feasible({a, b}, ox, oy, lam);
        }
      }
      for (std::size_t k = 0; k <= p; ++k) {
        for (std::size_t l = 0; l <= m; ++l) {
          if (!feas[k][l]) continue;
          for (std::size_t i = 0; i <= k; ++i) {
            for (std::size_t j = 0; j <= l; ++j) {
              t.check(feas[i][j], 0.0, [&] {
                return describe(x, y, lam) + ": pair (" + std::to_string(k) +
                       "," + std::to_string(l) + ") feasible but (" +
                       std::to_string(i) + "," + std::to_string(j) +
                       ") is not";
              });
            }
          }
        }
      }
    }
  }
  return t.done();
}

SuiteResult check_mfb(const ProxCheckConfig& cfg) {
  cfg.validate();
  Tracker t("mfb");
  Rng rng(cfg.seed + 909);
  Draw d{rng, cfg};
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const double lam = d.lambda(trial);
    const std::size_t p = d.dim(cfg.max_p);
    const std::size_t m = d.dim(cfg.max_m);
    const auto x = random_prox_vector(rng, p);
    const auto y = random_prox_vector(rng, m);
    const auto ox = magnitude_order(x);
    const auto oy = magnitude_order(y);
    t.instance();

    auto walk = mfb(ox, oy, lam);
    std::vector<SparsityPair> exhaustive;
    for (std::size_t a = 0; a <= p; ++a) {
      for (std::size_t b = 0; b <= m; ++b) {
        if (!pair_feasible({a, b}, ox, oy, lam)) continue;
        const bool up_v = a < p && pair_feasible({a + 1, b}, ox, oy, lam);
        const bool up_w = b < m && pair_feasible({a, b + 1}, ox, oy, lam);
        if (!up_v && !up_w) exhaustive.push_back({a, b});
      }
    }
    std::sort(walk.pairs.begin(), walk.pairs.end());
    t.check(walk.pairs == exhaustive, 0.0, [&] {
      return describe(x, y, lam) + ": walk found " +
             std::to_string(walk.pairs.size()) + " pairs, definition gives " +
             std::to_string(exhaustive.size());
    });
    const double card = static_cast<double>(walk.pairs.size());
    t.check(walk.pairs.size() <= std::min(m, p) + 1, card, [&] {
      return describe(x, y, lam) + ": boundary has " +
             std::to_string(walk.pairs.size()) + " pairs";
    });
    t.check(walk.evaluations <= m + p + 2,
            static_cast<double>(walk.evaluations), [&] {
              return describe(x, y, lam) + ": walk made " +
                     std::to_string(walk.evaluations) + " evaluations";
            });
  }
  return t.done();
}

SuiteResult check_sign_equivariance(const ProxCheckConfig& cfg) {
  cfg.validate();
  Tracker t("sign_equivariance");
  Rng rng(cfg.seed + 1010);
  Draw d{rng, cfg};
  auto negated = [](std::vector<double> a) {
    for (double& t : a) t = -t;
    return a;
  };
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const double lam = d.lambda(trial);
    const std::size_t p = d.dim(cfg.max_p);
    const std::size_t m = d.dim(cfg.max_m);
    const auto x = random_prox_vector(rng, p);
    const auto y = random_prox_vector(rng, m);
    t.instance();
    const auto s_pos = prox_single(x[0], y, lam, rule_of(cfg));
    const auto s_neg = prox_single(-x[0], negated(y), lam, rule_of(cfg));
    t.check(s_neg.v == -s_pos.v && s_neg.w == negated(s_pos.w), 0.0, [&] {
      return describe(std::span<const double>(x.data(), 1), y, lam) +
             ": single output not odd";
    });
    const auto m_pos = prox_multi(x, y, lam, rule_of(cfg));
    const auto m_neg = prox_multi(negated(x), negated(y), lam, rule_of(cfg));
    t.check(m_neg.v == negated(m_pos.v) && m_neg.w == negated(m_pos.w), 0.0,
            [&] { return describe(x, y, lam) + ": multi output not odd"; });
  }
  return t.done();
}

ProxCheckReport run_prox_check(const ProxCheckConfig& cfg) {
  cfg.validate();
  ProxCheckReport report;
  for (auto* suite :
       {&check_single_oracle, &check_multi_oracle, &check_p1_reduction,
        &check_stationarity, &check_sparsity_bounds, &check_order_consistency,
        &check_h_monotonicity, &check_feasibility_monotonicity, &check_mfb,
        &check_sign_equivariance}) {
    report.suites.push_back(suite(cfg));
  }
  return report;
}

}  // namespace pathprox
