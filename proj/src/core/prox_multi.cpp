#include "prox_multi.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace pathprox {

namespace {

double clamp_noise(double value) {
  return (value > -kFeasibilityClamp && value <= 0.0) ? 0.0 : value;
}

void check_inputs(std::span<const double> x, std::span<const double> y,
                  double lam) {
  if (!(lam >= 0.0) || !std::isfinite(lam)) {
    throw Error(ErrorKind::kParameter,
                "prox coefficient must be finite and >= 0, got " +
                    std::to_string(lam));
  }
  for (double a : x) {
    if (!std::isfinite(a)) {
      throw Error(ErrorKind::kInvalidInput, "prox input x is not finite");
    }
  }
  for (double a : y) {
    if (!std::isfinite(a)) {
      throw Error(ErrorKind::kInvalidInput, "prox input y is not finite");
    }
  }
}

double mu_of(SparsityPair pair, double lam) {
  return 1.0 / (1.0 - static_cast<double>(pair.s_v) *
                          static_cast<double>(pair.s_w) * lam * lam);
}

// Shift added to every active v entry: mu (lam^2 s_w X - lam Y).
double v_shift(SparsityPair pair, const MagnitudeOrder& ox,
               const MagnitudeOrder& oy, double lam) {
  return mu_of(pair, lam) *
         (lam * lam * static_cast<double>(pair.s_w) * ox.prefix[pair.s_v] -
          lam * oy.prefix[pair.s_w]);
}

// Shift added to every active w entry: mu (lam^2 s_v Y - lam X).
double w_shift(SparsityPair pair, const MagnitudeOrder& ox,
               const MagnitudeOrder& oy, double lam) {
  return mu_of(pair, lam) *
         (lam * lam * static_cast<double>(pair.s_v) * oy.prefix[pair.s_w] -
          lam * ox.prefix[pair.s_v]);
}

std::size_t nonzeros(std::span<const double> a) {
  return static_cast<std::size_t>(
      std::count_if(a.begin(), a.end(), [](double t) { return t != 0.0; }));
}

double half_sq_norm(std::span<const double> a) {
  double s = 0.0;
  for (double t : a) s += t * t;
  return 0.5 * s;
}

struct Scored {
  SparsityPair key;
  std::vector<double> v;  // sorted order
  std::vector<double> w;  // sorted order
  double h;
};

}  // namespace

double h_multi(std::span<const double> v, std::span<const double> w,
               std::span<const double> x_abs, std::span<const double> y_abs,
               double lam) {
  if (v.size() != x_abs.size() || w.size() != y_abs.size()) {
    throw Error(ErrorKind::kShape, "h_multi: length mismatch");
  }
  double fit = 0.0, sv = 0.0, sw = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double d = v[k] - x_abs[k];
    fit += 0.5 * d * d;
    sv += v[k];
  }
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double d = w[j] - y_abs[j];
    fit += 0.5 * d * d;
    sw += w[j];
  }
  return fit + lam * sv * sw;
}

ProxCandidateMulti candidate_multi(SparsityPair pair,
                                   const MagnitudeOrder& order_x,
                                   const MagnitudeOrder& order_y, double lam) {
  const std::size_t p = order_x.size();
  const std::size_t m = order_y.size();
  if (pair.s_v > p || pair.s_w > m) {
    throw Error(ErrorKind::kParameter, "sparsity pair out of range");
  }
  if (!(1.0 - static_cast<double>(pair.s_v) * static_cast<double>(pair.s_w) *
                  lam * lam >
        0.0)) {
    throw Error(ErrorKind::kSingularCandidate,
                "1 - s_v*s_w*lam^2 <= 0 for pair (" +
                    std::to_string(pair.s_v) + ", " +
                    std::to_string(pair.s_w) + ")");
  }
  ProxCandidateMulti c;
  c.pair = pair;
  c.v.assign(p, 0.0);
  c.w.assign(m, 0.0);
  const double dv = v_shift(pair, order_x, order_y, lam);
  const double dw = w_shift(pair, order_x, order_y, lam);
  for (std::size_t k = 0; k < pair.s_v; ++k) {
    c.v[k] = clamp_noise(order_x.sorted_abs[k] + dv);
  }
  for (std::size_t j = 0; j < pair.s_w; ++j) {
    c.w[j] = clamp_noise(order_y.sorted_abs[j] + dw);
  }
  c.h = h_multi(c.v, c.w, order_x.sorted_abs, order_y.sorted_abs, lam);
  return c;
}

bool pair_admissible(SparsityPair pair, double lam) {
  return static_cast<double>(pair.s_v) * static_cast<double>(pair.s_w) * lam *
             lam <
         1.0 - 1e-15;
}

bool pair_feasible(SparsityPair pair, const MagnitudeOrder& order_x,
                   const MagnitudeOrder& order_y, double lam) {
  if (!pair_admissible(pair, lam)) return false;
  if (pair.s_v > 0) {
    const double v_last = clamp_noise(order_x.sorted_abs[pair.s_v - 1] +
                                      v_shift(pair, order_x, order_y, lam));
    if (!(v_last >= 0.0)) return false;
  }
  if (pair.s_w > 0) {
    const double w_last = clamp_noise(order_y.sorted_abs[pair.s_w - 1] +
                                      w_shift(pair, order_x, order_y, lam));
    if (!(w_last >= 0.0)) return false;
  }
  return true;
}

MfbSet mfb(const MagnitudeOrder& order_x, const MagnitudeOrder& order_y,
           double lam) {
  const std::size_t p = order_x.size();
  const std::size_t m = order_y.size();
  MfbSet out;
  std::size_t s_v = 0;
  // s_w runs down to -1, so track it as a signed count.
  long long s_w = static_cast<long long>(m);
  bool maximal = true;
  while (s_v <= p && s_w >= 0) {
    ++out.evaluations;
    const SparsityPair here{s_v, static_cast<std::size_t>(s_w)};
    if (!pair_feasible(here, order_x, order_y, lam)) {
      if (maximal && s_v > 0) {
        out.pairs.push_back({s_v - 1, here.s_w});
      }
      maximal = false;
      --s_w;
    } else {
      ++s_v;
      maximal = true;
    }
  }
  if (s_v == p + 1 && s_w >= 0) {
    out.pairs.push_back({p, static_cast<std::size_t>(s_w)});
  }
  return out;
}

ProxMultiResult prox_multi(std::span<const double> x,
                           std::span<const double> y, double lam,
                           SelectionRule rule) {
  check_inputs(x, y, lam);
  const std::size_t p = x.size();
  const std::size_t m = y.size();
  if (lam == 0.0) {
    return {std::vector<double>(x.begin(), x.end()),
            std::vector<double>(y.begin(), y.end())};
  }

  const MagnitudeOrder ox = magnitude_order(x);
  const MagnitudeOrder oy = magnitude_order(y);

  std::vector<Scored> pool;
  pool.push_back({{0, nonzeros(oy.sorted_abs)},
                  std::vector<double>(p, 0.0),
                  oy.sorted_abs,
                  half_sq_norm(ox.sorted_abs)});
  pool.push_back({{nonzeros(ox.sorted_abs), 0},
                  ox.sorted_abs,
                  std::vector<double>(m, 0.0),
                  half_sq_norm(oy.sorted_abs)});
  for (const SparsityPair& pair : mfb(ox, oy, lam).pairs) {
    auto c = candidate_multi(pair, ox, oy, lam);
    pool.push_back({pair, std::move(c.v), std::move(c.w), c.h});
  }

  // Ties (relative 1e-12) go to the lexicographically smaller
  // (s_v + s_w, s_v).
  auto key_of = [](const Scored& s) {
    return std::make_pair(s.key.s_v + s.key.s_w, s.key.s_v);
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.size(); ++i) {
    const double tol =
        1e-12 * std::max({1.0, std::fabs(pool[i].h), std::fabs(pool[best].h)});
    const double diff = pool[i].h - pool[best].h;
    bool better;
    if (rule == SelectionRule::kInvertedForTesting) {
      better = diff > 0.0;
    } else if (std::fabs(diff) <= tol) {
      better = key_of(pool[i]) < key_of(pool[best]);
    } else {
      better = diff < 0.0;
    }
    if (better) best = i;
  }

  const Scored& win = pool[best];
  std::vector<double> v_mag(p, 0.0), w_mag(m, 0.0);
  for (std::size_t k = 0; k < p; ++k) v_mag[ox.perm[k]] = win.v[k];
  for (std::size_t j = 0; j < m; ++j) w_mag[oy.perm[j]] = win.w[j];
  return {apply_signs(v_mag, x), apply_signs(w_mag, y)};
}

OracleMultiResult prox_multi_oracle(std::span<const double> x,
                                    std::span<const double> y, double lam) {
  check_inputs(x, y, lam);
  const std::size_t p = x.size();
  const std::size_t m = y.size();
  if (p > kOracleMultiMaxDim || m > kOracleMultiMaxDim) {
    throw Error(ErrorKind::kGuard,
                "oracle limited to p, m <= " +
                    std::to_string(kOracleMultiMaxDim));
  }
  std::vector<double> ax(p), ay(m);
  for (std::size_t k = 0; k < p; ++k) ax[k] = std::fabs(x[k]);
  for (std::size_t j = 0; j < m; ++j) ay[j] = std::fabs(y[j]);

  auto objective = [&](const std::vector<double>& v,
                       const std::vector<double>& w) {
    double val = 0.0, sv = 0.0, sw = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      val += 0.5 * (v[k] - ax[k]) * (v[k] - ax[k]);
      sv += v[k];
    }
    for (std::size_t j = 0; j < m; ++j) {
      val += 0.5 * (w[j] - ay[j]) * (w[j] - ay[j]);
      sw += w[j];
    }
    return val + lam * sv * sw;
  };
  auto descending = [](const std::vector<double>& a) {
    std::vector<std::size_t> idx(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) idx[i] = i;
    for (std::size_t s = 1; s < idx.size(); ++s) {
      for (std::size_t t = s; t > 0 && a[idx[t]] > a[idx[t - 1]]; --t) {
        std::swap(idx[t], idx[t - 1]);
      }
    }
    return idx;
  };
  const auto ix = descending(ax);
  const auto iy = descending(ay);

  std::vector<double> best_v(p, 0.0), best_w = ay;
  double best_h = objective(best_v, best_w);
  {
    std::vector<double> zero_w(m, 0.0);
    const double h = objective(ax, zero_w);
    if (h < best_h) {
      best_h = h;
      best_v = ax;
      best_w = zero_w;
    }
  }

  for (std::size_t sv = 0; sv <= p; ++sv) {
    for (std::size_t sw = 0; sw <= m; ++sw) {
      const double denom = 1.0 - static_cast<double>(sv * sw) * lam * lam;
      if (std::fabs(denom) < 1e-12) continue;
      double tx = 0.0, ty = 0.0;
      for (std::size_t k = 0; k < sv; ++k) tx += ax[ix[k]];
      for (std::size_t j = 0; j < sw; ++j) ty += ay[iy[j]];
      // Sums of the active entries solved from the two coupled
      // stationarity equations.
      const double sum_w = (ty - lam * static_cast<double>(sw) * tx) / denom;
      const double sum_v = (tx - lam * static_cast<double>(sv) * ty) / denom;
      std::vector<double> v(p, 0.0), w(m, 0.0);
      bool ok = true;
      for (std::size_t k = 0; k < sv && ok; ++k) {
        const double val = ax[ix[k]] - lam * sum_w;
        if (val < -1e-12) ok = false;
        v[ix[k]] = std::max(val, 0.0);
      }
      for (std::size_t j = 0; j < sw && ok; ++j) {
        const double val = ay[iy[j]] - lam * sum_v;
        if (val < -1e-12) ok = false;
        w[iy[j]] = std::max(val, 0.0);
      }
      if (!ok) continue;
      const double h = objective(v, w);
      if (h < best_h) {
        best_h = h;
        best_v = std::move(v);
        best_w = std::move(w);
      }
    }
  }

  std::vector<double> v = best_v, w = best_w;
  // The Hessian of h has spectral norm 1 + lam sqrt(p m); 1/L steps descend.
  const double step =
      1.0 / (1.0 + lam * std::sqrt(static_cast<double>(p * m)));
  for (int it = 0; it < 1000; ++it) {
    double sv = 0.0, sw = 0.0;
    for (double t : v) sv += t;
    for (double t : w) sw += t;
    for (std::size_t k = 0; k < p; ++k) {
      v[k] = std::max(0.0, v[k] - step * ((v[k] - ax[k]) + lam * sw));
    }
    for (std::size_t j = 0; j < m; ++j) {
      w[j] = std::max(0.0, w[j] - step * ((w[j] - ay[j]) + lam * sv));
    }
  }
  const double refined = objective(v, w);

  OracleMultiResult out;
  out.refine_gain = std::max(0.0, best_h - refined);
  if (refined < best_h) {
    best_h = refined;
    best_v = v;
    best_w = w;
  }
  out.h = best_h;
  out.v.resize(p);
  out.w.resize(m);
  for (std::size_t k = 0; k < p; ++k) {
    out.v[k] = x[k] < 0.0 ? -best_v[k] : best_v[k];
  }
  for (std::size_t j = 0; j < m; ++j) {
    out.w[j] = y[j] < 0.0 ? -best_w[j] : best_w[j];
  }
  return out;
}

ShallowParams prox_full(const ShallowParams& params, double lam) {
  ShallowParams out = ShallowParams::zeros(params.hidden(), params.inputs(),
                                           params.outputs());
  for (std::size_t i = 0; i < params.hidden(); ++i) {
    auto res = prox_multi(params.V.row(i), params.W.row(i), lam);
    std::copy(res.v.begin(), res.v.end(), out.V.row(i).begin());
    std::copy(res.w.begin(), res.w.end(), out.W.row(i).begin());
  }
  return out;
}

}  // namespace pathprox
