#include "prox_single.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace pathprox {

namespace {

double clamp_noise(double value) {
  return (value > -kFeasibilityClamp && value <= 0.0) ? 0.0 : value;
}

void check_lambda(double lam) {
  if (!(lam >= 0.0) || !std::isfinite(lam)) {
    throw Error(ErrorKind::kParameter,
                "prox coefficient must be finite and >= 0, got " +
                    std::to_string(lam));
  }
}

void check_finite(double x, std::span<const double> y) {
  if (!std::isfinite(x)) {
    throw Error(ErrorKind::kInvalidInput, "prox input x is not finite");
  }
  for (double yj : y) {
    if (!std::isfinite(yj)) {
      throw Error(ErrorKind::kInvalidInput, "prox input y is not finite");
    }
  }
}

// v^(s) from prefix sums, before any clamping.
double candidate_v(std::size_t s, const MagnitudeOrder& order, double x_abs,
                   double lam) {
  const double denom = 1.0 - static_cast<double>(s) * lam * lam;
  return (x_abs - lam * order.prefix[s]) / denom;
}

// O(1) feasibility test used by the binary search.
bool feasible_at(std::size_t s, const MagnitudeOrder& order, double x_abs,
                 double lam) {
  const double v = clamp_noise(candidate_v(s, order, x_abs, lam));
  if (!(v > 0.0)) return false;
  if (s == 0) return true;
  const double w_last = clamp_noise(order.sorted_abs[s - 1] - lam * v);
  return w_last > 0.0;
}

}  // namespace

double h_single(double v, std::span<const double> w, double x_abs,
                std::span<const double> y_abs, double lam) {
  if (w.size() != y_abs.size()) {
    throw Error(ErrorKind::kShape, "h_single: w and y lengths differ");
  }
  const double dv = v - x_abs;
  double fit = 0.5 * dv * dv;
  double w_sum = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double d = w[j] - y_abs[j];
    fit += 0.5 * d * d;
    w_sum += w[j];
  }
  return fit + lam * v * w_sum;
}

ProxCandidateSingle candidate(std::size_t s, const MagnitudeOrder& order_y,
                              double x_abs, double lam) {
  const std::size_t m = order_y.size();
  if (s > m) {
    throw Error(ErrorKind::kParameter,
                "sparsity " + std::to_string(s) + " exceeds m = " +
                    std::to_string(m));
  }
  if (!(1.0 - static_cast<double>(s) * lam * lam > 0.0)) {
    throw Error(ErrorKind::kSingularCandidate,
                "1 - s*lam^2 <= 0 for s = " + std::to_string(s));
  }
  ProxCandidateSingle c;
  c.s = s;
  c.v = clamp_noise(candidate_v(s, order_y, x_abs, lam));
  c.w.assign(m, 0.0);
  for (std::size_t j = 0; j < s; ++j) {
    c.w[j] = clamp_noise(order_y.sorted_abs[j] - lam * c.v);
  }
  c.h = h_single(c.v, c.w, x_abs, order_y.sorted_abs, lam);
  return c;
}

bool is_feasible(const ProxCandidateSingle& c) {
  if (!(c.v > 0.0)) return false;
  return c.s == 0 || c.w[c.s - 1] > 0.0;
}

std::size_t sparsity_cap(double lam, std::size_t m) {
  const double lam2 = lam * lam;
  std::size_t cap;
  if (lam2 * static_cast<double>(m) < 1.0) {
    cap = m;
  } else {
    cap = std::min(m, static_cast<std::size_t>(std::floor(1.0 / lam2)));
  }
  while (cap > 0 && !(1.0 - static_cast<double>(cap) * lam2 > 0.0)) --cap;
  return cap;
}

ProxSingleResult prox_single(double x, std::span<const double> y, double lam,
                             SelectionRule rule) {
  check_lambda(lam);
  check_finite(x, y);
  const std::size_t m = y.size();
  if (lam == 0.0) {
    return {x, std::vector<double>(y.begin(), y.end())};
  }

  // Only the sorted magnitudes and their prefix sums are needed: the support
  // of the winner is recovered from its threshold without a permutation.
  MagnitudeOrder order;
  order.sorted_abs.resize(m);
  for (std::size_t j = 0; j < m; ++j) order.sorted_abs[j] = std::fabs(y[j]);
  std::sort(order.sorted_abs.begin(), order.sorted_abs.end(),
            std::greater<>());
  order.prefix.resize(m + 1);
  order.prefix[0] = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    order.prefix[k + 1] = order.prefix[k] + order.sorted_abs[k];
  }
  const auto& a = order.sorted_abs;
  const double x_abs = std::fabs(x);

  // Feasibility is downward closed in s, so the largest feasible sparsity
  // is found by bisection on [0, cap].
  const std::size_t cap = sparsity_cap(lam, m);
  const bool have_candidate = feasible_at(0, order, x_abs, lam);
  std::size_t s = 0;
  if (have_candidate) {
    std::size_t hi = cap;
    while (s < hi) {
      const std::size_t mid = s + (hi - s + 1) / 2;
      if (feasible_at(mid, order, x_abs, lam)) {
        s = mid;
      } else {
        hi = mid - 1;
      }
    }
  }

  bool take_candidate = false;
  double v = 0.0;
  if (have_candidate) {
    v = clamp_noise(candidate_v(s, order, x_abs, lam));
    // h of candidate s, accumulated in sorted order exactly as h_single does.
    const double dv = v - x_abs;
    double h = 0.5 * dv * dv;
    double w_sum = 0.0;
    std::size_t w_nnz = 0, y_nnz = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const double wk = k < s ? clamp_noise(a[k] - lam * v) : 0.0;
      const double d = wk - a[k];
      h += 0.5 * d * d;
      w_sum += wk;
      w_nnz += wk != 0.0;
      y_nnz += a[k] != 0.0;
    }
    h += lam * v * w_sum;

    const double h_trivial = 0.5 * x_abs * x_abs;
    const double tol = 1e-12 * std::max(1.0, std::fabs(h_trivial));
    const double diff = h - h_trivial;
    if (rule == SelectionRule::kInvertedForTesting) {
      take_candidate = diff > 0.0;
    } else if (std::fabs(diff) <= tol) {
      // Tie: prefer the sparser w.
      take_candidate = w_nnz < y_nnz;
    } else {
      take_candidate = diff < 0.0;
    }
  }

  ProxSingleResult out;
  if (!take_candidate) {
    out.v = 0.0;
    out.w.assign(y.begin(), y.end());
    return out;
  }
  // The top s magnitudes in stable order: everything above the threshold,
  // then the lowest-index entries equal to it.
  out.w.assign(m, 0.0);
  if (s > 0) {
    const double t = a[s - 1];
    std::size_t ties = s - static_cast<std::size_t>(
                               std::lower_bound(a.begin(), a.begin() + s, t,
                                                std::greater<>()) -
                               a.begin());
    const double shift = lam * v;
    for (std::size_t j = 0; j < m; ++j) {
      const double mag = std::fabs(y[j]);
      bool in = mag > t;
      if (!in && mag == t && ties > 0) {
        in = true;
        --ties;
      }
      const double wj = in ? clamp_noise(mag - shift) : 0.0;
      out.w[j] = y[j] < 0.0 ? -wj : wj;
    }
  }
  out.v = x < 0.0 ? -v : v;
  return out;
}

OracleSingleResult prox_single_oracle(double x, std::span<const double> y,
                                      double lam) {
  check_lambda(lam);
  check_finite(x, y);
  const std::size_t m = y.size();
  if (m > kOracleSingleMaxM) {
    throw Error(ErrorKind::kGuard,
                "oracle limited to m <= " + std::to_string(kOracleSingleMaxM));
  }
  const double ax = std::fabs(x);
  std::vector<double> ay(m);
  for (std::size_t j = 0; j < m; ++j) ay[j] = std::fabs(y[j]);

  auto objective = [&](double v, const std::vector<double>& w) {
    double val = 0.5 * (v - ax) * (v - ax);
    double sw = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      val += 0.5 * (w[j] - ay[j]) * (w[j] - ay[j]);
      sw += w[j];
    }
    return val + lam * v * sw;
  };

  // Indices by decreasing |y|; insertion sort is plenty for m <= 20.
  std::vector<std::size_t> idx(m);
  for (std::size_t j = 0; j < m; ++j) idx[j] = j;
  for (std::size_t a = 1; a < m; ++a) {
    for (std::size_t b = a; b > 0 && ay[idx[b]] > ay[idx[b - 1]]; --b) {
      std::swap(idx[b], idx[b - 1]);
    }
  }

  double best_v = 0.0;
  std::vector<double> best_w = ay;
  double best_h = objective(best_v, best_w);

  for (std::size_t s = 0; s <= m; ++s) {
    const double denom = 1.0 - static_cast<double>(s) * lam * lam;
    if (std::fabs(denom) < 1e-12) continue;
    double top = 0.0;
    for (std::size_t k = 0; k < s; ++k) top += ay[idx[k]];
    double v = (ax - lam * top) / denom;
    if (v < -1e-12) continue;
    v = std::max(v, 0.0);
    std::vector<double> w(m, 0.0);
    bool ok = true;
    for (std::size_t k = 0; k < s; ++k) {
      const double wk = ay[idx[k]] - lam * v;
      if (wk < -1e-12) {
        ok = false;
        break;
      }
      w[idx[k]] = std::max(wk, 0.0);
    }
    if (!ok) continue;
    const double h = objective(v, w);
    if (h < best_h) {
      best_h = h;
      best_v = v;
      best_w = w;
    }
  }

  // Projected gradient descent on the nonnegative orthant.
  double v = best_v;
  std::vector<double> w = best_w;
  // The Hessian of h has spectral norm 1 + lam sqrt(m); 1/L steps descend.
  const double step = 1.0 / (1.0 + lam * std::sqrt(static_cast<double>(m)));
  for (int it = 0; it < 1000; ++it) {
    double sw = 0.0;
    for (double wj : w) sw += wj;
    const double gv = (v - ax) + lam * sw;
    for (std::size_t j = 0; j < m; ++j) {
      const double gw = (w[j] - ay[j]) + lam * v;
      w[j] = std::max(0.0, w[j] - step * gw);
    }
    v = std::max(0.0, v - step * gv);
  }
  const double refined = objective(v, w);

  OracleSingleResult out;
  out.refine_gain = std::max(0.0, best_h - refined);
  if (refined < best_h) {
    best_h = refined;
    best_v = v;
    best_w = w;
  }
  out.h = best_h;
  out.v = x < 0.0 ? -best_v : best_v;
  out.w.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    out.w[j] = y[j] < 0.0 ? -best_w[j] : best_w[j];
  }
  return out;
}

std::pair<std::vector<double>, DenseMatrix> prox_block_single(
    std::span<const double> v_in, const DenseMatrix& W_in, double lam) {
  if (v_in.size() != W_in.rows()) {
    throw Error(ErrorKind::kShape,
                "prox_block_single: v has " + std::to_string(v_in.size()) +
                    " entries but W has " + std::to_string(W_in.rows()) +
                    " rows");
  }
  std::vector<double> v_out(v_in.size());
  DenseMatrix W_out(W_in.rows(), W_in.cols());
  for (std::size_t i = 0; i < v_in.size(); ++i) {
    auto res = prox_single(v_in[i], W_in.row(i), lam);
    v_out[i] = res.v;
    std::copy(res.w.begin(), res.w.end(), W_out.row(i).begin());
  }
  return {std::move(v_out), std::move(W_out)};
}

}  // namespace pathprox
