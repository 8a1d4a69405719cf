#include "prox_baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace pathprox {

ParsevalConstraint::ParsevalConstraint(double r) : radius(r) {
  if (!(r > 0.0)) {
    throw Error(ErrorKind::kParameter,
                "l1 ball radius must be > 0, got " + std::to_string(r));
  }
}

std::vector<double> soft_threshold(std::span<const double> z, double tau) {
  if (!(tau >= 0.0)) {
    throw Error(ErrorKind::kParameter, "soft_threshold: tau must be >= 0");
  }
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double mag = std::fabs(z[i]) - tau;
    out[i] = mag > 0.0 ? std::copysign(mag, z[i]) : 0.0;
  }
  return out;
}

std::vector<double> project_l1_ball(std::span<const double> v, double r) {
  if (!(r > 0.0)) {
    throw Error(ErrorKind::kParameter, "project_l1_ball: radius must be > 0");
  }
  if (l1_norm(v) <= r) return {v.begin(), v.end()};

  std::vector<double> mags(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mags[i] = std::fabs(v[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  // theta is set by the largest k with mags[k-1] > (sum_{i<k} mags[i] - r) / k.
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumulative += mags[k];
    const double t = (cumulative - r) / static_cast<double>(k + 1);
    if (mags[k] > t) {
      theta = t;
    } else {
      break;
    }
  }
  return soft_threshold(v, std::max(theta, 0.0));
}

DenseMatrix project_linf_opnorm(const DenseMatrix& W, ParsevalConstraint c) {
  DenseMatrix out = W;
  for (std::size_t i = 0; i < W.rows(); ++i) {
    auto projected = project_l1_ball(W.row(i), c.radius);
    std::copy(projected.begin(), projected.end(), out.row(i).begin());
  }
  return out;
}

double linf_opnorm(const DenseMatrix& W) {
  double best = 0.0;
  for (std::size_t i = 0; i < W.rows(); ++i) {
    best = std::max(best, l1_norm(W.row(i)));
  }
  return best;
}

}  // namespace pathprox
