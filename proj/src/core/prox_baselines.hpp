#pragma once

#include <span>
#include <vector>

#include "numerics.hpp"

namespace pathprox {

/// Radius bound on the max row l1 norm of a weight matrix.
struct ParsevalConstraint {
  double radius;

  explicit ParsevalConstraint(double r);
};

/// sign(z_i) * max(|z_i| - tau, 0).
std::vector<double> soft_threshold(std::span<const double> z, double tau);

/// Euclidean projection onto {u : ||u||_1 <= r}, sort-based.
std::vector<double> project_l1_ball(std::span<const double> v, double r);

/// Projects every row of W onto the l1 ball of the given radius, which
/// bounds ||W||_inf by the radius.
DenseMatrix project_linf_opnorm(const DenseMatrix& W, ParsevalConstraint c);

/// Largest row l1 norm.
double linf_opnorm(const DenseMatrix& W);

}  // namespace pathprox
