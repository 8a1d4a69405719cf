#include "optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pathnorm.hpp"
#include "prox_baselines.hpp"
#include "prox_multi.hpp"

namespace pathprox {

namespace {

void check_grad_shapes(const ShallowParams& z, const DenseMatrix& gV,
                       const DenseMatrix& gW) {
  if (gV.rows() != z.V.rows() || gV.cols() != z.V.cols() ||
      gW.rows() != z.W.rows() || gW.cols() != z.W.cols()) {
    throw Error(ErrorKind::kShape, "gradient shape does not match params");
  }
}

ShallowParams gradient_step(const ShallowParams& z, const DenseMatrix& gV,
                            const DenseMatrix& gW, double step) {
  check_grad_shapes(z, gV, gW);
  ShallowParams out = z;
  auto v = out.V.data();
  auto w = out.W.data();
  auto dv = gV.data();
  auto dw = gW.data();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= step * dv[i];
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= step * dw[i];
  return out;
}

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

ShallowParams parseval_project(const ShallowParams& z, double lambda) {
  const ParsevalConstraint c(1.0 / lambda);
  // V^T is the output layer, so its rows are the columns of V.
  return ShallowParams(project_linf_opnorm(z.V.transposed(), c).transposed(),
                       project_linf_opnorm(z.W, c));
}

}  // namespace

void TrainConfig::validate() const {
  if (!(step > 0.0)) throw Error(ErrorKind::kParameter, "step must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::kParameter, "lambda must be finite and >= 0");
  }
  if (reg == RegKind::kParseval && !(lambda > 0.0)) {
    throw Error(ErrorKind::kParameter,
                "Parseval constraint needs lambda > 0 (radius 1/lambda)");
  }
  if (batch == 0) throw Error(ErrorKind::kParameter, "batch must be >= 1");
  if (hidden == 0) throw Error(ErrorKind::kParameter, "hidden must be >= 1");
  if (attack) attack->validate();
}

double reg_value(const ShallowParams& params, RegKind reg) {
  switch (reg) {
    case RegKind::kNone:
    case RegKind::kParseval:
      return 0.0;
    case RegKind::kL1:
      return l1_norm(params.V.data()) + l1_norm(params.W.data());
    case RegKind::kPathNorm:
      return path_norm_1(params);
  }
  return 0.0;
}

ShallowParams apply_regularizer(const ShallowParams& z, RegKind reg,
                                double lambda, double step) {
  switch (reg) {
    case RegKind::kNone:
      return z;
    case RegKind::kL1: {
      const double tau = step * lambda;
      ShallowParams out = z;
      auto v = soft_threshold(z.V.data(), tau);
      auto w = soft_threshold(z.W.data(), tau);
      std::copy(v.begin(), v.end(), out.V.data().begin());
      std::copy(w.begin(), w.end(), out.W.data().begin());
      return out;
    }
    case RegKind::kPathNorm:
      if (lambda == 0.0) return z;
      return prox_full(z, step * lambda);
    case RegKind::kParseval:
      return parseval_project(z, lambda);
  }
  return z;
}

ShallowParams prox_grad_step(const ShallowParams& params,
                             const DenseMatrix& grad_V,
                             const DenseMatrix& grad_W, RegKind reg,
                             double lambda, double step) {
  return apply_regularizer(gradient_step(params, grad_V, grad_W, step), reg,
                           lambda, step);
}

ShallowParams subgradient_step(const ShallowParams& params,
                               const DenseMatrix& grad_V,
                               const DenseMatrix& grad_W, RegKind reg,
                               double lambda, double step) {
  check_grad_shapes(params, grad_V, grad_W);
  DenseMatrix gV = grad_V;
  DenseMatrix gW = grad_W;
  if (lambda != 0.0) {
    if (reg == RegKind::kL1) {
      for (std::size_t i = 0; i < gV.size(); ++i) {
        gV.data()[i] += lambda * sign0(params.V.data()[i]);
      }
      for (std::size_t i = 0; i < gW.size(); ++i) {
        gW.data()[i] += lambda * sign0(params.W.data()[i]);
      }
    } else if (reg == RegKind::kPathNorm) {
      for (std::size_t i = 0; i < params.hidden(); ++i) {
        const double v_row = l1_norm(params.V.row(i));
        const double w_row = l1_norm(params.W.row(i));
        auto gv = gV.row(i);
        auto gw = gW.row(i);
        auto v = params.V.row(i);
        auto w = params.W.row(i);
        for (std::size_t k = 0; k < v.size(); ++k) {
          gv[k] += lambda * sign0(v[k]) * w_row;
        }
        for (std::size_t j = 0; j < w.size(); ++j) {
          gw[j] += lambda * sign0(w[j]) * v_row;
        }
      }
    }
  }
  ShallowParams out = gradient_step(params, gV, gW, step);
  if (reg == RegKind::kParseval) out = parseval_project(out, lambda);
  return out;
}

double QuadraticObjective::value(const ShallowParams& z) const {
  const double d = params_distance(z, anchor_);
  return 0.5 * d * d;
}

double QuadraticObjective::value_and_grad(const ShallowParams& z,
                                          DenseMatrix& grad_V,
                                          DenseMatrix& grad_W) const {
  grad_V = z.V;
  grad_W = z.W;
  for (std::size_t i = 0; i < grad_V.size(); ++i) {
    grad_V.data()[i] -= anchor_.V.data()[i];
  }
  for (std::size_t i = 0; i < grad_W.size(); ++i) {
    grad_W.data()[i] -= anchor_.W.data()[i];
  }
  return value(z);
}

double NetworkObjective::value(const ShallowParams& z) const {
  return batch_loss(z, act_, batch_, loss_);
}

double NetworkObjective::value_and_grad(const ShallowParams& z,
                                        DenseMatrix& grad_V,
                                        DenseMatrix& grad_W) const {
  auto res = loss_and_grad(z, act_, batch_, loss_);
  grad_V = std::move(res.grad_V);
  grad_W = std::move(res.grad_W);
  return res.loss;
}

ProxGradRun run_prox_grad(const SmoothObjective& objective, ShallowParams z0,
                          RegKind reg, double lambda, double step,
                          std::size_t iters) {
  if (iters < 1) throw Error(ErrorKind::kParameter, "iters must be >= 1");
  if (!(step > 0.0)) throw Error(ErrorKind::kParameter, "step must be > 0");
  ProxGradRun run;
  run.records.reserve(iters + 1);
  ShallowParams z = std::move(z0);
  DenseMatrix gV, gW;
  double f = objective.value_and_grad(z, gV, gW);
  double g = reg_value(z, reg);
  run.records.push_back({0, f + lambda * g, f, g, 0.0});
  for (std::size_t k = 1; k <= iters; ++k) {
    ShallowParams next = prox_grad_step(z, gV, gW, reg, lambda, step);
    const double disp = params_distance(next, z);
    z = std::move(next);
    f = objective.value_and_grad(z, gV, gW);
    g = reg_value(z, reg);
    run.records.push_back({k, f + lambda * g, f, g, disp});
  }
  run.final_params = std::move(z);
  return run;
}

bool sufficient_decrease_check(const std::vector<IterateRecord>& records,
                               double eta, double L) {
  if (!(eta > 0.0) || !(eta * L < 1.0)) {
    throw Error(ErrorKind::kPrecondition,
                "sufficient decrease needs 0 < eta < 1/L");
  }
  const double coef = (1.0 - eta * L) / (2.0 * eta);
  for (std::size_t k = 1; k < records.size(); ++k) {
    const double decrease = records[k - 1].F - records[k].F;
    const double d = records[k].displacement;
    if (decrease < coef * d * d - 1e-10) return false;
  }
  return true;
}

bool displacement_bound_check(const std::vector<IterateRecord>& records,
                              double eta, double L, double F_lower) {
  if (!(eta > 0.0) || !(1.0 / eta > L)) {
    throw Error(ErrorKind::kPrecondition,
                "displacement bound needs c = 1/eta > L");
  }
  if (records.size() < 2) return true;
  const double c = 1.0 / eta;
  const auto K = static_cast<double>(records.size() - 1);
  double min_disp = INFINITY;
  for (std::size_t k = 1; k < records.size(); ++k) {
    min_disp = std::min(min_disp, records[k].displacement);
  }
  const double gap = std::max(0.0, records.front().F - F_lower);
  return min_disp <= std::sqrt(2.0 * gap / ((c - L) * K));
}

TrainResult run_stochastic(const Dataset& train, const Dataset* test,
                           const TrainConfig& cfg,
                           std::optional<ShallowParams> init,
                           const EpochCallback& on_epoch) {
  cfg.validate();
  if (train.size() == 0) {
    throw Error(ErrorKind::kInvalidInput, "training set is empty");
  }
  const std::size_t classes = std::max<std::size_t>(
      {train.classes(), test ? test->classes() : 0, std::size_t{2}});
  Rng rng(cfg.seed);
  TrainResult result;
  if (init) {
    if (init->inputs() != train.dims()) {
      throw Error(ErrorKind::kShape, "initial weights do not match data");
    }
    result.params = std::move(*init);
  } else {
    result.params = ShallowParams::random(cfg.hidden, train.dims(), classes, rng);
  }
  ShallowParams& z = result.params;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const Batch full = train.all();
  const Dataset& eval_set = test != nullptr && test->size() > 0 ? *test : train;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double f_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t end = std::min(order.size(), start + cfg.batch);
      const std::vector<std::size_t> rows(order.begin() + start,
                                          order.begin() + end);
      auto lg = loss_and_grad(z, cfg.act, train.batch(rows), cfg.loss);
      f_sum += lg.loss + cfg.lambda * reg_value(z, cfg.reg);
      ++batches;
      z = cfg.optimizer == OptimizerKind::kProximal
              ? prox_grad_step(z, lg.grad_V, lg.grad_W, cfg.reg, cfg.lambda,
                               cfg.step)
              : subgradient_step(z, lg.grad_V, lg.grad_W, cfg.reg, cfg.lambda,
                                 cfg.step);
    }
    EpochMetrics mt;
    mt.epoch = epoch;
    mt.objective = f_sum / static_cast<double>(batches);
    mt.reg_value = reg_value(z, cfg.reg);
    mt.train_objective =
        batch_loss(z, cfg.act, full, cfg.loss) + cfg.lambda * mt.reg_value;
    mt.nnz_fraction = z.nnz_fraction();
    mt.train_error = clean_error(z, cfg.act, train);
    mt.clean_error = clean_error(z, cfg.act, eval_set);
    if (cfg.attack) mt.robust_error = robust_error(z, cfg.act, eval_set, *cfg.attack);
    if (on_epoch) on_epoch(mt);
    result.epochs.push_back(mt);
  }
  return result;
}

}  // namespace pathprox
