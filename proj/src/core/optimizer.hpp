#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "attack.hpp"
#include "dataset.hpp"
#include "model.hpp"

namespace pathprox {

enum class RegKind { kNone, kL1, kPathNorm, kParseval };

/// kProximal applies the regulariser through its proximal operator;
/// kSubgradient adds lambda times an almost-everywhere gradient of it (0 at
/// kinks), which is what plain autodiff training does.
enum class OptimizerKind { kProximal, kSubgradient };

struct TrainConfig {
  RegKind reg = RegKind::kNone;
  double lambda = 0.0;
  double step = 0.05;
  std::size_t epochs = 20;
  std::size_t batch = 100;
  std::uint64_t seed = 1;
  LossKind loss = LossKind::kCrossEntropy;
  ActivationKind act = ActivationKind::kElu;
  OptimizerKind optimizer = OptimizerKind::kProximal;
  std::size_t hidden = 200;
  // When set, robust error on the test split is measured every epoch.
  std::optional<AttackConfig> attack;

  void validate() const;
};

/// Regulariser value g (without the lambda factor). Parseval is a hard
/// constraint and contributes 0 on its feasible set.
double reg_value(const ShallowParams& params, RegKind reg);

/// prox of step*lambda*g (or the projection, for Parseval).
ShallowParams apply_regularizer(const ShallowParams& z, RegKind reg,
                                double lambda, double step);

/// z+ = prox_{step*lambda*g}(z - step * grad).
ShallowParams prox_grad_step(const ShallowParams& params,
                             const DenseMatrix& grad_V,
                             const DenseMatrix& grad_W, RegKind reg,
                             double lambda, double step);

/// z+ = z - step * (grad + lambda * dg), Parseval still projected.
ShallowParams subgradient_step(const ShallowParams& params,
                               const DenseMatrix& grad_V,
                               const DenseMatrix& grad_W, RegKind reg,
                               double lambda, double step);

/// Smooth part f of the composite objective.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;
  virtual double value(const ShallowParams& z) const = 0;
  virtual double value_and_grad(const ShallowParams& z, DenseMatrix& grad_V,
                                DenseMatrix& grad_W) const = 0;
};

/// f(z) = 1/2 ||z - anchor||^2; its gradient is 1-Lipschitz.
class QuadraticObjective final : public SmoothObjective {
 public:
  explicit QuadraticObjective(ShallowParams anchor)
      : anchor_(std::move(anchor)) {}

  double value(const ShallowParams& z) const override;
  double value_and_grad(const ShallowParams& z, DenseMatrix& grad_V,
                        DenseMatrix& grad_W) const override;

 private:
  ShallowParams anchor_;
};

/// Mean loss of the network over a fixed batch.
class NetworkObjective final : public SmoothObjective {
 public:
  NetworkObjective(Batch batch, ActivationKind act, LossKind loss)
      : batch_(std::move(batch)), act_(act), loss_(loss) {}

  double value(const ShallowParams& z) const override;
  double value_and_grad(const ShallowParams& z, DenseMatrix& grad_V,
                        DenseMatrix& grad_W) const override;

 private:
  Batch batch_;
  ActivationKind act_;
  LossKind loss_;
};

/// State of iterate k: F = f + lambda * g, and the displacement
/// ||z^k - z^{k-1}||_2 (0 for k = 0).
struct IterateRecord {
  std::size_t k = 0;
  double F = 0.0;
  double f = 0.0;
  double g = 0.0;
  double displacement = 0.0;
};

struct ProxGradRun {
  std::vector<IterateRecord> records;  // iters + 1 entries
  ShallowParams final_params;
};

/// Full-gradient proximal gradient method with constant step.
ProxGradRun run_prox_grad(const SmoothObjective& objective, ShallowParams z0,
                          RegKind reg, double lambda, double step,
                          std::size_t iters);

/// F(z^{k-1}) - F(z^k) >= (1 - eta L) / (2 eta) * ||z^k - z^{k-1}||^2 for
/// every consecutive pair, with 1e-10 slack. Throws kPrecondition unless
/// eta < 1/L.
bool sufficient_decrease_check(const std::vector<IterateRecord>& records,
                               double eta, double L);

/// min_k ||z^k - z^{k-1}|| <= sqrt(2 (F(z^0) - F_lower) / ((1/eta - L) K))
/// with K the number of steps. Throws kPrecondition unless 1/eta > L.
bool displacement_bound_check(const std::vector<IterateRecord>& records,
                              double eta, double L, double F_lower);

struct EpochMetrics {
  std::size_t epoch = 0;        // 1-based
  double objective = 0.0;       // mean minibatch F over the epoch
  double train_objective = 0.0; // F on the full training set at epoch end
  double reg_value = 0.0;       // g at epoch end
  double nnz_fraction = 0.0;    // exact nonzeros over all weights
  double train_error = 0.0;
  double clean_error = 0.0;     // on the test split (train split if none)
  std::optional<double> robust_error;
};

struct TrainResult {
  ShallowParams params;
  std::vector<EpochMetrics> epochs;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Minibatch training, reshuffled every epoch from `cfg.seed`. Weights are
/// drawn from the same seed unless `init` is given.
TrainResult run_stochastic(const Dataset& train, const Dataset* test,
                           const TrainConfig& cfg,
                           std::optional<ShallowParams> init = std::nullopt,
                           const EpochCallback& on_epoch = {});

}  // namespace pathprox
