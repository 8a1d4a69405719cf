#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "numerics.hpp"

namespace pathprox {

/// Weights of one shallow block x -> V^T sigma(W x).
/// V is n x p (hidden x outputs), W is n x m (hidden x inputs).
struct ShallowParams {
  DenseMatrix V;
  DenseMatrix W;

  ShallowParams() = default;
  ShallowParams(DenseMatrix v, DenseMatrix w);
  /// Zero-initialised block with n hidden units, m inputs and p outputs.
  static ShallowParams zeros(std::size_t n, std::size_t m, std::size_t p);
  /// W ~ N(0, 1/m), V ~ N(0, 1/n).
  static ShallowParams random(std::size_t n, std::size_t m, std::size_t p,
                              Rng& rng);

  std::size_t hidden() const noexcept { return W.rows(); }
  std::size_t inputs() const noexcept { return W.cols(); }
  std::size_t outputs() const noexcept { return V.cols(); }

  /// Fraction of entries of (V, W) that are not exactly zero.
  double nnz_fraction() const;

  bool operator==(const ShallowParams&) const = default;
};

/// Euclidean distance between two parameter sets of identical shape.
double params_distance(const ShallowParams& a, const ShallowParams& b);

enum class ActivationKind { kElu, kSoftplus, kIdentity };

double activate(ActivationKind act, double z);
double activate_derivative(ActivationKind act, double z);

std::vector<double> forward(const ShallowParams& params, ActivationKind act,
                            std::span<const double> x);

enum class LossKind { kCrossEntropy, kSquared };

/// Samples are rows of `inputs`. Squared loss regresses onto `targets` when
/// present and onto one-hot labels otherwise.
struct Batch {
  DenseMatrix inputs;
  std::vector<int> labels;
  std::optional<DenseMatrix> targets;

  std::size_t size() const noexcept { return inputs.rows(); }
};

struct LossAndGrad {
  double loss = 0.0;
  DenseMatrix grad_V;
  DenseMatrix grad_W;
};

/// Mean loss over the batch with exact reverse-mode gradients.
LossAndGrad loss_and_grad(const ShallowParams& params, ActivationKind act,
                          const Batch& batch, LossKind loss);

/// Mean loss only.
double batch_loss(const ShallowParams& params, ActivationKind act,
                  const Batch& batch, LossKind loss);

/// Cross-entropy of one sample; `grad_x` (if non-null) receives d loss / d x.
double sample_cross_entropy(const ShallowParams& params, ActivationKind act,
                            std::span<const double> x, int label,
                            std::vector<double>* grad_x = nullptr);

/// Index of the largest output (first one on ties).
int predict(const ShallowParams& params, ActivationKind act,
            std::span<const double> x);

/// Chain of shallow blocks; block l+1 consumes the outputs of block l.
class MultilayerParams {
 public:
  explicit MultilayerParams(std::vector<ShallowParams> blocks);
  /// Pairs consecutive layer matrices (each applied as y = L x) into shallow
  /// blocks: (L1, L2) -> W = L1, V = L2^T. Odd layer counts are rejected.
  static MultilayerParams from_layers(const std::vector<DenseMatrix>& layers);

  const std::vector<ShallowParams>& blocks() const noexcept {
    return blocks_;
  }

 private:
  std::vector<ShallowParams> blocks_;
};

std::vector<double> multilayer_forward(const MultilayerParams& params,
                                       ActivationKind act,
                                       std::span<const double> x);
double multilayer_reg(const MultilayerParams& params);
MultilayerParams multilayer_prox(const MultilayerParams& params, double lam);

}  // namespace pathprox
