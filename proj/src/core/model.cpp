#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pathnorm.hpp"
#include "prox_multi.hpp"

namespace pathprox {

ShallowParams::ShallowParams(DenseMatrix v, DenseMatrix w)
    : V(std::move(v)), W(std::move(w)) {
  if (V.rows() != W.rows()) {
    throw Error(ErrorKind::kShape,
                "V has " + std::to_string(V.rows()) + " rows but W has " +
                    std::to_string(W.rows()));
  }
}

ShallowParams ShallowParams::zeros(std::size_t n, std::size_t m,
                                   std::size_t p) {
  return ShallowParams(DenseMatrix(n, p), DenseMatrix(n, m));
}

ShallowParams ShallowParams::random(std::size_t n, std::size_t m,
                                    std::size_t p, Rng& rng) {
  ShallowParams params = zeros(n, m, p);
  const double w_sd = m == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(m));
  const double v_sd = n == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(n));
  for (double& x : params.W.data()) x = rng.normal(0.0, w_sd);
  for (double& x : params.V.data()) x = rng.normal(0.0, v_sd);
  return params;
}

double ShallowParams::nnz_fraction() const {
  const std::size_t total = V.size() + W.size();
  if (total == 0) return 0.0;
  std::size_t nnz = 0;
  for (double x : V.data()) nnz += x != 0.0;
  for (double x : W.data()) nnz += x != 0.0;
  return static_cast<double>(nnz) / static_cast<double>(total);
}

double params_distance(const ShallowParams& a, const ShallowParams& b) {
  return std::sqrt(squared_distance(a.V.data(), b.V.data()) +
                   squared_distance(a.W.data(), b.W.data()));
}

double activate(ActivationKind act, double z) {
  switch (act) {
    case ActivationKind::kElu:
      return z > 0.0 ? z : std::expm1(z);
    case ActivationKind::kSoftplus:
      // log(1 + e^z) without overflow.
      return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    case ActivationKind::kIdentity:
      return z;
  }
  return z;
}

double activate_derivative(ActivationKind act, double z) {
  switch (act) {
    case ActivationKind::kElu:
      return z > 0.0 ? 1.0 : std::exp(z);
    case ActivationKind::kSoftplus:
      return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                      : std::exp(z) / (1.0 + std::exp(z));
    case ActivationKind::kIdentity:
      return 1.0;
  }
  return 1.0;
}

namespace {

void check_input(const ShallowParams& params, std::span<const double> x) {
  if (x.size() != params.inputs()) {
    throw Error(ErrorKind::kShape,
                "input length " + std::to_string(x.size()) +
                    " does not match " + std::to_string(params.inputs()));
  }
}

// Pre-activations z = W x.
std::vector<double> hidden_preact(const ShallowParams& params,
                                  std::span<const double> x) {
  std::vector<double> z(params.hidden(), 0.0);
  for (std::size_t i = 0; i < params.hidden(); ++i) {
    auto w = params.W.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
    z[i] = s;
  }
  return z;
}

std::vector<double> output_from_hidden(const ShallowParams& params,
                                       std::span<const double> a) {
  std::vector<double> out(params.outputs(), 0.0);
  for (std::size_t i = 0; i < params.hidden(); ++i) {
    if (a[i] == 0.0) continue;
    auto v = params.V.row(i);
    for (std::size_t k = 0; k < v.size(); ++k) out[k] += v[k] * a[i];
  }
  return out;
}

// Returns the loss of one sample and writes d loss / d output into `dout`.
double output_loss(std::span<const double> out, int label,
                   const std::optional<DenseMatrix>& targets, std::size_t row,
                   LossKind loss, std::vector<double>& dout) {
  const std::size_t p = out.size();
  dout.assign(p, 0.0);
  if (loss == LossKind::kCrossEntropy) {
    const double mx = *std::max_element(out.begin(), out.end());
    double z = 0.0;
    for (double o : out) z += std::exp(o - mx);
    const double lse = mx + std::log(z);
    for (std::size_t k = 0; k < p; ++k) dout[k] = std::exp(out[k] - lse);
    dout[static_cast<std::size_t>(label)] -= 1.0;
    return lse - out[static_cast<std::size_t>(label)];
  }
  double l = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    const double t = targets ? (*targets)(row, k)
                             : (static_cast<int>(k) == label ? 1.0 : 0.0);
    const double d = out[k] - t;
    dout[k] = d;
    l += 0.5 * d * d;
  }
  return l;
}

void check_batch(const ShallowParams& params, const Batch& batch,
                 LossKind loss) {
  if (batch.inputs.cols() != params.inputs()) {
    throw Error(ErrorKind::kShape, "batch feature count does not match W");
  }
  if (batch.labels.size() != batch.size()) {
    throw Error(ErrorKind::kShape, "label count does not match batch size");
  }
  if (batch.targets && (batch.targets->rows() != batch.size() ||
                        batch.targets->cols() != params.outputs())) {
    throw Error(ErrorKind::kShape, "target matrix shape mismatch");
  }
  const bool need_labels =
      loss == LossKind::kCrossEntropy || !batch.targets.has_value();
  if (need_labels) {
    for (int label : batch.labels) {
      if (label < 0 || static_cast<std::size_t>(label) >= params.outputs()) {
        throw Error(ErrorKind::kInvalidInput,
                    "label " + std::to_string(label) + " out of range [0, " +
                        std::to_string(params.outputs()) + ")");
      }
    }
  }
}

}  // namespace

std::vector<double> forward(const ShallowParams& params, ActivationKind act,
                            std::span<const double> x) {
  check_input(params, x);
  auto a = hidden_preact(params, x);
  for (double& z : a) z = activate(act, z);
  return output_from_hidden(params, a);
}

LossAndGrad loss_and_grad(const ShallowParams& params, ActivationKind act,
                          const Batch& batch, LossKind loss) {
  check_batch(params, batch, loss);
  const std::size_t n = params.hidden();
  const std::size_t m = params.inputs();
  const std::size_t p = params.outputs();
  LossAndGrad res{0.0, DenseMatrix(n, p), DenseMatrix(n, m)};
  if (batch.size() == 0) return res;

  std::vector<double> a(n), da(n), dout;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    auto x = batch.inputs.row(b);
    auto z = hidden_preact(params, x);
    for (std::size_t i = 0; i < n; ++i) a[i] = activate(act, z[i]);
    auto out = output_from_hidden(params, a);
    res.loss += output_loss(out, batch.labels[b], batch.targets, b, loss, dout);

    for (std::size_t i = 0; i < n; ++i) {
      auto v = params.V.row(i);
      auto gv = res.grad_V.row(i);
      double back = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        gv[k] += a[i] * dout[k];
        back += v[k] * dout[k];
      }
      da[i] = back * activate_derivative(act, z[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (da[i] == 0.0) continue;
      auto gw = res.grad_W.row(i);
      for (std::size_t j = 0; j < m; ++j) gw[j] += da[i] * x[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  res.loss *= inv;
  for (double& g : res.grad_V.data()) g *= inv;
  for (double& g : res.grad_W.data()) g *= inv;
  return res;
}

double batch_loss(const ShallowParams& params, ActivationKind act,
                  const Batch& batch, LossKind loss) {
  check_batch(params, batch, loss);
  if (batch.size() == 0) return 0.0;
  double total = 0.0;
  std::vector<double> dout;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    auto out = forward(params, act, batch.inputs.row(b));
    total += output_loss(out, batch.labels[b], batch.targets, b, loss, dout);
  }
  return total / static_cast<double>(batch.size());
}

double sample_cross_entropy(const ShallowParams& params, ActivationKind act,
                            std::span<const double> x, int label,
                            std::vector<double>* grad_x) {
  check_input(params, x);
  if (label < 0 || static_cast<std::size_t>(label) >= params.outputs()) {
    throw Error(ErrorKind::kInvalidInput, "label out of range");
  }
  const std::size_t n = params.hidden();
  auto z = hidden_preact(params, x);
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = activate(act, z[i]);
  auto out = output_from_hidden(params, a);
  std::vector<double> dout;
  const double l =
      output_loss(out, label, std::nullopt, 0, LossKind::kCrossEntropy, dout);
  if (grad_x != nullptr) {
    grad_x->assign(params.inputs(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto v = params.V.row(i);
      double back = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) back += v[k] * dout[k];
      back *= activate_derivative(act, z[i]);
      if (back == 0.0) continue;
      auto w = params.W.row(i);
      for (std::size_t j = 0; j < w.size(); ++j) (*grad_x)[j] += back * w[j];
    }
  }
  return l;
}

int predict(const ShallowParams& params, ActivationKind act,
            std::span<const double> x) {
  auto out = forward(params, act, x);
  if (out.empty()) throw Error(ErrorKind::kShape, "network has no outputs");
  return static_cast<int>(std::max_element(out.begin(), out.end()) -
                          out.begin());
}

MultilayerParams::MultilayerParams(std::vector<ShallowParams> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) {
    throw Error(ErrorKind::kShape, "multilayer network needs a block");
  }
  for (std::size_t l = 0; l + 1 < blocks_.size(); ++l) {
    if (blocks_[l].outputs() != blocks_[l + 1].inputs()) {
      throw Error(ErrorKind::kShape,
                  "block " + std::to_string(l) + " emits " +
                      std::to_string(blocks_[l].outputs()) +
                      " values but block " + std::to_string(l + 1) +
                      " expects " + std::to_string(blocks_[l + 1].inputs()));
    }
  }
}

MultilayerParams MultilayerParams::from_layers(
    const std::vector<DenseMatrix>& layers) {
  if (layers.size() % 2 != 0) {
    throw Error(ErrorKind::kShape,
                "layer count must be even to pair layers into blocks");
  }
  std::vector<ShallowParams> blocks;
  for (std::size_t l = 0; l < layers.size(); l += 2) {
    blocks.emplace_back(layers[l + 1].transposed(), layers[l]);
  }
  return MultilayerParams(std::move(blocks));
}

std::vector<double> multilayer_forward(const MultilayerParams& params,
                                       ActivationKind act,
                                       std::span<const double> x) {
  std::vector<double> cur(x.begin(), x.end());
  const auto& blocks = params.blocks();
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    if (l > 0) {
      for (double& c : cur) c = activate(act, c);
    }
    cur = forward(blocks[l], act, cur);
  }
  return cur;
}

double multilayer_reg(const MultilayerParams& params) {
  double s = 0.0;
  for (const auto& block : params.blocks()) s += path_norm_1(block);
  return s;
}

MultilayerParams multilayer_prox(const MultilayerParams& params, double lam) {
  std::vector<ShallowParams> out;
  out.reserve(params.blocks().size());
  for (const auto& block : params.blocks()) {
    out.push_back(prox_full(block, lam));
  }
  return MultilayerParams(std::move(out));
}

}  // namespace pathprox
