#include "numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace pathprox {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorKind::kShape,
                "matrix data length " + std::to_string(data_.size()) +
                    " does not match " + std::to_string(rows_) + "x" +
                    std::to_string(cols_));
  }
}

DenseMatrix DenseMatrix::from_rows(
    const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) {
      throw Error(ErrorKind::kShape, "ragged rows");
    }
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(data));
}

DenseMatrix DenseMatrix::from_external(std::size_t rows, std::size_t cols,
                                       std::vector<double> data) {
  for (double x : data) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::kInvalidInput, "non-finite matrix entry");
    }
  }
  return DenseMatrix(rows, cols, std::move(data));
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      t(c, r) = (*this)(r, c);
    }
  }
  return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::kShape,
                "matmul: inner dimensions " + std::to_string(a.cols()) +
                    " and " + std::to_string(b.rows()) + " differ");
  }
  DenseMatrix out(a.rows(), b.cols());
  // i-k-j order keeps the inner loop contiguous in both b and out.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out_row[j] += aik * b_row[j];
      }
    }
  }
  return out;
}

MagnitudeOrder magnitude_order(std::span<const double> v) {
  MagnitudeOrder order;
  const std::size_t n = v.size();
  for (double x : v) {
    if (std::isnan(x)) {
      throw Error(ErrorKind::kInvalidInput, "magnitude_order: NaN entry");
    }
  }
  // Sorting contiguous (magnitude, index) pairs keeps the comparisons in
  // cache; the index tie-break reproduces a stable order.
  std::vector<std::pair<double, std::size_t>> keyed(n);
  for (std::size_t i = 0; i < n; ++i) keyed[i] = {std::fabs(v[i]), i};
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  order.perm.resize(n);
  order.sorted_abs.resize(n);
  order.prefix.resize(n + 1);
  order.prefix[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    order.perm[k] = keyed[k].second;
    order.sorted_abs[k] = keyed[k].first;
    order.prefix[k + 1] = order.prefix[k] + order.sorted_abs[k];
  }
  return order;
}

std::vector<double> apply_signs(std::span<const double> magnitudes,
                                std::span<const double> signs_of) {
  if (magnitudes.size() != signs_of.size()) {
    throw Error(ErrorKind::kShape, "apply_signs: length mismatch");
  }
  std::vector<double> out(magnitudes.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (magnitudes[i] < 0.0) {
      throw Error(ErrorKind::kInvalidInput, "apply_signs: negative magnitude");
    }
    out[i] = signs_of[i] < 0.0 ? -magnitudes[i] : magnitudes[i];
  }
  return out;
}

double l1_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return s;
}

double squared_distance(std::span<const double> a,
                        std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kShape, "squared_distance: length mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::kParameter, "Rng::index: empty range");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return static_cast<std::size_t>(r % bound);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

}  // namespace pathprox
