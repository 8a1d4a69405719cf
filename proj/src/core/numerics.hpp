#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathprox {

enum class ErrorKind {
  kInvalidInput,
  kShape,
  kParameter,
  kSingularCandidate,
  kGuard,
  kPrecondition,
  kIo,
  kParse,
};

/// Library-wide exception; `kind()` drives the status code mapping of the C API.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  /// Builds from nested rows; every row must have the same length.
  static DenseMatrix from_rows(
      const std::vector<std::vector<double>>& rows);
  /// Like the data constructor but rejects NaN/Inf entries.
  static DenseMatrix from_external(std::size_t rows, std::size_t cols,
                                   std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  DenseMatrix transposed() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// Descending-magnitude ordering with prefix sums of the sorted magnitudes.
struct MagnitudeOrder {
  std::vector<std::size_t> perm;
  std::vector<double> sorted_abs;
  // prefix[k] = sum of the k largest magnitudes; size len + 1.
  std::vector<double> prefix;

  std::size_t size() const noexcept { return perm.size(); }
};

/// Stable: equal magnitudes keep ascending original index order.
MagnitudeOrder magnitude_order(std::span<const double> v);

/// out[i] = sign(signs_of[i]) * magnitudes[i], with sign(0) = +1.
std::vector<double> apply_signs(std::span<const double> magnitudes,
                                std::span<const double> signs_of);

double l1_norm(std::span<const double> v);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Seeded generator whose stream is identical on every platform. The engine
/// is the standard mt19937_64; the variate transforms are done here because
/// the std distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pathprox
