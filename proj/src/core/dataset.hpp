#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "model.hpp"
#include "numerics.hpp"

namespace pathprox {

enum class Split { kTrain, kTest };

/// Labelled samples; features are rows scaled into [0, 1].
struct Dataset {
  DenseMatrix features;
  std::vector<int> labels;
  Split split = Split::kTrain;

  std::size_t size() const noexcept { return features.rows(); }
  std::size_t dims() const noexcept { return features.cols(); }
  /// max label + 1 (0 for an empty set).
  std::size_t classes() const;

  Batch batch(const std::vector<std::size_t>& rows) const;
  Batch all() const;
};

/// Per-column min/max used to map raw CSV values into [0, 1].
struct ColumnScaling {
  std::vector<double> min;
  std::vector<double> max;
};

/// Sidecar path holding the scaling of a CSV file.
std::string scaling_sidecar_path(const std::string& csv_path);

/// Label-first CSV. When `<path>.minmax.json` exists its scaling is applied;
/// otherwise per-column min-max is computed from the file and written there.
/// Parse failures report the 1-based line number.
Dataset load_csv(const std::string& path);

/// Writes the features verbatim (round-trip precision) plus an identity
/// sidecar, so load_csv reproduces the dataset exactly.
void write_csv(const std::string& path, const Dataset& data);

/// Two Gaussian blobs in [0, 1]^dims with equal class sizes.
Dataset generate_blobs(std::size_t samples, std::size_t dims,
                       std::uint64_t seed);

/// Shuffles with `seed` and moves the last `test_fraction` of rows to a
/// test split.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data,
                                          double test_fraction,
                                          std::uint64_t seed);

/// PPRX1 binary: "PPRX1", n, m, p as little-endian u64, then V then W
/// row-major as little-endian IEEE doubles.
void save_weights(const std::string& path, const ShallowParams& params);
ShallowParams load_weights(const std::string& path);

}  // namespace pathprox
