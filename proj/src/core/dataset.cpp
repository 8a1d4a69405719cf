#include "dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace pathprox {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& why) {
  throw Error(ErrorKind::kParse,
              path + ":" + std::to_string(line) + ": " + why);
}

ColumnScaling read_sidecar(const std::string& path, std::size_t dims) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  ColumnScaling s;
  try {
    s.min = j.at("min").get<std::vector<double>>();
    s.max = j.at("max").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  if (s.min.size() != dims || s.max.size() != dims) {
    throw Error(ErrorKind::kParse,
                path + ": scaling has wrong column count");
  }
  return s;
}

void write_sidecar(const std::string& path, const ColumnScaling& s) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  nlohmann::json j;
  j["min"] = s.min;
  j["max"] = s.max;
  out << j.dump() << "\n";
}

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in, const std::string& path) {
  std::array<unsigned char, 8> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) {
    throw Error(ErrorKind::kParse, path + ": truncated weight header");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_double(std::ostream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  put_u64(out, bits);
}

double get_double(std::istream& in, const std::string& path) {
  const std::uint64_t bits = get_u64(in, path);
  double d;
  std::memcpy(&d, &bits, sizeof d);
  return d;
}

constexpr char kMagic[5] = {'P', 'P', 'R', 'X', '1'};

}  // namespace

std::size_t Dataset::classes() const {
  if (labels.empty()) return 0;
  return static_cast<std::size_t>(
             *std::max_element(labels.begin(), labels.end())) +
         1;
}

Batch Dataset::batch(const std::vector<std::size_t>& rows) const {
  Batch b{DenseMatrix(rows.size(), dims()), {}, std::nullopt};
  b.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto src = features.row(rows[r]);
    std::copy(src.begin(), src.end(), b.inputs.row(r).begin());
    b.labels.push_back(labels[rows[r]]);
  }
  return b;
}

Batch Dataset::all() const { return Batch{features, labels, std::nullopt}; }

std::string scaling_sidecar_path(const std::string& csv_path) {
  return csv_path + ".minmax.json";
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t dims = 0;
  bool have_dims = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() < 2) parse_fail(path, line_no, "need a label and features");
    if (!have_dims) {
      dims = cells.size() - 1;
      have_dims = true;
    } else if (cells.size() - 1 != dims) {
      parse_fail(path, line_no,
                 "expected " + std::to_string(dims) + " features, got " +
                     std::to_string(cells.size() - 1));
    }
    char* end = nullptr;
    errno = 0;
    const long label = std::strtol(cells[0].c_str(), &end, 10);
    if (cells[0].empty() || *end != '\0' || errno != 0 || label < 0 ||
        label > 1'000'000) {
      parse_fail(path, line_no, "bad label '" + cells[0] + "'");
    }
    labels.push_back(static_cast<int>(label));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      errno = 0;
      const double v = std::strtod(cells[c].c_str(), &end);
      if (cells[c].empty() || *end != '\0' || errno == ERANGE ||
          !std::isfinite(v)) {
        parse_fail(path, line_no,
                   "bad value '" + cells[c] + "' in column " +
                       std::to_string(c + 1));
      }
      values.push_back(v);
    }
  }
  if (labels.empty()) throw Error(ErrorKind::kParse, path + ": no samples");

  const std::size_t n = labels.size();
  const std::string sidecar = scaling_sidecar_path(path);
  ColumnScaling scaling;
  if (std::filesystem::exists(sidecar)) {
    scaling = read_sidecar(sidecar, dims);
  } else {
    scaling.min.assign(dims, INFINITY);
    scaling.max.assign(dims, -INFINITY);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < dims; ++c) {
        const double v = values[r * dims + c];
        scaling.min[c] = std::min(scaling.min[c], v);
        scaling.max[c] = std::max(scaling.max[c], v);
      }
    }
    write_sidecar(sidecar, scaling);
  }

  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < dims; ++c) {
      double& v = values[r * dims + c];
      const double span = scaling.max[c] - scaling.min[c];
      v = span > 0.0 ? (v - scaling.min[c]) / span : 0.0;
      v = std::clamp(v, 0.0, 1.0);
    }
  }
  Dataset data;
  data.features = DenseMatrix(n, dims, std::move(values));
  data.labels = std::move(labels);
  return data;
}

void write_csv(const std::string& path, const Dataset& data) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw Error(ErrorKind::kIo, "cannot write " + path);
  for (std::size_t r = 0; r < data.size(); ++r) {
    std::fprintf(f, "%d", data.labels[r]);
    for (double v : data.features.row(r)) {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      std::fprintf(f, ",%.*s", static_cast<int>(res.ptr - buf), buf);
    }
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw Error(ErrorKind::kIo, "cannot write " + path);
  write_sidecar(scaling_sidecar_path(path),
                ColumnScaling{std::vector<double>(data.dims(), 0.0),
                              std::vector<double>(data.dims(), 1.0)});
}

Dataset generate_blobs(std::size_t samples, std::size_t dims,
                       std::uint64_t seed) {
  Rng rng(seed);
  // Centres mirror each other around 0.5, so the classes overlap.
  std::vector<double> offset(dims);
  for (double& d : offset) d = rng.uniform(-0.05, 0.05);
  constexpr double kSpread = 0.15;
  Dataset data;
  data.features = DenseMatrix(samples, dims);
  data.labels.resize(samples);
  for (std::size_t r = 0; r < samples; ++r) {
    const int label = static_cast<int>(r % 2);
    data.labels[r] = label;
    const double sign = label == 0 ? 1.0 : -1.0;
    auto row = data.features.row(r);
    for (std::size_t c = 0; c < dims; ++c) {
      row[c] = std::clamp(rng.normal(0.5 + sign * offset[c], kSpread), 0.0,
                          1.0);
    }
  }
  return data;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data,
                                          double test_fraction,
                                          std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::kParameter, "test fraction must be in [0, 1)");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  const auto n_test = static_cast<std::size_t>(
      std::floor(test_fraction * static_cast<double>(data.size())));
  const std::size_t n_train = data.size() - n_test;

  auto take = [&](std::size_t from, std::size_t count, Split split) {
    Dataset d;
    d.split = split;
    d.features = DenseMatrix(count, data.dims());
    d.labels.resize(count);
    for (std::size_t r = 0; r < count; ++r) {
      auto src = data.features.row(order[from + r]);
      std::copy(src.begin(), src.end(), d.features.row(r).begin());
      d.labels[r] = data.labels[order[from + r]];
    }
    return d;
  };
  return {take(0, n_train, Split::kTrain), take(n_train, n_test, Split::kTest)};
}

void save_weights(const std::string& path, const ShallowParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out.write(kMagic, sizeof kMagic);
  put_u64(out, params.hidden());
  put_u64(out, params.inputs());
  put_u64(out, params.outputs());
  for (double v : params.V.data()) put_double(out, v);
  for (double v : params.W.data()) put_double(out, v);
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path);
}

ShallowParams load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) ||
      std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorKind::kParse, path + ": not a PPRX1 weight file");
  }
  const std::uint64_t n = get_u64(in, path);
  const std::uint64_t m = get_u64(in, path);
  const std::uint64_t p = get_u64(in, path);
  constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 32;
  if (n > kMaxEntries || m > kMaxEntries || p > kMaxEntries ||
      n * (m + p) > kMaxEntries) {
    throw Error(ErrorKind::kParse, path + ": implausible weight shape");
  }
  ShallowParams params = ShallowParams::zeros(n, m, p);
  for (double& v : params.V.data()) v = get_double(in, path);
  for (double& v : params.W.data()) v = get_double(in, path);
  for (double v : params.V.data()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kParse, path + ": non-finite weight");
  }
  for (double v : params.W.data()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kParse, path + ": non-finite weight");
  }
  return params;
}

}  // namespace pathprox
