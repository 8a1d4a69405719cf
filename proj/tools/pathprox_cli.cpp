// Command-line harness over the pathprox C API.
//
// Exit codes: 0 success, 1 validation failure (prox-check violations),
// 2 usage, IO or parse errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pathprox/pathprox.h"

namespace {

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

// Raised for any failure that maps to exit code 2.
struct UsageError {
  std::string message;
};

void check(pp_status st, const std::string& what) {
  if (st != PP_OK) {
    throw UsageError{what + ": " + pp_status_name(st) + ": " + pp_last_error()};
  }
}

struct DatasetDeleter {
  void operator()(pp_dataset* d) const { pp_dataset_destroy(d); }
};
struct ParamsDeleter {
  void operator()(pp_params* p) const { pp_params_destroy(p); }
};
struct ReportDeleter {
  void operator()(pp_check_report* r) const { pp_check_report_destroy(r); }
};
using DatasetPtr = std::unique_ptr<pp_dataset, DatasetDeleter>;
using ParamsPtr = std::unique_ptr<pp_params, ParamsDeleter>;
using ReportPtr = std::unique_ptr<pp_check_report, ReportDeleter>;

// Output goes to the named file, or stdout for "" and "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw UsageError{"cannot write " + path};
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }
  void finish() {
    out_->flush();
    if (!*out_) throw UsageError{"write failed"};
  }

 private:
  std::ofstream file_;
  std::ostream* out_ = &std::cout;
};

DatasetPtr load_dataset(const std::string& path) {
  pp_dataset* raw = nullptr;
  check(pp_dataset_load_csv(path.c_str(), &raw), "loading " + path);
  return DatasetPtr(raw);
}

// Returns (train, test). A zero fraction gives an empty test split.
std::pair<DatasetPtr, DatasetPtr> split(const pp_dataset* data, double frac,
                                        std::uint64_t seed) {
  pp_dataset* train = nullptr;
  pp_dataset* test = nullptr;
  check(pp_dataset_split(data, frac, seed, &train, &test), "splitting data");
  return {DatasetPtr(train), DatasetPtr(test)};
}

const std::map<std::string, pp_reg> kRegs{{"none", PP_REG_NONE},
                                          {"l1", PP_REG_L1},
                                          {"path", PP_REG_PATH},
                                          {"parseval", PP_REG_PARSEVAL}};
const std::map<std::string, pp_optimizer> kOptimizers{{"prox", PP_OPT_PROX},
                                                      {"sgd", PP_OPT_SGD}};
const std::map<std::string, pp_activation> kActs{{"elu", PP_ACT_ELU},
                                                 {"softplus", PP_ACT_SOFTPLUS}};

template <typename T>
std::vector<std::string> keys(const std::map<std::string, T>& m) {
  std::vector<std::string> out;
  for (const auto& kv : m) out.push_back(kv.first);
  return out;
}

// ---- gen-data ---------------------------------------------------------------

struct GenDataArgs {
  std::string out;
  std::size_t samples = 2000;
  std::size_t dims = 20;
  std::uint64_t seed = 1;
};

int run_gen_data(const GenDataArgs& a) {
  pp_dataset* raw = nullptr;
  check(pp_dataset_generate(a.samples, a.dims, a.seed, &raw),
        "generating data");
  DatasetPtr data(raw);
  check(pp_dataset_write_csv(data.get(), a.out.c_str()), "writing " + a.out);
  std::cerr << "wrote " << a.samples << " samples x " << a.dims
            << " features to " << a.out << "\n";
  return kExitOk;
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string reg = "none";
  double lambda = 0.0;
  double lr = 0.05;
  std::size_t epochs = 20;
  std::size_t batch = 100;
  std::uint64_t seed = 1;
  std::string out;
  std::string optimizer = "prox";
  std::size_t hidden = 200;
  std::string act = "elu";
  double test_frac = 0.2;
  std::uint64_t split_seed = 1;
  double eps = -1.0;  // negative: no robust error during training
  std::string weights_out;
};

struct TrainSink {
  std::ostream* out;
  const nlohmann::ordered_json* config;
  std::uint64_t seed;
};

nlohmann::ordered_json metrics_json(const pp_epoch_metrics& m) {
  nlohmann::ordered_json j;
  j["epoch"] = m.epoch;
  j["objective"] = m.objective;
  j["train_objective"] = m.train_objective;
  j["reg_value"] = m.reg_value;
  j["nnz_fraction"] = m.nnz_fraction;
  j["train_error"] = m.train_error;
  j["clean_error"] = m.clean_error;
  if (m.has_robust_error) {
    j["robust_error"] = m.robust_error;
  } else {
    j["robust_error"] = nullptr;
  }
  return j;
}

void on_epoch(const pp_epoch_metrics* m, void* user) {
  auto* sink = static_cast<TrainSink*>(user);
  auto j = metrics_json(*m);
  j["seed"] = sink->seed;
  j["config"] = *sink->config;
  *sink->out << j.dump() << "\n";
}

int run_train(const TrainArgs& a) {
  if (a.reg == "parseval" && !(a.lambda > 0.0)) {
    throw UsageError{"--reg parseval needs --lambda > 0 (radius 1/lambda)"};
  }
  if (a.reg == "none" && a.lambda != 0.0) {
    throw UsageError{"--reg none takes no --lambda; use --lambda 0"};
  }
  if (a.lambda < 0.0) throw UsageError{"--lambda must be >= 0"};

  auto data = load_dataset(a.data);
  auto [train, test] = split(data.get(), a.test_frac, a.split_seed);

  pp_train_config cfg;
  pp_train_config_default(&cfg);
  cfg.reg = kRegs.at(a.reg);
  cfg.lambda = a.lambda;
  cfg.step = a.lr;
  cfg.epochs = a.epochs;
  cfg.batch = a.batch;
  cfg.seed = a.seed;
  cfg.optimizer = kOptimizers.at(a.optimizer);
  cfg.hidden = a.hidden;
  cfg.act = kActs.at(a.act);
  if (a.eps >= 0.0) {
    cfg.attack_enabled = 1;
    pp_attack_config_default(a.eps, a.seed, &cfg.attack);
  }

  nlohmann::ordered_json config;
  config["data"] = a.data;
  config["reg"] = a.reg;
  config["lambda"] = a.lambda;
  config["lr"] = a.lr;
  config["epochs"] = a.epochs;
  config["batch"] = a.batch;
  config["optimizer"] = a.optimizer;
  config["hidden"] = a.hidden;
  config["act"] = a.act;
  config["test_frac"] = a.test_frac;
  config["split_seed"] = a.split_seed;
  if (a.eps >= 0.0) {
    config["eps"] = a.eps;
  } else {
    config["eps"] = nullptr;
  }

  Sink sink(a.out);
  TrainSink ts{&sink.stream(), &config, a.seed};
  pp_params* raw = nullptr;
  const pp_dataset* test_ptr = a.test_frac > 0.0 ? test.get() : nullptr;
  check(pp_train(train.get(), test_ptr, &cfg, nullptr, &on_epoch, &ts, &raw),
        "training");
  ParamsPtr params(raw);
  sink.finish();
  if (!a.weights_out.empty()) {
    check(pp_params_save(params.get(), a.weights_out.c_str()),
          "saving weights");
  }
  return kExitOk;
}

// ---- prox-check -------------------------------------------------------------

struct ProxCheckArgs {
  std::size_t trials = 10000;
  std::size_t max_m = 8;
  std::size_t max_p = 6;
  std::uint64_t seed = 1;
  std::vector<double> lambdas;
  bool inject_fault = false;
};

int run_prox_check(const ProxCheckArgs& a) {
  pp_check_config cfg;
  pp_check_config_default(&cfg);
  cfg.trials = a.trials;
  cfg.max_m = a.max_m;
  cfg.max_p = a.max_p;
  cfg.seed = a.seed;
  cfg.inject_fault = a.inject_fault ? 1 : 0;
  if (!a.lambdas.empty()) {
    cfg.lambdas = a.lambdas.data();
    cfg.n_lambdas = a.lambdas.size();
  }
  pp_check_report* raw = nullptr;
  check(pp_prox_check(&cfg, &raw), "prox-check");
  ReportPtr report(raw);

  std::size_t failed = 0;
  const std::size_t n = pp_check_report_count(report.get());
  for (std::size_t i = 0; i < n; ++i) {
    pp_check_suite s;
    check(pp_check_report_suite(report.get(), i, &s), "reading report");
    std::printf("%-26s %s  instances=%zu checks=%zu violations=%zu worst=%.3g\n",
                s.name, s.violations == 0 ? "PASS" : "FAIL", s.instances,
                s.checks, s.violations, s.worst);
    if (s.violations > 0) {
      ++failed;
      std::printf("  first violation: %s\n", s.first_issue);
    }
  }
  if (failed > 0) {
    std::printf("prox-check: %zu of %zu suites reported violations\n", failed,
                n);
    return kExitValidation;
  }
  std::printf("prox-check: all %zu suites passed\n", n);
  return kExitOk;
}

// ---- bench-prox -------------------------------------------------------------

struct BenchArgs {
  std::string out;
  std::size_t max_m = 1024000;
  std::size_t max_p = 64;
  double lambda = 1e-3;
  std::size_t repeats = 3;
  std::uint64_t seed = 1;
};

template <typename F>
double min_seconds(std::size_t repeats, F&& body) {
  double best = 1e300;
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

int run_bench(const BenchArgs& a) {
  if (a.repeats == 0) throw UsageError{"--repeats must be >= 1"};
  if (!(a.lambda > 0.0)) throw UsageError{"--lambda must be > 0"};
  std::mt19937_64 gen(a.seed);
  std::normal_distribution<double> normal;
  auto draw = [&](std::size_t len) {
    std::vector<double> v(len);
    for (double& t : v) t = normal(gen);
    return v;
  };

  Sink sink(a.out);
  auto& out = sink.stream();
  out << "op,p,m,lambda,seconds,mfb_pairs,mfb_evaluations\n";
  char line[256];

  std::vector<std::size_t> sizes{0};
  for (std::size_t m = 1000; m <= a.max_m; m *= 2) sizes.push_back(m);
  for (std::size_t m : sizes) {
    const double x = normal(gen);
    const auto y = draw(m);
    std::vector<double> w(m);
    double v = 0.0;
    const double secs = min_seconds(a.repeats, [&] {
      check(pp_prox_single(x, y.data(), m, a.lambda, &v, w.data()),
            "prox_single");
    });
    std::snprintf(line, sizeof line, "%.9f", secs);
    out << "single,1," << m << ',' << num(a.lambda) << ',' << line << ",,\n";
  }

  std::vector<std::size_t> ps;
  for (std::size_t p = 1; p <= a.max_p; p *= 4) ps.push_back(p);
  for (std::size_t p : ps) {
    for (std::size_t m = 1000; m <= std::min<std::size_t>(a.max_m, 100000);
         m *= 10) {
      const auto x = draw(p);
      const auto y = draw(m);
      std::vector<double> v(p), w(m);
      const double secs = min_seconds(a.repeats, [&] {
        check(pp_prox_multi(x.data(), p, y.data(), m, a.lambda, v.data(),
                            w.data()),
              "prox_multi");
      });
      std::size_t pairs = 0, evals = 0;
      check(pp_mfb_stats(x.data(), p, y.data(), m, a.lambda, &pairs, &evals),
            "mfb");
      std::snprintf(line, sizeof line, "%.9f", secs);
      out << "multi," << p << ',' << m << ',' << num(a.lambda) << ',' << line
          << ',' << pairs << ',' << evals << '\n';
    }
  }
  sink.finish();
  return kExitOk;
}

// ---- attack-eval ------------------------------------------------------------

struct AttackArgs {
  std::string weights;
  std::string data;
  std::vector<double> eps{0.0, 0.05, 0.1, 0.2, 0.3};
  double lambda = 0.0;
  std::string act = "elu";
  std::uint64_t seed = 0;
  std::size_t iters = 40;
  bool no_random_init = false;
  double test_frac = 0.0;
  std::uint64_t split_seed = 1;
  std::string out;
};

int run_attack_eval(const AttackArgs& a) {
  for (double e : a.eps) {
    if (!(e >= 0.0)) throw UsageError{"--eps-list entries must be >= 0"};
  }
  pp_params* raw = nullptr;
  check(pp_params_load(a.weights.c_str(), &raw), "loading " + a.weights);
  ParamsPtr params(raw);
  auto data = load_dataset(a.data);
  DatasetPtr held_out;
  const pp_dataset* eval = data.get();
  if (a.test_frac > 0.0) {
    auto parts = split(data.get(), a.test_frac, a.split_seed);
    held_out = std::move(parts.second);
    eval = held_out.get();
  }
  std::size_t dims = 0, m = 0;
  check(pp_dataset_shape(eval, nullptr, &dims, nullptr), "dataset shape");
  check(pp_params_shape(params.get(), nullptr, &m, nullptr), "weight shape");
  if (dims != m) {
    throw UsageError{"weights expect " + std::to_string(m) +
                     " features but the data has " + std::to_string(dims)};
  }

  const pp_activation act = kActs.at(a.act);
  double clean = 0.0;
  check(pp_clean_error(params.get(), act, eval, &clean), "clean error");
  pp_attack_config proto;
  pp_attack_config_default(0.0, a.seed, &proto);
  proto.iters = a.iters;
  proto.random_init = a.no_random_init ? 0 : 1;
  std::vector<double> robust(a.eps.size());
  check(pp_robust_error_curve(params.get(), act, eval, a.eps.data(),
                              a.eps.size(), &proto, robust.data()),
        "robust error");

  Sink sink(a.out);
  auto& out = sink.stream();
  out << "lambda,epsilon,clean_error,robust_error\n";
  for (std::size_t i = 0; i < a.eps.size(); ++i) {
    out << num(a.lambda) << ',' << num(a.eps[i]) << ',' << num(clean) << ','
        << num(robust[i]) << '\n';
  }
  sink.finish();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact path-norm proximal maps: training, checks, benchmarks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pp_version()));

  GenDataArgs gen;
  auto* c_gen = app.add_subcommand("gen-data", "Write the synthetic blob dataset as CSV");
  c_gen->add_option("--out", gen.out, "CSV path")->required();
  c_gen->add_option("--samples", gen.samples, "Number of rows")->capture_default_str();
  c_gen->add_option("--dims", gen.dims, "Number of features")->capture_default_str();
  c_gen->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train a shallow network, one JSON line per epoch");
  c_train->add_option("--data", tr.data, "Label-first CSV")->required();
  c_train->add_option("--reg", tr.reg, "Regulariser")
      ->check(CLI::IsMember(keys(kRegs)))->capture_default_str();
  c_train->add_option("--lambda", tr.lambda, "Regularisation weight")->capture_default_str();
  c_train->add_option("--lr", tr.lr, "Constant step size")->capture_default_str();
  c_train->add_option("--epochs", tr.epochs, "Epochs")->capture_default_str();
  c_train->add_option("--batch", tr.batch, "Minibatch size")->capture_default_str();
  c_train->add_option("--seed", tr.seed, "Initialisation and shuffling seed")->capture_default_str();
  c_train->add_option("--out", tr.out, "JSONL metrics path (stdout if omitted)");
  c_train->add_option("--optimizer", tr.optimizer, "prox: proximal step; sgd: subgradient step")
      ->check(CLI::IsMember(keys(kOptimizers)))->capture_default_str();
  c_train->add_option("--hidden", tr.hidden, "Hidden units")->capture_default_str();
  c_train->add_option("--act", tr.act, "Activation")
      ->check(CLI::IsMember(keys(kActs)))->capture_default_str();
  c_train->add_option("--test-frac", tr.test_frac, "Held-out fraction")
      ->check(CLI::Range(0.0, 0.99))->capture_default_str();
  c_train->add_option("--split-seed", tr.split_seed, "Train/test split seed")->capture_default_str();
  c_train->add_option("--eps", tr.eps, "Also report robust error at this epsilon");
  c_train->add_option("--weights-out", tr.weights_out, "Save final weights (PPRX1)");

  ProxCheckArgs pc;
  auto* c_check = app.add_subcommand("prox-check", "Oracle and invariant suites for the prox maps");
  c_check->add_option("--trials", pc.trials, "Instances per suite")->capture_default_str();
  c_check->add_option("--max-m", pc.max_m, "Largest y length")->capture_default_str();
  c_check->add_option("--max-p", pc.max_p, "Largest x length (multi-output)")->capture_default_str();
  c_check->add_option("--seed", pc.seed, "Instance seed")->capture_default_str();
  c_check->add_option("--lambdas", pc.lambdas, "Comma-separated coefficients")->delimiter(',');
  c_check->add_flag("--inject-fault", pc.inject_fault,
                    "Invert the candidate selection (harness self-test)");

  BenchArgs bn;
  auto* c_bench = app.add_subcommand("bench-prox", "Time the prox maps, CSV output");
  c_bench->add_option("--out", bn.out, "CSV path (stdout if omitted)");
  c_bench->add_option("--max-m", bn.max_m, "Largest m for single-output timing")->capture_default_str();
  c_bench->add_option("--max-p", bn.max_p, "Largest p for multi-output timing")->capture_default_str();
  c_bench->add_option("--lambda", bn.lambda, "Prox coefficient")->capture_default_str();
  c_bench->add_option("--repeats", bn.repeats, "Timing repeats (minimum kept)")->capture_default_str();
  c_bench->add_option("--seed", bn.seed, "Input seed")->capture_default_str();

  AttackArgs at;
  auto* c_attack = app.add_subcommand("attack-eval", "Clean and PGD robust error over an epsilon list");
  c_attack->add_option("--weights", at.weights, "PPRX1 weight file")->required();
  c_attack->add_option("--data", at.data, "Label-first CSV")->required();
  c_attack->add_option("--eps-list", at.eps, "Comma-separated epsilons")->delimiter(',');
  c_attack->add_option("--lambda", at.lambda, "Value echoed in the lambda column")->capture_default_str();
  c_attack->add_option("--act", at.act, "Activation")
      ->check(CLI::IsMember(keys(kActs)))->capture_default_str();
  c_attack->add_option("--seed", at.seed, "Attack start seed")->capture_default_str();
  c_attack->add_option("--iters", at.iters, "PGD iterations")->capture_default_str();
  c_attack->add_flag("--no-random-init", at.no_random_init, "Start PGD at the clean point");
  c_attack->add_option("--test-frac", at.test_frac, "Evaluate only the held-out split")
      ->check(CLI::Range(0.0, 0.99))->capture_default_str();
  c_attack->add_option("--split-seed", at.split_seed, "Train/test split seed")->capture_default_str();
  c_attack->add_option("--out", at.out, "CSV path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_gen) return run_gen_data(gen);
    if (*c_train) return run_train(tr);
    if (*c_check) return run_prox_check(pc);
    if (*c_bench) return run_bench(bn);
    if (*c_attack) return run_attack_eval(at);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
