#include "pathprox/pathprox.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <new>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attack.hpp"
#include "dataset.hpp"
#include "optimizer.hpp"
#include "pathnorm.hpp"
#include "prox_baselines.hpp"
#include "prox_multi.hpp"
#include "prox_single.hpp"
#include "verify.hpp"

struct pp_params {
  pathprox::ShallowParams value;
};

struct pp_dataset {
  pathprox::Dataset value;
};

struct pp_check_report {
  pathprox::ProxCheckReport value;
};

namespace {

thread_local std::string g_last_error;

pp_status status_of(pathprox::ErrorKind kind) {
  using pathprox::ErrorKind;
  switch (kind) {
    case ErrorKind::kInvalidInput: return PP_ERR_INVALID_INPUT;
    case ErrorKind::kShape: return PP_ERR_SHAPE;
    case ErrorKind::kParameter: return PP_ERR_PARAMETER;
    case ErrorKind::kSingularCandidate: return PP_ERR_SINGULAR;
    case ErrorKind::kGuard: return PP_ERR_GUARD;
    case ErrorKind::kPrecondition: return PP_ERR_PRECONDITION;
    case ErrorKind::kIo: return PP_ERR_IO;
    case ErrorKind::kParse: return PP_ERR_PARSE;
  }
  return PP_ERR_INTERNAL;
}

struct NullArgument : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs `body`, translating exceptions into status codes. No exception ever
// crosses the C boundary.
template <typename F>
pp_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return PP_OK;
  } catch (const NullArgument& e) {
    g_last_error = e.what();
    return PP_ERR_NULL_ARGUMENT;
  } catch (const pathprox::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PP_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* name) {
  if (ptr == nullptr) throw NullArgument(std::string(name) + " is NULL");
}

// NULL arguments get their own status, so they are checked before guarded().
pp_status null_arg(const char* name) {
  g_last_error = std::string(name) + " is NULL";
  return PP_ERR_NULL_ARGUMENT;
}

#define PP_REQUIRE(ptr)                       \
  do {                                        \
    if ((ptr) == nullptr) return null_arg(#ptr); \
  } while (0)

// Spans over possibly-NULL pointers with zero length are fine.
std::span<const double> view(const double* p, std::size_t n) {
  if (n > 0) require(p, "array");
  return {p, n};
}

pathprox::ActivationKind act_of(pp_activation a) {
  switch (a) {
    case PP_ACT_ELU: return pathprox::ActivationKind::kElu;
    case PP_ACT_SOFTPLUS: return pathprox::ActivationKind::kSoftplus;
    case PP_ACT_IDENTITY: return pathprox::ActivationKind::kIdentity;
  }
  throw pathprox::Error(pathprox::ErrorKind::kParameter, "unknown activation");
}

pathprox::AttackConfig attack_of(const pp_attack_config& a) {
  pathprox::AttackConfig cfg;
  cfg.epsilon = a.epsilon;
  cfg.iters = a.iters;
  cfg.step = a.step;
  cfg.random_init = a.random_init != 0;
  cfg.seed = a.seed;
  return cfg;
}

pathprox::TrainConfig train_config_of(const pp_train_config& c) {
  pathprox::TrainConfig cfg;
  switch (c.reg) {
    case PP_REG_NONE: cfg.reg = pathprox::RegKind::kNone; break;
    case PP_REG_L1: cfg.reg = pathprox::RegKind::kL1; break;
    case PP_REG_PATH: cfg.reg = pathprox::RegKind::kPathNorm; break;
    case PP_REG_PARSEVAL: cfg.reg = pathprox::RegKind::kParseval; break;
    default:
      throw pathprox::Error(pathprox::ErrorKind::kParameter,
                            "unknown regulariser");
  }
  switch (c.optimizer) {
    case PP_OPT_PROX: cfg.optimizer = pathprox::OptimizerKind::kProximal; break;
    case PP_OPT_SGD: cfg.optimizer = pathprox::OptimizerKind::kSubgradient; break;
    default:
      throw pathprox::Error(pathprox::ErrorKind::kParameter,
                            "unknown optimizer");
  }
  switch (c.loss) {
    case PP_LOSS_CROSS_ENTROPY: cfg.loss = pathprox::LossKind::kCrossEntropy; break;
    case PP_LOSS_SQUARED: cfg.loss = pathprox::LossKind::kSquared; break;
    default:
      throw pathprox::Error(pathprox::ErrorKind::kParameter, "unknown loss");
  }
  cfg.act = act_of(c.act);
  cfg.lambda = c.lambda;
  cfg.step = c.step;
  cfg.epochs = c.epochs;
  cfg.batch = c.batch;
  cfg.seed = c.seed;
  cfg.hidden = c.hidden;
  if (c.attack_enabled) cfg.attack = attack_of(c.attack);
  return cfg;
}

void copy_out(std::span<const double> src, double* dst, std::size_t len) {
  if (len != src.size()) {
    throw pathprox::Error(pathprox::ErrorKind::kShape,
                          "buffer holds " + std::to_string(len) +
                              " values, expected " + std::to_string(src.size()));
  }
  std::copy(src.begin(), src.end(), dst);
}

void copy_in(const double* src, std::size_t len, std::span<double> dst) {
  if (len != dst.size()) {
    throw pathprox::Error(pathprox::ErrorKind::kShape,
                          "buffer holds " + std::to_string(len) +
                              " values, expected " + std::to_string(dst.size()));
  }
  for (std::size_t i = 0; i < len; ++i) {
    if (!std::isfinite(src[i])) {
      throw pathprox::Error(pathprox::ErrorKind::kInvalidInput,
                            "non-finite weight at index " + std::to_string(i));
    }
  }
  std::copy(src, src + len, dst.begin());
}

}  // namespace

extern "C" {

const char* pp_last_error(void) { return g_last_error.c_str(); }

const char* pp_status_name(pp_status status) {
  switch (status) {
    case PP_OK: return "ok";
    case PP_ERR_INVALID_INPUT: return "invalid input";
    case PP_ERR_SHAPE: return "shape mismatch";
    case PP_ERR_PARAMETER: return "bad parameter";
    case PP_ERR_SINGULAR: return "singular candidate";
    case PP_ERR_GUARD: return "size guard";
    case PP_ERR_PRECONDITION: return "precondition violated";
    case PP_ERR_IO: return "io error";
    case PP_ERR_PARSE: return "parse error";
    case PP_ERR_NULL_ARGUMENT: return "null argument";
    case PP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pp_version(void) { return "1.0.0"; }

pp_status pp_prox_single(double x, const double* y, size_t m, double lam,
                         double* v_out, double* w_out) {
  PP_REQUIRE(v_out);
  if (m > 0) PP_REQUIRE(w_out);
  return guarded([&] {
    auto r = pathprox::prox_single(x, view(y, m), lam);
    *v_out = r.v;
    std::copy(r.w.begin(), r.w.end(), w_out);
  });
}

pp_status pp_prox_multi(const double* x, size_t p, const double* y, size_t m,
                        double lam, double* v_out, double* w_out) {
  if (p > 0) PP_REQUIRE(v_out);
  if (m > 0) PP_REQUIRE(w_out);
  return guarded([&] {
    auto r = pathprox::prox_multi(view(x, p), view(y, m), lam);
    std::copy(r.v.begin(), r.v.end(), v_out);
    std::copy(r.w.begin(), r.w.end(), w_out);
  });
}

pp_status pp_mfb_stats(const double* x, size_t p, const double* y, size_t m,
                       double lam, size_t* pairs, size_t* evaluations) {
  return guarded([&] {
    if (!(lam > 0.0)) {
      throw pathprox::Error(pathprox::ErrorKind::kParameter,
                            "boundary walk needs lam > 0");
    }
    const auto ox = pathprox::magnitude_order(view(x, p));
    const auto oy = pathprox::magnitude_order(view(y, m));
    const auto set = pathprox::mfb(ox, oy, lam);
    if (pairs) *pairs = set.pairs.size();
    if (evaluations) *evaluations = set.evaluations;
  });
}

pp_status pp_soft_threshold(const double* z, size_t len, double tau,
                            double* out) {
  if (len > 0) PP_REQUIRE(out);
  return guarded([&] {
    auto r = pathprox::soft_threshold(view(z, len), tau);
    std::copy(r.begin(), r.end(), out);
  });
}

pp_status pp_project_l1_ball(const double* v, size_t len, double radius,
                             double* out) {
  if (len > 0) PP_REQUIRE(out);
  return guarded([&] {
    auto r = pathprox::project_l1_ball(view(v, len), radius);
    std::copy(r.begin(), r.end(), out);
  });
}

pp_status pp_params_create(size_t n, size_t m, size_t p, pp_params** out) {
  PP_REQUIRE(out);
  return guarded([&] {
    *out = new pp_params{pathprox::ShallowParams::zeros(n, m, p)};
  });
}

pp_status pp_params_random(size_t n, size_t m, size_t p, uint64_t seed,
                           pp_params** out) {
  PP_REQUIRE(out);
  return guarded([&] {
    pathprox::Rng rng(seed);
    *out = new pp_params{pathprox::ShallowParams::random(n, m, p, rng)};
  });
}

void pp_params_destroy(pp_params* params) { delete params; }

pp_status pp_params_shape(const pp_params* params, size_t* n, size_t* m,
                          size_t* p) {
  PP_REQUIRE(params);
  if (n) *n = params->value.hidden();
  if (m) *m = params->value.inputs();
  if (p) *p = params->value.outputs();
  g_last_error.clear();
  return PP_OK;
}

pp_status pp_params_get_v(const pp_params* params, double* out, size_t len) {
  PP_REQUIRE(params);
  if (len > 0) PP_REQUIRE(out);
  return guarded([&] { copy_out(params->value.V.data(), out, len); });
}

pp_status pp_params_set_v(pp_params* params, const double* data, size_t len) {
  PP_REQUIRE(params);
  if (len > 0) PP_REQUIRE(data);
  return guarded([&] { copy_in(data, len, params->value.V.data()); });
}

pp_status pp_params_get_w(const pp_params* params, double* out, size_t len) {
  PP_REQUIRE(params);
  if (len > 0) PP_REQUIRE(out);
  return guarded([&] { copy_out(params->value.W.data(), out, len); });
}

pp_status pp_params_set_w(pp_params* params, const double* data, size_t len) {
  PP_REQUIRE(params);
  if (len > 0) PP_REQUIRE(data);
  return guarded([&] { copy_in(data, len, params->value.W.data()); });
}

pp_status pp_params_save(const pp_params* params, const char* path) {
  PP_REQUIRE(params);
  PP_REQUIRE(path);
  return guarded([&] { pathprox::save_weights(path, params->value); });
}

pp_status pp_params_load(const char* path, pp_params** out) {
  PP_REQUIRE(path);
  PP_REQUIRE(out);
  return guarded([&] { *out = new pp_params{pathprox::load_weights(path)}; });
}

pp_status pp_params_path_norm(const pp_params* params, double* out) {
  PP_REQUIRE(params);
  PP_REQUIRE(out);
  return guarded([&] { *out = pathprox::path_norm_1(params->value); });
}

pp_status pp_params_product_bound(const pp_params* params, double* out) {
  PP_REQUIRE(params);
  PP_REQUIRE(out);
  return guarded([&] { *out = pathprox::product_bound(params->value); });
}

pp_status pp_params_nnz_fraction(const pp_params* params, double* out) {
  PP_REQUIRE(params);
  PP_REQUIRE(out);
  return guarded([&] { *out = params->value.nnz_fraction(); });
}

pp_status pp_params_prox(const pp_params* params, double lam,
                         pp_params** out) {
  PP_REQUIRE(params);
  PP_REQUIRE(out);
  return guarded([&] {
    *out = new pp_params{pathprox::prox_full(params->value, lam)};
  });
}

pp_status pp_dataset_generate(size_t samples, size_t dims, uint64_t seed,
                              pp_dataset** out) {
  PP_REQUIRE(out);
  return guarded([&] {
    if (samples == 0 || dims == 0) {
      throw pathprox::Error(pathprox::ErrorKind::kParameter,
                            "need at least one sample and one feature");
    }
    *out = new pp_dataset{pathprox::generate_blobs(samples, dims, seed)};
  });
}

pp_status pp_dataset_load_csv(const char* path, pp_dataset** out) {
  PP_REQUIRE(path);
  PP_REQUIRE(out);
  return guarded([&] { *out = new pp_dataset{pathprox::load_csv(path)}; });
}

pp_status pp_dataset_write_csv(const pp_dataset* data, const char* path) {
  PP_REQUIRE(data);
  PP_REQUIRE(path);
  return guarded([&] { pathprox::write_csv(path, data->value); });
}

pp_status pp_dataset_split(const pp_dataset* data, double test_fraction,
                           uint64_t seed, pp_dataset** train,
                           pp_dataset** test) {
  PP_REQUIRE(data);
  PP_REQUIRE(train);
  PP_REQUIRE(test);
  return guarded([&] {
    auto parts = pathprox::split_dataset(data->value, test_fraction, seed);
    auto* a = new pp_dataset{std::move(parts.first)};
    try {
      *test = new pp_dataset{std::move(parts.second)};
    } catch (...) {
      delete a;
      throw;
    }
    *train = a;
  });
}

pp_status pp_dataset_shape(const pp_dataset* data, size_t* samples,
                           size_t* dims, size_t* classes) {
  PP_REQUIRE(data);
  if (samples) *samples = data->value.size();
  if (dims) *dims = data->value.dims();
  if (classes) *classes = data->value.classes();
  g_last_error.clear();
  return PP_OK;
}

void pp_dataset_destroy(pp_dataset* data) { delete data; }

void pp_attack_config_default(double epsilon, uint64_t seed,
                              pp_attack_config* out) {
  if (out == nullptr) return;
  const auto cfg = pathprox::AttackConfig::standard(epsilon, seed);
  out->epsilon = cfg.epsilon;
  out->iters = cfg.iters;
  out->step = cfg.step;
  out->random_init = cfg.random_init ? 1 : 0;
  out->seed = cfg.seed;
}

void pp_train_config_default(pp_train_config* out) {
  if (out == nullptr) return;
  const pathprox::TrainConfig cfg;
  out->reg = PP_REG_NONE;
  out->lambda = cfg.lambda;
  out->step = cfg.step;
  out->epochs = cfg.epochs;
  out->batch = cfg.batch;
  out->seed = cfg.seed;
  out->loss = PP_LOSS_CROSS_ENTROPY;
  out->act = PP_ACT_ELU;
  out->optimizer = PP_OPT_PROX;
  out->hidden = cfg.hidden;
  out->attack_enabled = 0;
  pp_attack_config_default(0.1, 0, &out->attack);
}

pp_status pp_train(const pp_dataset* train, const pp_dataset* test,
                   const pp_train_config* config, const pp_params* init,
                   pp_epoch_callback callback, void* user, pp_params** out) {
  PP_REQUIRE(train);
  PP_REQUIRE(config);
  PP_REQUIRE(out);
  return guarded([&] {
    const auto cfg = train_config_of(*config);
    std::optional<pathprox::ShallowParams> start;
    if (init) start = init->value;
    pathprox::EpochCallback cb;
    if (callback) {
      cb = [&](const pathprox::EpochMetrics& m) {
        pp_epoch_metrics c{};
        c.epoch = m.epoch;
        c.objective = m.objective;
        c.train_objective = m.train_objective;
        c.reg_value = m.reg_value;
        c.nnz_fraction = m.nnz_fraction;
        c.train_error = m.train_error;
        c.clean_error = m.clean_error;
        c.has_robust_error = m.robust_error.has_value() ? 1 : 0;
        c.robust_error = m.robust_error.value_or(0.0);
        callback(&c, user);
      };
    }
    auto result = pathprox::run_stochastic(
        train->value, test ? &test->value : nullptr, cfg, std::move(start), cb);
    *out = new pp_params{std::move(result.params)};
  });
}

pp_status pp_clean_error(const pp_params* params, pp_activation act,
                         const pp_dataset* data, double* out) {
  PP_REQUIRE(params);
  PP_REQUIRE(data);
  PP_REQUIRE(out);
  return guarded([&] {
    *out = pathprox::clean_error(params->value, act_of(act), data->value);
  });
}

pp_status pp_robust_error(const pp_params* params, pp_activation act,
                          const pp_dataset* data,
                          const pp_attack_config* attack, double* out) {
  PP_REQUIRE(params);
  PP_REQUIRE(data);
  PP_REQUIRE(attack);
  PP_REQUIRE(out);
  return guarded([&] {
    *out = pathprox::robust_error(params->value, act_of(act), data->value,
                                  attack_of(*attack));
  });
}

pp_status pp_robust_error_curve(const pp_params* params, pp_activation act,
                                const pp_dataset* data, const double* epsilons,
                                size_t n, const pp_attack_config* proto,
                                double* out) {
  PP_REQUIRE(params);
  PP_REQUIRE(data);
  PP_REQUIRE(proto);
  if (n > 0) {
    PP_REQUIRE(epsilons);
    PP_REQUIRE(out);
  }
  return guarded([&] {
    const std::vector<double> eps(epsilons, epsilons + n);
    auto curve = pathprox::robust_error_curve(params->value, act_of(act),
                                              data->value, eps,
                                              attack_of(*proto));
    std::copy(curve.begin(), curve.end(), out);
  });
}

void pp_check_config_default(pp_check_config* out) {
  if (out == nullptr) return;
  const pathprox::ProxCheckConfig cfg;
  out->trials = cfg.trials;
  out->max_m = cfg.max_m;
  out->max_p = cfg.max_p;
  out->seed = cfg.seed;
  out->inject_fault = 0;
  out->lambdas = nullptr;
  out->n_lambdas = 0;
}

pp_status pp_prox_check(const pp_check_config* config, pp_check_report** out) {
  PP_REQUIRE(config);
  PP_REQUIRE(out);
  return guarded([&] {
    pathprox::ProxCheckConfig cfg;
    cfg.trials = config->trials;
    cfg.max_m = config->max_m;
    cfg.max_p = config->max_p;
    cfg.seed = config->seed;
    cfg.inject_fault = config->inject_fault != 0;
    if (config->lambdas != nullptr) {
      cfg.lambdas.assign(config->lambdas, config->lambdas + config->n_lambdas);
    }
    *out = new pp_check_report{pathprox::run_prox_check(cfg)};
  });
}

size_t pp_check_report_count(const pp_check_report* report) {
  return report ? report->value.suites.size() : 0;
}

pp_status pp_check_report_suite(const pp_check_report* report, size_t index,
                                pp_check_suite* out) {
  PP_REQUIRE(report);
  PP_REQUIRE(out);
  return guarded([&] {
    if (index >= report->value.suites.size()) {
      throw pathprox::Error(pathprox::ErrorKind::kParameter,
                            "suite index out of range");
    }
    const auto& s = report->value.suites[index];
    out->name = s.name.c_str();
    out->instances = s.instances;
    out->checks = s.checks;
    out->violations = s.violations;
    out->worst = s.worst;
    out->first_issue = s.first_issue.c_str();
  });
}

void pp_check_report_destroy(pp_check_report* report) { delete report; }

}  // extern "C"
