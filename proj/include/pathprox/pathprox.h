#ifndef PATHPROX_PATHPROX_H
#define PATHPROX_PATHPROX_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PATHPROX_BUILDING)
#    define PATHPROX_API __declspec(dllexport)
#  else
#    define PATHPROX_API __declspec(dllimport)
#  endif
#else
#  define PATHPROX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pp_status {
  PP_OK = 0,
  PP_ERR_INVALID_INPUT = 1,
  PP_ERR_SHAPE = 2,
  PP_ERR_PARAMETER = 3,
  PP_ERR_SINGULAR = 4,
  PP_ERR_GUARD = 5,
  PP_ERR_PRECONDITION = 6,
  PP_ERR_IO = 7,
  PP_ERR_PARSE = 8,
  PP_ERR_NULL_ARGUMENT = 9,
  PP_ERR_INTERNAL = 10
} pp_status;

/* Message of the last failed call on this thread; "" after a success. */
PATHPROX_API const char* pp_last_error(void);
PATHPROX_API const char* pp_status_name(pp_status status);
PATHPROX_API const char* pp_version(void);

/* ---- proximal operators ------------------------------------------------ */

/* Exact prox of lam*|v|*||w||_1 at (x, y). w_out has m entries. */
PATHPROX_API pp_status pp_prox_single(double x, const double* y, size_t m,
                                      double lam, double* v_out,
                                      double* w_out);

/* Exact prox of lam*||v||_1*||w||_1 at (x, y). */
PATHPROX_API pp_status pp_prox_multi(const double* x, size_t p,
                                     const double* y, size_t m, double lam,
                                     double* v_out, double* w_out);

/* Size of the maximal feasibility boundary and the number of feasibility
   evaluations the boundary walk made. Either output may be NULL. */
PATHPROX_API pp_status pp_mfb_stats(const double* x, size_t p,
                                    const double* y, size_t m, double lam,
                                    size_t* pairs, size_t* evaluations);

PATHPROX_API pp_status pp_soft_threshold(const double* z, size_t len,
                                         double tau, double* out);
PATHPROX_API pp_status pp_project_l1_ball(const double* v, size_t len,
                                          double radius, double* out);

/* ---- network weights --------------------------------------------------- */

/* One shallow block x -> V^T act(W x); V is n x p, W is n x m, row-major. */
typedef struct pp_params pp_params;

PATHPROX_API pp_status pp_params_create(size_t n, size_t m, size_t p,
                                        pp_params** out);
PATHPROX_API pp_status pp_params_random(size_t n, size_t m, size_t p,
                                        uint64_t seed, pp_params** out);
PATHPROX_API void pp_params_destroy(pp_params* params);
PATHPROX_API pp_status pp_params_shape(const pp_params* params, size_t* n,
                                       size_t* m, size_t* p);
PATHPROX_API pp_status pp_params_get_v(const pp_params* params, double* out,
                                       size_t len);
PATHPROX_API pp_status pp_params_set_v(pp_params* params, const double* data,
                                       size_t len);
PATHPROX_API pp_status pp_params_get_w(const pp_params* params, double* out,
                                       size_t len);
PATHPROX_API pp_status pp_params_set_w(pp_params* params, const double* data,
                                       size_t len);
PATHPROX_API pp_status pp_params_save(const pp_params* params,
                                      const char* path);
PATHPROX_API pp_status pp_params_load(const char* path, pp_params** out);
PATHPROX_API pp_status pp_params_path_norm(const pp_params* params,
                                           double* out);
PATHPROX_API pp_status pp_params_product_bound(const pp_params* params,
                                               double* out);
PATHPROX_API pp_status pp_params_nnz_fraction(const pp_params* params,
                                              double* out);
/* Row-wise multi-output prox of every hidden unit; *out is a new handle. */
PATHPROX_API pp_status pp_params_prox(const pp_params* params, double lam,
                                      pp_params** out);

/* ---- datasets ---------------------------------------------------------- */

typedef struct pp_dataset pp_dataset;

/* Two overlapping Gaussian classes in [0,1]^dims. */
PATHPROX_API pp_status pp_dataset_generate(size_t samples, size_t dims,
                                           uint64_t seed, pp_dataset** out);
/* Label-first CSV; features min-max scaled via "<path>.minmax.json". */
PATHPROX_API pp_status pp_dataset_load_csv(const char* path,
                                           pp_dataset** out);
PATHPROX_API pp_status pp_dataset_write_csv(const pp_dataset* data,
                                            const char* path);
PATHPROX_API pp_status pp_dataset_split(const pp_dataset* data,
                                        double test_fraction, uint64_t seed,
                                        pp_dataset** train, pp_dataset** test);
PATHPROX_API pp_status pp_dataset_shape(const pp_dataset* data,
                                        size_t* samples, size_t* dims,
                                        size_t* classes);
PATHPROX_API void pp_dataset_destroy(pp_dataset* data);

/* ---- training and evaluation ------------------------------------------- */

typedef enum pp_reg {
  PP_REG_NONE = 0,
  PP_REG_L1 = 1,
  PP_REG_PATH = 2,
  PP_REG_PARSEVAL = 3
} pp_reg;

typedef enum pp_optimizer { PP_OPT_PROX = 0, PP_OPT_SGD = 1 } pp_optimizer;

typedef enum pp_activation {
  PP_ACT_ELU = 0,
  PP_ACT_SOFTPLUS = 1,
  PP_ACT_IDENTITY = 2
} pp_activation;

typedef enum pp_loss {
  PP_LOSS_CROSS_ENTROPY = 0,
  PP_LOSS_SQUARED = 1
} pp_loss;

typedef struct pp_attack_config {
  double epsilon;
  size_t iters;
  double step;
  int random_init;
  uint64_t seed;
} pp_attack_config;

/* 40 steps of epsilon / 20 from a random start. */
PATHPROX_API void pp_attack_config_default(double epsilon, uint64_t seed,
                                           pp_attack_config* out);

typedef struct pp_train_config {
  pp_reg reg;
  double lambda;
  double step;
  size_t epochs;
  size_t batch;
  uint64_t seed;
  pp_loss loss;
  pp_activation act;
  pp_optimizer optimizer;
  size_t hidden;
  int attack_enabled;
  pp_attack_config attack;
} pp_train_config;

PATHPROX_API void pp_train_config_default(pp_train_config* out);

typedef struct pp_epoch_metrics {
  size_t epoch;
  double objective;
  double train_objective;
  double reg_value;
  double nnz_fraction;
  double train_error;
  double clean_error;
  int has_robust_error;
  double robust_error;
} pp_epoch_metrics;

typedef void (*pp_epoch_callback)(const pp_epoch_metrics* metrics,
                                  void* user);

/* test, init and callback may be NULL. *out receives the trained weights. */
PATHPROX_API pp_status pp_train(const pp_dataset* train,
                                const pp_dataset* test,
                                const pp_train_config* config,
                                const pp_params* init,
                                pp_epoch_callback callback, void* user,
                                pp_params** out);

PATHPROX_API pp_status pp_clean_error(const pp_params* params,
                                      pp_activation act,
                                      const pp_dataset* data, double* out);
PATHPROX_API pp_status pp_robust_error(const pp_params* params,
                                       pp_activation act,
                                       const pp_dataset* data,
                                       const pp_attack_config* attack,
                                       double* out);

/* Robust error at each of the n epsilons (out has n entries), step
   epsilon / 20, other settings from proto. Nondecreasing in epsilon. */
PATHPROX_API pp_status pp_robust_error_curve(const pp_params* params,
                                             pp_activation act,
                                             const pp_dataset* data,
                                             const double* epsilons, size_t n,
                                             const pp_attack_config* proto,
                                             double* out);

/* ---- verification suites ----------------------------------------------- */

typedef struct pp_check_config {
  size_t trials;
  size_t max_m;
  size_t max_p;
  uint64_t seed;
  int inject_fault;
  const double* lambdas; /* NULL keeps the default set */
  size_t n_lambdas;
} pp_check_config;

PATHPROX_API void pp_check_config_default(pp_check_config* out);

typedef struct pp_check_report pp_check_report;

/* Strings stay valid until the report is destroyed. */
typedef struct pp_check_suite {
  const char* name;
  size_t instances;
  size_t checks;
  size_t violations;
  double worst;
  const char* first_issue;
} pp_check_suite;

PATHPROX_API pp_status pp_prox_check(const pp_check_config* config,
                                     pp_check_report** out);
PATHPROX_API size_t pp_check_report_count(const pp_check_report* report);
PATHPROX_API pp_status pp_check_report_suite(const pp_check_report* report,
                                             size_t index,
                                             pp_check_suite* out);
PATHPROX_API void pp_check_report_destroy(pp_check_report* report);

#ifdef __cplusplus
}
#endif

#endif
