/* C interface to the data-redemption pricing library.
 *
 * Objects are opaque handles created and destroyed through this API. Every
 * call returns a dq_status; on failure dq_last_error() describes the
 * problem (thread local, valid until the next failing call on the thread).
 */
#ifndef DATAQUOTE_H
#define DATAQUOTE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DQ_API __declspec(dllexport)
#elif defined(DQ_BUILDING_LIBRARY)
#define DQ_API __attribute__((visibility("default")))
#else
#define DQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dq_status {
  DQ_OK = 0,
  DQ_ERR_NULL = 1,         /* required pointer argument was NULL */
  DQ_ERR_DOMAIN = 2,       /* argument outside the mathematical domain */
  DQ_ERR_PRECONDITION = 3, /* operation contract violated */
  DQ_ERR_CONFIG = 4,       /* bad configuration key or value */
  DQ_ERR_CONVERGENCE = 5,  /* iterative solver gave up */
  DQ_ERR_IO = 6,
  DQ_ERR_RANGE = 7,        /* index out of range */
  DQ_ERR_INTERNAL = 8
} dq_status;

typedef enum dq_strategy {
  DQ_STRATEGY_MAJOR = 0,
  DQ_STRATEGY_MINOR = 1,
  DQ_STRATEGY_PROPORTIONAL = 2,
  DQ_STRATEGY_RANDOM = 3
} dq_strategy;

typedef struct dq_model dq_model;
typedef struct dq_population dq_population;
typedef struct dq_market dq_market;
typedef struct dq_experiment dq_experiment;

typedef struct dq_trade {
  long round;
  size_t user;
  double quantity;
  double unit_price;
} dq_trade;

typedef struct dq_welfare {
  double server;
  double users;
  double total;
  double transfer_free;
} dq_welfare;

DQ_API const char* dq_version(void);
DQ_API const char* dq_last_error(void);
DQ_API const char* dq_status_name(dq_status status);

/* Server cost model. Parameter names: a, A1, A2, A3, T0, alpha, beta, d_total.
 * case_label: 0 keep-none, 1 keep-all, 2 interior. */
DQ_API dq_status dq_model_create(dq_model** out);
DQ_API void dq_model_destroy(dq_model* model);
DQ_API dq_status dq_model_set(dq_model* model, const char* name, double value);
DQ_API dq_status dq_model_get(const dq_model* model, const char* name, double* value);
DQ_API dq_status dq_model_cost(const dq_model* model, double retained, double* cost);
DQ_API dq_status dq_model_demand(const dq_model* model, double retained, double price, double* amount);
DQ_API dq_status dq_model_optimal_retention(const dq_model* model, double* y_max, int* case_label);

/* Users. */
DQ_API dq_status dq_population_create(dq_population** out);
DQ_API void dq_population_destroy(dq_population* population);
DQ_API dq_status dq_population_add(dq_population* population, double endowment, double lambda, double k, double theta,
                                   int informed);
DQ_API dq_status dq_population_size(const dq_population* population, size_t* size);
DQ_API dq_status dq_population_endowment(const dq_population* population, double* total);
DQ_API dq_status dq_user_supply(const dq_population* population, size_t user, double sold, double price,
                                double* amount);

/* Information-free ascending quotation. */
DQ_API dq_status dq_market_run(const dq_model* model, const dq_population* population, double B0, double dB,
                               double unit, dq_strategy strategy, uint64_t seed, dq_market** out);
DQ_API void dq_market_destroy(dq_market* market);
DQ_API dq_status dq_market_trade_count(const dq_market* market, size_t* count);
DQ_API dq_status dq_market_trade(const dq_market* market, size_t index, dq_trade* trade);
DQ_API dq_status dq_market_total_sold(const dq_market* market, double* total);
DQ_API dq_status dq_market_rounds(const dq_market* market, long* rounds);
DQ_API dq_status dq_market_fulfillment(const dq_market* market, double* ratio);
DQ_API dq_status dq_market_welfare(const dq_market* market, dq_welfare* welfare);
DQ_API dq_status dq_market_write_ledger(const dq_market* market, const char* path);

/* Experiments. `path` may be NULL for all defaults. */
DQ_API dq_status dq_experiment_load(const char* path, dq_experiment** out);
DQ_API void dq_experiment_destroy(dq_experiment* experiment);
DQ_API dq_status dq_experiment_set(dq_experiment* experiment, const char* key, const char* value);
DQ_API dq_status dq_experiment_defaulted_count(const dq_experiment* experiment, size_t* count);
DQ_API dq_status dq_experiment_defaulted_key(const dq_experiment* experiment, size_t index, const char** key);
/* Runs compare|robustness|convergence|oversupply|sweep and writes the report to out_dir
 * (config `output` when NULL). */
DQ_API dq_status dq_experiment_run(const dq_experiment* experiment, const char* name, const char* out_dir);
/* Runs one replicate and writes ledger.csv, ledger_ciq.csv and outcomes.csv. */
DQ_API dq_status dq_experiment_ledger(const dq_experiment* experiment, long replicate, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* DATAQUOTE_H */
