#include "dpvi.h"

#include <cstring>
#include <memory>
#include <string>

#include "core/engine.hpp"
#include "core/exact.hpp"
#include "core/weights.hpp"
#include "exp/experiments.hpp"
#include "models/binary_hmm.hpp"
#include "models/dpmm.hpp"
#include "models/ihmm.hpp"
#include "models/irm.hpp"
#include "models/ising.hpp"
#include "version.hpp"

struct dpvi_model {
  std::unique_ptr<dpvi::DiscreteModel> impl;
};

struct dpvi_result {
  dpvi::ParticleSet set;
  dpvi::BoundTrace trace;
};

namespace {

thread_local std::string g_last_error;

int fail(const std::string& message, int code = DPVI_ERROR) {
  g_last_error = message;
  return code;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return fail(e.what());
  } catch (...) {
    return fail("unknown error");
  }
}

int wrap_model(std::unique_ptr<dpvi::DiscreteModel> impl, dpvi_model_t** out) {
  *out = new dpvi_model{std::move(impl)};
  return DPVI_OK;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* dpvi_version(void) { return dpvi::kVersion; }

const char* dpvi_last_error(void) { return g_last_error.c_str(); }

int dpvi_model_binary_hmm(double alpha0, double alpha1, double beta0,
                          double beta1, const int* observations, int length,
                          dpvi_model_t** out) {
  if (!observations || !out || length < 1)
    return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    dpvi::BinaryHmmParams params;
    params.alpha0 = alpha0;
    params.alpha1 = alpha1;
    params.beta0 = beta0;
    params.beta1 = beta1;
    std::vector<int> obs(observations, observations + length);
    return wrap_model(
        std::make_unique<dpvi::BinaryHmmModel>(params, std::move(obs)), out);
  });
}

int dpvi_model_ising(int side, double beta, const double* theta,
                     dpvi_model_t** out) {
  if (!out || side < 1) return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    std::vector<double> field;
    if (theta) field.assign(theta, theta + side * side);
    return wrap_model(
        std::make_unique<dpvi::IsingModel>(side, beta, std::move(field)), out);
  });
}

int dpvi_model_dpmm_nig(const double* points, int n, int dim, double crp_alpha,
                        double tau, double a, double b, dpvi_model_t** out) {
  if (!points || !out || n < 1 || dim < 1)
    return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    std::vector<std::vector<double>> data(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      data[static_cast<std::size_t>(i)].assign(points + i * dim,
                                               points + (i + 1) * dim);
    dpvi::NigPrior prior{tau, a, b};
    return wrap_model(
        std::make_unique<dpvi::DpmmModel>(std::move(data), crp_alpha, prior),
        out);
  });
}

int dpvi_model_dpmm_niw(const double* points, int n, int dim, double crp_alpha,
                        double tau, double nu, dpvi_model_t** out) {
  if (!points || !out || n < 1 || dim < 1)
    return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    std::vector<std::vector<double>> data(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      data[static_cast<std::size_t>(i)].assign(points + i * dim,
                                               points + (i + 1) * dim);
    dpvi::NiwPrior prior;
    prior.tau = tau;
    prior.nu = nu;
    return wrap_model(
        std::make_unique<dpvi::DpmmModel>(std::move(data), crp_alpha, prior),
        out);
  });
}

int dpvi_model_ihmm(const int* symbols, int length, int alphabet, double alpha,
                    double gamma, double emission_conc, dpvi_model_t** out) {
  if (!symbols || !out || length < 1)
    return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    std::vector<int> obs(symbols, symbols + length);
    return wrap_model(std::make_unique<dpvi::IhmmModel>(
                          std::move(obs), alphabet, alpha, gamma, emission_conc),
                      out);
  });
}

int dpvi_model_irm(const int* type_sizes, int num_types,
                   const int* position_types, int arity, const int* cells,
                   const int* values, int num_cells, double crp_alpha,
                   double beta, dpvi_model_t** out) {
  if (!type_sizes || !position_types || !cells || !values || !out ||
      num_types < 1 || arity < 1 || num_cells < 1)
    return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    dpvi::RelationData rel;
    rel.type_sizes.assign(type_sizes, type_sizes + num_types);
    rel.position_type.assign(position_types, position_types + arity);
    rel.cells.resize(static_cast<std::size_t>(num_cells));
    for (int i = 0; i < num_cells; ++i) {
      auto& cell = rel.cells[static_cast<std::size_t>(i)];
      cell.entities.assign(cells + i * arity, cells + (i + 1) * arity);
      cell.value = values[i];
    }
    return wrap_model(
        std::make_unique<dpvi::IrmModel>(std::move(rel), crp_alpha, beta), out);
  });
}

void dpvi_model_free(dpvi_model_t* model) { delete model; }

int dpvi_model_num_vars(const dpvi_model_t* model, int* out) {
  if (!model || !out) return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  *out = model->impl->num_vars();
  return DPVI_OK;
}

int dpvi_model_log_score(const dpvi_model_t* model, const int32_t* assignment,
                         int length, double* out) {
  if (!model || !assignment || !out)
    return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    if (length != model->impl->num_vars())
      throw dpvi::Error("assignment length mismatch");
    dpvi::Assignment x(assignment, assignment + length);
    *out = model->impl->full_log_score(x);
    return DPVI_OK;
  });
}

int dpvi_exact_log_z(const dpvi_model_t* model, uint64_t cap, double* out) {
  if (!model || !out) return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    *out = dpvi::brute_force(*model->impl, cap).log_z;
    return DPVI_OK;
  });
}

int dpvi_run_sequential(const dpvi_model_t* model, int k,
                        dpvi_result_t** out) {
  if (!model || !out || k < 1)
    return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    auto res = std::make_unique<dpvi_result>();
    res->set = dpvi::sequential_dpvi(*model->impl, k);
    res->trace.push_back(dpvi::variational_bound(res->set));
    *out = res.release();
    return DPVI_OK;
  });
}

int dpvi_run_local(const dpvi_model_t* model, int k, double epsilon,
                   int max_sweeps, uint64_t init_seed, dpvi_result_t** out) {
  if (!model || !out || k < 1)
    return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    dpvi::Rng rng(init_seed);
    dpvi::ParticleSet init = dpvi::default_init(*model->impl, k, rng);
    dpvi::DpviResult run =
        dpvi::local_dpvi(*model->impl, std::move(init), k, epsilon, max_sweeps);
    auto res = std::make_unique<dpvi_result>();
    res->set = std::move(run.set);
    res->trace = std::move(run.trace);
    *out = res.release();
    return DPVI_OK;
  });
}

int dpvi_run_smoothing(const dpvi_model_t* model, int k, double epsilon,
                       int max_sweeps, dpvi_result_t** out) {
  if (!model || !out || k < 1)
    return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    dpvi::DpviResult run =
        dpvi::smoothing_dpvi(*model->impl, k, epsilon, max_sweeps);
    auto res = std::make_unique<dpvi_result>();
    res->set = std::move(run.set);
    res->trace = std::move(run.trace);
    *out = res.release();
    return DPVI_OK;
  });
}

int dpvi_result_bound(const dpvi_result_t* result, double* out) {
  if (!result || !out) return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    *out = dpvi::variational_bound(result->set);
    return DPVI_OK;
  });
}

int dpvi_result_num_particles(const dpvi_result_t* result, int* out) {
  if (!result || !out) return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  *out = static_cast<int>(result->set.size());
  return DPVI_OK;
}

int dpvi_result_log_weight(const dpvi_result_t* result, int index,
                           double* out) {
  if (!result || !out || index < 0 ||
      index >= static_cast<int>(result->set.size()))
    return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  *out = result->set.log_weights[static_cast<std::size_t>(index)];
  return DPVI_OK;
}

int dpvi_result_assignment(const dpvi_result_t* result, int index,
                           int32_t* buffer, int capacity) {
  if (!result || !buffer || index < 0 ||
      index >= static_cast<int>(result->set.size()))
    return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  const dpvi::Assignment& x =
      result->set.particles[static_cast<std::size_t>(index)].assignment;
  if (capacity < static_cast<int>(x.size()))
    return fail("buffer too small", DPVI_INVALID_ARGUMENT);
  std::memcpy(buffer, x.data(), x.size() * sizeof(int32_t));
  return DPVI_OK;
}

int dpvi_result_trace_length(const dpvi_result_t* result, int* out) {
  if (!result || !out) return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  *out = static_cast<int>(result->trace.size());
  return DPVI_OK;
}

int dpvi_result_trace(const dpvi_result_t* result, double* buffer,
                      int capacity) {
  if (!result || !buffer) return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  if (capacity < static_cast<int>(result->trace.size()))
    return fail("buffer too small", DPVI_INVALID_ARGUMENT);
  std::memcpy(buffer, result->trace.data(),
              result->trace.size() * sizeof(double));
  return DPVI_OK;
}

void dpvi_result_free(dpvi_result_t* result) { delete result; }

int dpvi_experiment_run(const char* experiment, const char* config_path,
                        const char* out_dir, int64_t seed, int k, int repeats,
                        char** summary_csv) {
  if (!experiment) return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    dpvi::exp::Config cfg;
    if (config_path) cfg = dpvi::exp::Config::parse_file(config_path);
    dpvi::exp::RunOverrides overrides;
    if (seed >= 0) overrides.seed = static_cast<std::uint64_t>(seed);
    if (k >= 0) overrides.k = k;
    if (repeats >= 0) overrides.repeats = repeats;
    dpvi::exp::ExperimentResult result = dpvi::exp::run_experiment(
        experiment, std::move(cfg), overrides, out_dir ? out_dir : "");
    if (summary_csv) *summary_csv = dup_string(result.summary_csv);
    return DPVI_OK;
  });
}

int dpvi_summarize_dir(const char* dir, char** csv_out) {
  if (!dir || !csv_out) return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    *csv_out = dup_string(dpvi::exp::summarize_dir(dir));
    return DPVI_OK;
  });
}

int dpvi_replay_records(const char* records_path, int* mismatches) {
  if (!records_path || !mismatches)
    return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    int bad = 0;
    for (const dpvi::exp::RunRecord& r :
         dpvi::exp::read_records(records_path))
      if (!dpvi::exp::replay_matches(r)) ++bad;
    *mismatches = bad;
    return DPVI_OK;
  });
}

int dpvi_oracle_report(const char* model, const char* config_path,
                       char** json_out) {
  if (!model || !json_out) return fail("bad arguments", DPVI_INVALID_ARGUMENT);
  return guarded([&] {
    dpvi::exp::Config cfg;
    if (config_path) cfg = dpvi::exp::Config::parse_file(config_path);
    *json_out = dup_string(dpvi::exp::oracle_report(model, cfg));
    return DPVI_OK;
  });
}

void dpvi_string_free(char* s) { delete[] s; }

}  // extern "C"
