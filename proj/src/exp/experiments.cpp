#include "exp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "baselines/forward_backward.hpp"
#include "baselines/gibbs.hpp"
#include "baselines/mean_field.hpp"
#include "baselines/particle_filter.hpp"
#include "core/engine.hpp"
#include "core/exact.hpp"
#include "core/weights.hpp"
#include "exp/datasets.hpp"
#include "metrics/metrics.hpp"
#include "models/binary_hmm.hpp"
#include "models/dpmm.hpp"
#include "models/ihmm.hpp"
#include "models/irm.hpp"
#include "models/ising.hpp"
#include "version.hpp"

namespace dpvi::exp {

namespace {

constexpr std::size_t kMaxStoredValues = 200000;

struct KeyDefault {
  const char* key;
  const char* def;  // nullptr: optional, no materialized default
};

const std::vector<KeyDefault>& experiment_keys(const std::string& experiment) {
  static const std::map<std::string, std::vector<KeyDefault>> kTable = {
      {"hmm-ess-sweep",
       {{"experiment", nullptr},
        {"seed", "1"},
        {"k", "100"},
        {"length", "200"},
        {"alpha0", "0.2"},
        {"alpha1", "0.1"},
        {"beta0", "0.3"},
        {"beta1", "0.2"},
        {"thresholds", "1,2,5,10,20,50,100"},
        {"sequences", "5"},
        {"reruns", "5"}}},
      {"dpmm-synthetic",
       {{"experiment", nullptr},
        {"seed", "1"},
        {"algorithm", "dpvi"},
        {"k", "20"},
        {"repeats", "20"},
        {"dataset", "D1"},
        {"n_points", "200"},
        {"crp_alpha", "0.5"},
        // pseudo-count of the cluster-mean prior; 1/25 keeps the prior mean
        // loose enough for well-separated clusters to be discovered
        {"tau", "0.04"},
        {"a", "1"},
        {"b", "1"},
        {"sweeps", "100"},
        {"resample", "multinomial"}}},
      {"dpmm-csv",
       {{"experiment", nullptr},
        {"seed", "1"},
        {"algorithm", "dpvi"},
        {"k", "20"},
        {"repeats", "1"},
        {"data", nullptr},
        {"labels_file", nullptr},
        {"likelihood", "niw"},
        {"crp_alpha", "0.1"},
        {"tau", "0.01"},
        {"a", "1"},
        {"b", "1"},
        {"nu", nullptr},
        {"sweeps", "100"},
        {"resample", "stratified"}}},
      {"ihmm-synthetic",
       {{"experiment", nullptr},
        {"seed", "1"},
        {"algorithm", "dpvi"},
        {"k", "10"},
        {"repeats", "20"},
        {"data", nullptr},  // symbol ids, one per line; replaces generation
        {"length", "500"},
        {"hidden", "10"},
        {"symbols", "5"},
        {"trans_conc", "0.1"},
        {"emit_conc", "10"},
        {"alpha", "1"},
        {"gamma", "1"},
        {"eta", "1"},
        {"resample", "multinomial"},
        {"ess_threshold", nullptr},
        {"smooth_sweeps", "0"},
        {"epsilon", "1e-8"}}},
      {"ihmm-text",
       {{"experiment", nullptr},
        {"seed", "1"},
        {"algorithm", "dpvi"},
        {"k", "10"},
        {"repeats", "1"},
        {"data", nullptr},
        {"train_chars", "1000"},
        {"test_chars", "4000"},
        {"alpha", "1"},
        {"gamma", "1"},
        {"eta", "1"},
        {"resample", "multinomial"},
        {"ess_threshold", nullptr},
        {"delta", "1"},
        {"pred_samples", "50"}}},
      {"irm",
       {{"experiment", nullptr},
        {"seed", "1"},
        {"algorithm", "dpvi"},
        {"k", "20"},
        {"repeats", "1"},
        {"data", nullptr},
        {"mask", nullptr},  // held-out cell list; default draws with the seed
        {"heldout_frac", "0.2"},
        {"rows", "50"},
        {"cols", "85"},
        {"row_clusters", "5"},
        {"col_clusters", "8"},
        {"crp_alpha", "1"},
        {"beta", "1"},
        {"sweeps", "100"},
        {"epsilon", "1e-8"}}},
      {"ising-bound",
       {{"experiment", nullptr},
        {"seed", "1"},
        {"algorithm", "dpvi"},
        {"k", "2"},
        {"repeats", "1"},
        {"side", "10"},
        {"beta", "0.01"},
        {"theta_file", nullptr},  // one field value per node, row-major
        {"epsilon", "1e-8"},
        {"max_sweeps", "100"},
        {"mf_tol", "1e-10"},
        {"mf_iters", "2000"},
        {"mf_damping", "0"},
        {"mf_init", "zero"}}},
  };
  auto it = kTable.find(experiment);
  if (it == kTable.end()) throw Error("unknown experiment: " + experiment);
  return it->second;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

std::vector<std::int32_t> to_i32(const std::vector<int>& v) {
  return std::vector<std::int32_t>(v.begin(), v.end());
}

int map_index(const std::vector<double>& log_weights) {
  int best = 0;
  for (std::size_t i = 1; i < log_weights.size(); ++i)
    if (log_weights[i] > log_weights[static_cast<std::size_t>(best)])
      best = static_cast<int>(i);
  return best;
}

int sampled_index(const std::vector<double>& weights, Rng& rng) {
  return rng.categorical(weights);
}

int count_clusters(const Assignment& x) {
  std::vector<std::int32_t> seen;
  for (std::int32_t v : x)
    if (std::find(seen.begin(), seen.end(), v) == seen.end()) seen.push_back(v);
  return static_cast<int>(seen.size());
}

BinaryHmmParams hmm_params_from(const Config& cfg) {
  BinaryHmmParams p;
  p.alpha0 = cfg.get_double("alpha0", 0.2);
  p.alpha1 = cfg.get_double("alpha1", 0.1);
  p.beta0 = cfg.get_double("beta0", 0.3);
  p.beta1 = cfg.get_double("beta1", 0.2);
  return p;
}

int mixture_variant(const std::string& name) {
  std::string s = name;
  if (!s.empty() && (s[0] == 'D' || s[0] == 'd')) s = s.substr(1);
  try {
    int variant = std::stoi(s);
    if (variant >= 1 && variant <= 6) return variant;
  } catch (const std::exception&) {
  }
  throw Error("unknown dataset name: " + name + " (want D1..D6)");
}

ResamplePolicy policy_from(const Config& cfg) {
  std::string kind = cfg.get_string("resample", "multinomial");
  if (kind == "never") return ResamplePolicy::never();
  if (kind == "multinomial") return ResamplePolicy::multinomial();
  if (kind == "stratified") return ResamplePolicy::stratified();
  if (kind == "ess")
    return ResamplePolicy::ess_threshold(cfg.get_double("ess_threshold"));
  throw Error("unknown resample policy: " + kind);
}

void store_particles(RunRecord& rec, const std::vector<Particle>& particles,
                     const std::vector<double>& log_weights) {
  rec.log_weights = log_weights;
  std::size_t total = particles.empty()
                          ? 0
                          : particles.size() * particles[0].assignment.size();
  if (total <= kMaxStoredValues) {
    for (const Particle& p : particles) rec.assignments.push_back(p.assignment);
  } else {
    rec.assignments.push_back(
        particles[static_cast<std::size_t>(map_index(log_weights))].assignment);
  }
}

std::vector<double> weights_to_log(const std::vector<double>& w) {
  std::vector<double> lw(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    lw[i] = w[i] > 0.0 ? std::log(w[i]) : -std::numeric_limits<double>::infinity();
  return lw;
}

RunRecord base_record(const std::string& experiment, const Config& cfg,
                      int unit) {
  RunRecord rec;
  rec.experiment = experiment;
  rec.algorithm = cfg.get_string("algorithm", "");
  rec.k = static_cast<int>(cfg.get_int("k", 0));
  rec.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  rec.unit = unit;
  rec.config = cfg.values();
  rec.version = kVersion;
  return rec;
}

// ---------------------------------------------------------------------------
// hmm-ess-sweep

RunRecord run_hmm_sweep_unit(const Config& cfg, int unit) {
  auto seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  int k = static_cast<int>(cfg.get_int("k"));
  int length = static_cast<int>(cfg.get_int("length"));
  std::vector<double> thresholds = cfg.get_double_list("thresholds", {});
  int reruns = static_cast<int>(cfg.get_int("reruns"));
  BinaryHmmParams params = hmm_params_from(cfg);

  int block = 1 + static_cast<int>(thresholds.size()) * reruns;
  int sequence = unit / block;
  int rem = unit % block;

  Rng data_rng = Rng::derive(seed, "hmm-sweep-data", static_cast<std::uint64_t>(sequence));
  auto [hidden, obs] = sample_binary_hmm(params, length, data_rng);
  BinaryHmmModel model(params, obs);
  SmoothingResult exact = forward_backward(hmm_matrices(params), obs);

  RunRecord rec = base_record("hmm-ess-sweep", cfg, unit);
  rec.k = k;
  rec.group["sequence"] = std::to_string(sequence);

  // Filtering-time marginals: the distribution of x_n taken from the
  // particle approximation at the step that processes y_n, compared against
  // the exact posterior marginals. The whole-trajectory marginals of the
  // final set are kept as a secondary metric.
  std::vector<std::vector<double>> stepwise(
      static_cast<std::size_t>(length), std::vector<double>(2, 0.0));
  if (rem == 0) {
    rec.algorithm = "dpvi";
    ParticleSet set = sequential_dpvi(
        model, k, [&](int n, const ParticleSet& current) {
          for (std::size_t i = 0; i < current.size(); ++i)
            stepwise[static_cast<std::size_t>(n)][static_cast<std::size_t>(
                current.particles[i].assignment[static_cast<std::size_t>(n)])] +=
                std::exp(current.log_weights[i]);
        });
    rec.metrics["total_marginal_error"] =
        metrics::total_marginal_error(stepwise, exact.marginals);
    rec.metrics["trajectory_marginal_error"] = metrics::total_marginal_error(
        particle_marginals(set, 2), exact.marginals);
    rec.metrics["bound"] = variational_bound(set);
    rec.metrics["exact_loglik"] = exact.log_likelihood;
    store_particles(rec, set.particles, set.log_weights);
  } else {
    int idx = rem - 1;
    int t = idx / reruns;
    int rerun = idx % reruns;
    rec.algorithm = "pf";
    rec.group["threshold"] = fmt(thresholds[static_cast<std::size_t>(t)]);
    rec.group["rerun"] = std::to_string(rerun);
    Rng rng = Rng::derive(seed, "hmm-sweep-pf", static_cast<std::uint64_t>(unit));
    FilterResult res = particle_filter(
        model, k,
        ResamplePolicy::ess_threshold(thresholds[static_cast<std::size_t>(t)]),
        rng,
        [&](int n, const std::vector<Particle>& particles,
            const std::vector<double>& weights) {
          for (std::size_t i = 0; i < particles.size(); ++i)
            stepwise[static_cast<std::size_t>(n)][static_cast<std::size_t>(
                particles[i].assignment[static_cast<std::size_t>(n)])] +=
                weights[i];
        });
    rec.metrics["total_marginal_error"] =
        metrics::total_marginal_error(stepwise, exact.marginals);
    rec.metrics["trajectory_marginal_error"] = metrics::total_marginal_error(
        filter_marginals(res, 2), exact.marginals);
    rec.metrics["resamples"] = res.resample_count;
    rec.metrics["exact_loglik"] = exact.log_likelihood;
    store_particles(rec, res.particles, weights_to_log(res.weights));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// dpmm-synthetic / dpmm-csv

RunRecord run_dpmm_unit(const std::string& experiment, const Config& cfg,
                        int unit) {
  auto seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  int k = static_cast<int>(cfg.get_int("k"));
  std::string algorithm = cfg.get_string("algorithm");

  std::vector<std::vector<double>> points;
  std::vector<std::int32_t> labels;
  if (experiment == "dpmm-synthetic") {
    Rng data_rng = Rng::derive(seed, "dpmm-data", static_cast<std::uint64_t>(unit));
    LabeledPoints lp = gen_gaussian_mixture(
        mixture_variant(cfg.get_string("dataset")),
        static_cast<int>(cfg.get_int("n_points")), data_rng);
    points = std::move(lp.points);
    labels = std::move(lp.labels);
  } else {
    points = load_csv(cfg.get_string("data"));
    if (cfg.has("labels_file")) {
      for (const auto& row : load_csv(cfg.get_string("labels_file")))
        labels.push_back(static_cast<std::int32_t>(row.at(0)));
      if (labels.size() != points.size())
        throw Error("labels/points length mismatch");
    }
  }

  Rng order_rng = Rng::derive(seed, "dpmm-order", static_cast<std::uint64_t>(unit));
  std::vector<int> order =
      random_permutation(static_cast<int>(points.size()), order_rng);
  std::vector<std::vector<double>> perm_points(points.size());
  std::vector<std::int32_t> perm_labels(labels.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    perm_points[i] = points[static_cast<std::size_t>(order[i])];
  for (std::size_t i = 0; i < labels.size(); ++i)
    perm_labels[i] = labels[static_cast<std::size_t>(order[i])];

  std::string likelihood = cfg.get_string("likelihood", "nig");
  std::unique_ptr<DpmmModel> model;
  double crp_alpha = cfg.get_double("crp_alpha");
  if (likelihood == "nig") {
    NigPrior prior{cfg.get_double("tau"), cfg.get_double("a"),
                   cfg.get_double("b")};
    model = std::make_unique<DpmmModel>(perm_points, crp_alpha, prior);
  } else if (likelihood == "niw") {
    NiwPrior prior;
    prior.tau = cfg.get_double("tau");
    int dim = static_cast<int>(perm_points[0].size());
    prior.nu = cfg.get_double("nu", dim + 1);
    model = std::make_unique<DpmmModel>(perm_points, crp_alpha, prior);
  } else {
    throw Error("unknown likelihood: " + likelihood);
  }

  RunRecord rec = base_record(experiment, cfg, unit);
  rec.data_order = order;
  Rng run_rng = Rng::derive(seed, "dpmm-run", static_cast<std::uint64_t>(unit));

  Assignment estimate;
  std::vector<double> per_particle_v;
  if (algorithm == "dpvi") {
    ParticleSet set = sequential_dpvi(*model, k);
    estimate = set.particles[static_cast<std::size_t>(map_index(set.log_weights))]
                   .assignment;
    rec.metrics["bound"] = variational_bound(set);
    rec.traces["bound"] = {rec.metrics["bound"]};
    if (!perm_labels.empty()) {
      for (const Particle& p : set.particles)
        per_particle_v.push_back(metrics::v_measure(p.assignment, perm_labels));
      rec.metrics["v_measure_weighted"] = metrics::weighted_particle_metric(
          per_particle_v, set.log_weights);
    }
    store_particles(rec, set.particles, set.log_weights);
  } else if (algorithm == "pf") {
    FilterResult res = particle_filter(*model, k, policy_from(cfg), run_rng);
    estimate =
        res.particles[static_cast<std::size_t>(sampled_index(res.weights, run_rng))]
            .assignment;
    std::vector<double> lw = weights_to_log(res.weights);
    if (!perm_labels.empty()) {
      for (const Particle& p : res.particles)
        per_particle_v.push_back(metrics::v_measure(p.assignment, perm_labels));
      rec.metrics["v_measure_weighted"] =
          metrics::weighted_particle_metric(per_particle_v, lw);
    }
    rec.metrics["resamples"] = res.resample_count;
    store_particles(rec, res.particles, lw);
  } else if (algorithm == "gibbs") {
    Particle p = model->make_particle(model->prior_sample(run_rng));
    collapsed_gibbs(*model, p, static_cast<int>(cfg.get_int("sweeps")), run_rng);
    estimate = p.assignment;
    rec.metrics["log_score"] = p.log_score;
    rec.assignments.push_back(p.assignment);
    rec.log_weights = {0.0};
  } else {
    throw Error("unknown algorithm for " + experiment + ": " + algorithm);
  }

  rec.metrics["clusters"] = count_clusters(estimate);
  if (!perm_labels.empty())
    rec.metrics["v_measure"] = metrics::v_measure(estimate, perm_labels);
  return rec;
}

// ---------------------------------------------------------------------------
// ihmm-synthetic

RunRecord run_ihmm_synthetic_unit(const Config& cfg, int unit) {
  auto seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  int k = static_cast<int>(cfg.get_int("k"));
  std::string algorithm = cfg.get_string("algorithm");

  std::vector<int> observed;
  std::vector<int> hidden;
  SyntheticHmm generator;
  int alphabet = static_cast<int>(cfg.get_int("symbols"));
  if (cfg.has("data")) {
    observed = load_symbol_sequence(cfg.get_string("data"));
    for (int v : observed) alphabet = std::max(alphabet, v + 1);
  } else {
    Rng data_rng =
        Rng::derive(seed, "ihmm-data", static_cast<std::uint64_t>(unit));
    generator = gen_hmm_data(static_cast<int>(cfg.get_int("hidden")),
                             alphabet,
                             static_cast<int>(cfg.get_int("length")), data_rng,
                             cfg.get_double("trans_conc"),
                             cfg.get_double("emit_conc"));
    observed = generator.observed;
    hidden = generator.hidden;
  }
  IhmmModel model(observed, alphabet, cfg.get_double("alpha"),
                  cfg.get_double("gamma"), cfg.get_double("eta"));

  RunRecord rec = base_record("ihmm-synthetic", cfg, unit);
  Rng run_rng = Rng::derive(seed, "ihmm-run", static_cast<std::uint64_t>(unit));

  Assignment estimate;
  if (algorithm == "dpvi") {
    int smooth = static_cast<int>(cfg.get_int("smooth_sweeps"));
    ParticleSet set;
    if (smooth > 0) {
      DpviResult res =
          smoothing_dpvi(model, k, cfg.get_double("epsilon"), smooth);
      rec.traces["bound"] = res.trace;
      set = std::move(res.set);
    } else {
      set = sequential_dpvi(model, k);
      rec.traces["bound"] = {variational_bound(set)};
    }
    estimate = set.particles[static_cast<std::size_t>(map_index(set.log_weights))]
                   .assignment;
    rec.metrics["bound"] = variational_bound(set);
    store_particles(rec, set.particles, set.log_weights);
  } else if (algorithm == "pf") {
    FilterResult res = particle_filter(model, k, policy_from(cfg), run_rng);
    estimate =
        res.particles[static_cast<std::size_t>(sampled_index(res.weights, run_rng))]
            .assignment;
    rec.metrics["resamples"] = res.resample_count;
    store_particles(rec, res.particles, weights_to_log(res.weights));
  } else {
    throw Error("unknown algorithm for ihmm-synthetic: " + algorithm);
  }

  if (!hidden.empty()) {
    rec.metrics["matched_hamming"] =
        metrics::matched_hamming(estimate, to_i32(hidden));

    // Monte Carlo reference lines: the error of an exact posterior draw
    // under the generating parameters, and of uniform random labels.
    HmmMatrices truth_hmm;
    int n_hidden = static_cast<int>(cfg.get_int("hidden"));
    for (double v : generator.init) truth_hmm.log_init.push_back(std::log(v));
    truth_hmm.log_trans.assign(static_cast<std::size_t>(n_hidden), {});
    truth_hmm.log_emit.assign(static_cast<std::size_t>(n_hidden), {});
    for (int s = 0; s < n_hidden; ++s) {
      for (double v : generator.trans[static_cast<std::size_t>(s)])
        truth_hmm.log_trans[static_cast<std::size_t>(s)].push_back(std::log(v));
      for (double v : generator.emit[static_cast<std::size_t>(s)])
        truth_hmm.log_emit[static_cast<std::size_t>(s)].push_back(std::log(v));
    }
    Rng ref_rng = Rng::derive(seed, "ihmm-ref", static_cast<std::uint64_t>(unit));
    const int draws = 8;
    double floor_acc = 0.0, ceiling_acc = 0.0;
    for (int d = 0; d < draws; ++d) {
      std::vector<int> posterior_path =
          sample_posterior_path(truth_hmm, observed, ref_rng);
      floor_acc +=
          metrics::matched_hamming(to_i32(posterior_path), to_i32(hidden));
      std::vector<std::int32_t> uniform(hidden.size());
      for (auto& v : uniform)
        v = static_cast<std::int32_t>(
            ref_rng.uniform_below(static_cast<std::uint32_t>(n_hidden)));
      ceiling_acc += metrics::matched_hamming(uniform, to_i32(hidden));
    }
    rec.metrics["hamming_floor_estimate"] = floor_acc / draws;
    rec.metrics["hamming_ceiling_estimate"] = ceiling_acc / draws;
  }
  rec.metrics["clusters"] = count_clusters(estimate);
  return rec;
}

// ---------------------------------------------------------------------------
// ihmm-text

RunRecord run_ihmm_text_unit(const Config& cfg, int unit) {
  auto seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  int k = static_cast<int>(cfg.get_int("k"));
  std::string algorithm = cfg.get_string("algorithm");

  TextSequence text = load_text_sequence(
      cfg.get_string("data"), static_cast<int>(cfg.get_int("train_chars")),
      static_cast<int>(cfg.get_int("test_chars")));
  int alphabet = static_cast<int>(text.alphabet.size());
  IhmmModel model(text.train, alphabet, cfg.get_double("alpha"),
                  cfg.get_double("gamma"), cfg.get_double("eta"));
  double delta = cfg.get_double("delta");

  RunRecord rec = base_record("ihmm-text", cfg, unit);
  rec.metrics["alphabet"] = alphabet;
  Rng run_rng = Rng::derive(seed, "ihmm-text-run", static_cast<std::uint64_t>(unit));

  std::vector<Particle> particles;
  std::vector<double> log_weights;
  if (algorithm == "dpvi") {
    ParticleSet set = sequential_dpvi(model, k);
    rec.metrics["bound"] = variational_bound(set);
    log_weights = set.log_weights;
    particles = std::move(set.particles);
  } else if (algorithm == "pf") {
    FilterResult res = particle_filter(model, k, policy_from(cfg), run_rng);
    rec.metrics["resamples"] = res.resample_count;
    log_weights = weights_to_log(res.weights);
    particles = std::move(res.particles);
  } else {
    throw Error("unknown algorithm for ihmm-text: " + algorithm);
  }

  std::vector<double> predictive(particles.size());
  for (std::size_t i = 0; i < particles.size(); ++i) {
    IhmmModel::PointEstimates pe = model.point_estimates(particles[i]);
    predictive[i] = metrics::predictive_loglik_hmm(
        pe.init, pe.trans, pe.emit_counts, alphabet, delta, text.test);
  }
  rec.metrics["predictive_ll"] =
      metrics::weighted_particle_metric(predictive, log_weights);

  std::vector<double> weights(log_weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i)
    weights[i] = std::exp(log_weights[i]);
  Rng pred_rng = Rng::derive(seed, "ihmm-text-pred", static_cast<std::uint64_t>(unit));
  int samples = static_cast<int>(cfg.get_int("pred_samples"));
  double acc = 0.0;
  for (int s = 0; s < samples; ++s)
    acc += predictive[static_cast<std::size_t>(sampled_index(weights, pred_rng))];
  rec.metrics["predictive_ll_sampled"] = acc / samples;

  int best = map_index(log_weights);
  rec.metrics["clusters"] =
      count_clusters(particles[static_cast<std::size_t>(best)].assignment);
  store_particles(rec, particles, log_weights);
  return rec;
}

// ---------------------------------------------------------------------------
// irm

RunRecord run_irm_unit(const Config& cfg, int unit) {
  auto seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  int k = static_cast<int>(cfg.get_int("k"));
  std::string algorithm = cfg.get_string("algorithm");
  int sweeps = static_cast<int>(cfg.get_int("sweeps"));
  double epsilon = cfg.get_double("epsilon");

  RelationData rel;
  if (cfg.has("data")) {
    rel = load_relation(cfg.get_string("data"));
  } else {
    Rng gen_rng = Rng::derive(seed, "irm-data", 0);
    rel = gen_block_relation(static_cast<int>(cfg.get_int("rows")),
                             static_cast<int>(cfg.get_int("cols")),
                             static_cast<int>(cfg.get_int("row_clusters")),
                             static_cast<int>(cfg.get_int("col_clusters")),
                             gen_rng)
              .relation;
  }
  std::vector<RelationData::Cell> heldout;
  if (cfg.has("mask")) {
    heldout = hold_out_from_file(rel, cfg.get_string("mask"));
  } else {
    Rng mask_rng = Rng::derive(seed, "irm-mask", 0);
    heldout = hold_out_cells(rel, cfg.get_double("heldout_frac"), mask_rng);
  }
  IrmModel model(rel, cfg.get_double("crp_alpha"), cfg.get_double("beta"));

  RunRecord rec = base_record("irm", cfg, unit);
  rec.metrics["train_cells"] = static_cast<double>(rel.cells.size());
  rec.metrics["heldout_cells"] = static_cast<double>(heldout.size());
  Rng run_rng = Rng::derive(seed, "irm-run", static_cast<std::uint64_t>(unit));

  auto heldout_of = [&](const Particle& p) {
    return model.heldout_log_likelihood(p, heldout);
  };

  if (algorithm == "dpvi") {
    ParticleSet set = default_init(model, k, run_rng);
    double bound = variational_bound(set);
    rec.traces["bound"] = {bound};
    auto weighted_heldout = [&]() {
      std::vector<double> vals;
      for (const Particle& p : set.particles) vals.push_back(heldout_of(p));
      return metrics::weighted_particle_metric(vals, set.log_weights);
    };
    rec.traces["heldout_ll"] = {weighted_heldout()};
    int ran = 0;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      DpviResult step = local_dpvi(model, std::move(set), k, epsilon, 1);
      set = std::move(step.set);
      double next = step.trace.back();
      rec.traces["bound"].push_back(next);
      rec.traces["heldout_ll"].push_back(weighted_heldout());
      ran = sweep + 1;
      if (std::abs(next - bound) <= epsilon) break;
      bound = next;
    }
    rec.metrics["sweeps_run"] = ran;
    rec.metrics["bound"] = variational_bound(set);
    rec.metrics["heldout_ll"] = rec.traces["heldout_ll"].back();
    int best = map_index(set.log_weights);
    rec.metrics["heldout_ll_map"] =
        heldout_of(set.particles[static_cast<std::size_t>(best)]);
    store_particles(rec, set.particles, set.log_weights);
  } else if (algorithm == "gibbs") {
    Particle p = model.make_particle(model.prior_sample(run_rng));
    rec.traces["heldout_ll"] = {heldout_of(p)};
    collapsed_gibbs(model, p, sweeps, run_rng,
                    [&](int, const Particle& cur) {
                      rec.traces["heldout_ll"].push_back(heldout_of(cur));
                    });
    rec.metrics["heldout_ll"] = rec.traces["heldout_ll"].back();
    rec.metrics["log_score"] = p.log_score;
    rec.assignments.push_back(p.assignment);
    rec.log_weights = {0.0};
  } else {
    throw Error("unknown algorithm for irm: " + algorithm);
  }
  return rec;
}

// ---------------------------------------------------------------------------
// ising-bound

RunRecord run_ising_unit(const Config& cfg, int unit) {
  auto seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  int k = static_cast<int>(cfg.get_int("k"));
  std::string algorithm = cfg.get_string("algorithm");
  std::vector<double> theta;
  if (cfg.has("theta_file"))
    for (const auto& row : load_csv(cfg.get_string("theta_file")))
      theta.push_back(row.at(0));
  IsingModel model(static_cast<int>(cfg.get_int("side")),
                   cfg.get_double("beta"), std::move(theta));

  RunRecord rec = base_record("ising-bound", cfg, unit);
  rec.group["beta"] = fmt(model.beta());

  if (algorithm == "dpvi") {
    Rng rng = Rng::derive(seed, "ising-init", static_cast<std::uint64_t>(unit));
    ParticleSet init = default_init(model, k, rng);
    DpviResult res =
        local_dpvi(model, std::move(init), k, cfg.get_double("epsilon"),
                   static_cast<int>(cfg.get_int("max_sweeps")));
    rec.traces["bound"] = res.trace;
    rec.metrics["bound"] = res.trace.back();
    rec.metrics["sweeps_run"] = res.sweeps;
    rec.metrics["particles"] = static_cast<double>(res.set.size());
    store_particles(rec, res.set.particles, res.set.log_weights);
  } else if (algorithm == "mean-field") {
    std::vector<double> init;
    if (cfg.get_string("mf_init") == "random") {
      Rng rng = Rng::derive(seed, "ising-mf", static_cast<std::uint64_t>(unit));
      init.resize(static_cast<std::size_t>(model.num_vars()));
      for (double& m : init) m = 0.2 * (rng.uniform() - 0.5);
    }
    MeanFieldResult res = mean_field_ising(
        model, init, cfg.get_double("mf_tol"),
        static_cast<int>(cfg.get_int("mf_iters")), cfg.get_double("mf_damping"));
    rec.traces["bound"] = res.bound_trace;
    rec.metrics["bound"] = res.bound;
    rec.metrics["residual"] = res.residual;
    rec.metrics["sweeps_run"] = res.sweeps;
  } else {
    throw Error("unknown algorithm for ising-bound: " + algorithm);
  }
  return rec;
}

}  // namespace

Config resolve_config(const std::string& experiment, Config cfg,
                      const RunOverrides& overrides) {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) ==
      kExperiments.end())
    throw Error("unknown experiment: " + experiment);
  cfg.set("experiment", experiment);
  if (overrides.seed) cfg.set("seed", std::to_string(*overrides.seed));
  if (overrides.k) cfg.set("k", std::to_string(*overrides.k));
  if (overrides.repeats) cfg.set("repeats", std::to_string(*overrides.repeats));

  const auto& keys = experiment_keys(experiment);
  std::vector<std::string> allowed;
  for (const auto& kd : keys) allowed.push_back(kd.key);
  cfg.require_known_keys(allowed);
  for (const auto& kd : keys)
    if (kd.def != nullptr && !cfg.has(kd.key)) cfg.set(kd.key, kd.def);
  return cfg;
}

int total_units(const std::string& experiment, const Config& cfg) {
  if (experiment == "hmm-ess-sweep") {
    auto thresholds = cfg.get_double_list("thresholds", {});
    return static_cast<int>(cfg.get_int("sequences")) *
           (1 + static_cast<int>(thresholds.size()) *
                    static_cast<int>(cfg.get_int("reruns")));
  }
  return static_cast<int>(cfg.get_int("repeats"));
}

RunRecord run_unit(const std::string& experiment, const Config& cfg,
                   int unit) {
  auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  if (experiment == "hmm-ess-sweep") {
    rec = run_hmm_sweep_unit(cfg, unit);
  } else if (experiment == "dpmm-synthetic" || experiment == "dpmm-csv") {
    rec = run_dpmm_unit(experiment, cfg, unit);
  } else if (experiment == "ihmm-synthetic") {
    rec = run_ihmm_synthetic_unit(cfg, unit);
  } else if (experiment == "ihmm-text") {
    rec = run_ihmm_text_unit(cfg, unit);
  } else if (experiment == "irm") {
    rec = run_irm_unit(cfg, unit);
  } else if (experiment == "ising-bound") {
    rec = run_ising_unit(cfg, unit);
  } else {
    throw Error("unknown experiment: " + experiment);
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return rec;
}

ExperimentResult run_experiment(const std::string& experiment, Config raw,
                                const RunOverrides& overrides,
                                const std::string& out_dir) {
  Config cfg = resolve_config(experiment, std::move(raw), overrides);
  int units = total_units(experiment, cfg);
  if (units < 1) throw Error("experiment has no work units");

  int workers = 0;
  if (const char* env = std::getenv("DPVI_WORKERS")) workers = std::atoi(env);
  if (workers < 1)
    workers = static_cast<int>(
        std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, units);

  std::vector<RunRecord> records(static_cast<std::size_t>(units));
  std::vector<std::string> failures(static_cast<std::size_t>(units));
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      int u = next.fetch_add(1);
      if (u >= units) return;
      try {
        records[static_cast<std::size_t>(u)] = run_unit(experiment, cfg, u);
      } catch (const std::exception& e) {
        failures[static_cast<std::size_t>(u)] = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (int u = 0; u < units; ++u)
    if (!failures[static_cast<std::size_t>(u)].empty())
      throw Error(experiment + " unit " + std::to_string(u) + ": " +
                  failures[static_cast<std::size_t>(u)]);

  ExperimentResult result;
  result.records = std::move(records);
  result.summary_csv = summarize_records(result.records);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ostringstream lines;
    for (const RunRecord& r : result.records) lines << r.to_json() << "\n";
    write_file_atomic(out_dir + "/records.jsonl", lines.str());
    write_file_atomic(out_dir + "/summary.csv", result.summary_csv);
    if (experiment == "ihmm-text") {
      // record the symbol mapping so sequences round-trip
      TextSequence text = load_text_sequence(
          cfg.get_string("data"), static_cast<int>(cfg.get_int("train_chars")),
          static_cast<int>(cfg.get_int("test_chars")));
      write_file_atomic(out_dir + "/alphabet.txt",
                        alphabet_table_string(text.alphabet));
    }
  }
  return result;
}

RunRecord replay(const RunRecord& record) {
  Config cfg;
  for (const auto& [key, value] : record.config) cfg.set(key, value);
  return run_unit(record.experiment, cfg, record.unit);
}

bool replay_matches(const RunRecord& record) {
  return replay(record).fingerprint() == record.fingerprint();
}

std::string oracle_report(const std::string& model, const Config& cfg) {
  nlohmann::json out;
  if (model == "hmm") {
    cfg.require_known_keys({"alpha0", "alpha1", "beta0", "beta1", "length",
                            "seed", "obs"});
    BinaryHmmParams params = hmm_params_from(cfg);
    std::vector<int> obs;
    if (cfg.has("obs")) {
      for (double v : cfg.get_double_list("obs", {}))
        obs.push_back(static_cast<int>(v));
    } else {
      Rng rng(static_cast<std::uint64_t>(cfg.get_int("seed", 1)));
      obs = sample_binary_hmm(params, static_cast<int>(cfg.get_int("length", 10)),
                              rng)
                .second;
    }
    SmoothingResult sm = forward_backward(hmm_matrices(params), obs);
    out["log_z"] = sm.log_likelihood;
    out["marginals"] = sm.marginals;
    if (obs.size() <= 20) {
      BinaryHmmModel m(params, obs);
      out["log_z_enumeration"] = brute_force(m).log_z;
    }
  } else if (model == "ising") {
    cfg.require_known_keys({"side", "beta"});
    IsingModel m(static_cast<int>(cfg.get_int("side", 3)),
                 cfg.get_double("beta", 0.2));
    if (m.side() <= 4) out["log_z_enumeration"] = ising_log_z_brute(m);
    if (m.side() <= 8) out["log_z_transfer"] = ising_log_z_transfer(m);
  } else if (model == "dpmm") {
    cfg.require_known_keys({"data", "likelihood", "crp_alpha", "tau", "a", "b",
                            "nu", "cap"});
    auto points = load_csv(cfg.get_string("data"));
    auto cap = static_cast<std::uint64_t>(cfg.get_int("cap", 1 << 20));
    std::string likelihood = cfg.get_string("likelihood", "nig");
    std::unique_ptr<DpmmModel> m;
    if (likelihood == "nig") {
      NigPrior prior{cfg.get_double("tau", 25.0), cfg.get_double("a", 1.0),
                     cfg.get_double("b", 1.0)};
      m = std::make_unique<DpmmModel>(points, cfg.get_double("crp_alpha", 0.5),
                                      prior);
    } else {
      NiwPrior prior;
      prior.tau = cfg.get_double("tau", 0.01);
      prior.nu = cfg.get_double("nu", static_cast<double>(points[0].size()) + 1);
      m = std::make_unique<DpmmModel>(points, cfg.get_double("crp_alpha", 0.1),
                                      prior);
    }
    ExactPosterior post = brute_force(*m, cap);
    out["log_z"] = post.log_z;
    out["states"] = post.joint.size();
  } else if (model == "irm") {
    cfg.require_known_keys({"data", "crp_alpha", "beta", "heldout_frac",
                            "seed", "cap"});
    RelationData rel = load_relation(cfg.get_string("data"));
    IrmModel m(rel, cfg.get_double("crp_alpha", 1.0),
               cfg.get_double("beta", 1.0));
    ExactPosterior post = brute_force(
        m, static_cast<std::uint64_t>(cfg.get_int("cap", 1 << 20)));
    out["log_z"] = post.log_z;
    out["states"] = post.joint.size();
  } else {
    throw Error("unknown oracle model: " + model +
                " (want hmm | ising | dpmm | irm)");
  }
  return out.dump(2);
}

}  // namespace dpvi::exp
