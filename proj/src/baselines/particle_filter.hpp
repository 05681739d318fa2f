#pragma once

#include <functional>
#include <vector>

#include "core/model.hpp"

namespace dpvi {

struct ResamplePolicy {
  enum class Kind { kNever, kAlwaysMultinomial, kAlwaysStratified, kEssThreshold };
  Kind kind = Kind::kAlwaysMultinomial;
  double threshold = 0.0;  // only for kEssThreshold, in [1, K]

  static ResamplePolicy never() { return {Kind::kNever, 0.0}; }
  static ResamplePolicy multinomial() { return {Kind::kAlwaysMultinomial, 0.0}; }
  static ResamplePolicy stratified() { return {Kind::kAlwaysStratified, 0.0}; }
  static ResamplePolicy ess_threshold(double t) {
    return {Kind::kEssThreshold, t};
  }
};

// Effective sample size 1 / sum(w^2) of normalized weights.
double ess(const std::vector<double>& weights);

// K iid categorical draws; returns chosen indices.
std::vector<int> multinomial_resample(const std::vector<double>& weights,
                                      int k, Rng& rng);

// One draw per stratum (u + j) / K; returns chosen indices.
std::vector<int> stratified_resample(const std::vector<double>& weights,
                                     int k, Rng& rng);

struct FilterResult {
  std::vector<Particle> particles;  // duplicates allowed
  std::vector<double> weights;      // normalized
  int resample_count = 0;
};

using FilterStepCallback = std::function<void(
    int n, const std::vector<Particle>&, const std::vector<double>& weights)>;

// Bootstrap filter whose proposal is the model's own normalized one-step
// predictive, so the incremental importance weight is the predictive
// normalizer. Resampling runs after each step's weight update, per policy;
// the callback sees each step's weighted particles before any resampling.
FilterResult particle_filter(const DiscreteModel& model, int k,
                             const ResamplePolicy& policy, Rng& rng,
                             const FilterStepCallback& on_step = nullptr);

// Weighted single-variable marginals of the filter output.
std::vector<std::vector<double>> filter_marginals(const FilterResult& res,
                                                  int num_values);

}  // namespace dpvi
