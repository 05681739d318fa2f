#pragma once

#include <functional>
#include <vector>

#include "core/model.hpp"
#include "core/types.hpp"

namespace dpvi {

// Single-variable candidate pool: every value of variable n for every
// particle. `prefix_mode` switches between full-conditional and
// prefix-extension scoring.
std::vector<Candidate> expand_candidates(const ParticleSet& set, int n,
                                         const DiscreteModel& model,
                                         bool prefix_mode = false);

// Keeps the <= K highest-scoring candidates with pairwise-distinct canonical
// keys, materializes them into particles and renormalizes weights. Ties break
// by (parent, value) order; -infinity candidates are dropped, shrinking the
// set when fewer than K viable continuations exist.
ParticleSet select_top_k(const std::vector<Candidate>& pool, int k,
                         const DiscreteModel& model, const ParticleSet& parents,
                         int n);

struct DpviResult {
  ParticleSet set;
  BoundTrace trace;  // bound before any sweep, then after each sweep
  int sweeps = 0;
};

// Coordinate-ascent refinement: full sweeps over all variables, each step
// re-selecting the top-K unique single-variable modifications, until the
// bound improves by less than epsilon or max_sweeps is reached.
DpviResult local_dpvi(const DiscreteModel& model, ParticleSet init, int k,
                      double epsilon = 1e-8, int max_sweeps = 100);

// One left-to-right filtering pass; after step n the set holds the top-K
// unique prefixes of x_1..x_n. The callback sees the selected set after
// every step.
using SequentialStepCallback = std::function<void(int n, const ParticleSet&)>;
ParticleSet sequential_dpvi(const DiscreteModel& model, int k,
                            const SequentialStepCallback& on_step = nullptr);

// Sequential pass followed by local refinement sweeps.
DpviResult smoothing_dpvi(const DiscreteModel& model, int k,
                          double epsilon = 1e-8, int max_sweeps = 100);

// Default initial set: sequential pass when the model supports prefixes,
// otherwise up to K distinct prior samples (bounded retries, may return
// fewer than K).
ParticleSet default_init(const DiscreteModel& model, int k, Rng& rng);

// Weighted single-variable marginals q_n(s) of a particle set over complete
// assignments. Rows are value distributions of each variable.
std::vector<std::vector<double>> particle_marginals(const ParticleSet& set,
                                                    int num_values);

}  // namespace dpvi
