#include "core/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "core/weights.hpp"
#include "util/logsumexp.hpp"

namespace dpvi {

std::vector<Candidate> expand_candidates(const ParticleSet& set, int n,
                                         const DiscreteModel& model,
                                         bool prefix_mode) {
  std::vector<Candidate> pool;
  for (std::size_t k = 0; k < set.particles.size(); ++k) {
    const Particle& p = set.particles[k];
    std::vector<double> scores = prefix_mode
                                     ? model.prefix_log_scores(p, n)
                                     : model.candidate_log_scores(p, n);
    for (std::size_t m = 0; m < scores.size(); ++m) {
      pool.push_back(Candidate{static_cast<std::int32_t>(k),
                               static_cast<std::int32_t>(n),
                               static_cast<std::int32_t>(m), scores[m]});
    }
  }
  return pool;
}

ParticleSet select_top_k(const std::vector<Candidate>& pool, int k,
                         const DiscreteModel& model, const ParticleSet& parents,
                         int n) {
  if (pool.empty()) throw Error("empty candidate pool");

  std::vector<const Candidate*> order;
  order.reserve(pool.size());
  for (const Candidate& c : pool)
    if (c.log_score != kNegInf) order.push_back(&c);
  if (order.empty()) throw Error("no viable continuation");

  std::sort(order.begin(), order.end(),
            [](const Candidate* a, const Candidate* b) {
              if (a->log_score != b->log_score)
                return a->log_score > b->log_score;
              if (a->parent != b->parent) return a->parent < b->parent;
              return a->value < b->value;
            });

  ParticleSet out;
  std::unordered_map<std::string, double> seen;
  for (const Candidate* c : order) {
    if (static_cast<int>(out.particles.size()) >= k) break;
    Assignment x = model.candidate_assignment(parents.particles[c->parent], n,
                                              c->value);
    std::string key = model.canonical_key(x);
    auto [it, inserted] = seen.emplace(std::move(key), c->log_score);
    if (!inserted) {
      // equal canonical assignments must agree on their score
      assert(std::abs(c->log_score - it->second) <=
             1e-6 * std::max(1.0, std::abs(it->second)));
      continue;
    }
    Particle child = parents.particles[c->parent].clone();
    model.apply(child, n, c->value, c->log_score);
    out.particles.push_back(std::move(child));
  }

  std::vector<double> scores;
  scores.reserve(out.particles.size());
  for (const Particle& p : out.particles) scores.push_back(p.log_score);
  out.log_weights = log_weights_from_scores(scores);
  return out;
}

DpviResult local_dpvi(const DiscreteModel& model, ParticleSet init, int k,
                      double epsilon, int max_sweeps) {
  if (epsilon <= 0.0) throw Error("epsilon must be positive");
  if (init.particles.empty()) throw Error("empty initial particle set");

  DpviResult res;
  res.set = std::move(init);
  double bound = variational_bound(res.set);
  res.trace.push_back(bound);

  int n_vars = model.num_vars();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int n = 0; n < n_vars; ++n) {
      std::vector<Candidate> pool = expand_candidates(res.set, n, model);
      res.set = select_top_k(pool, k, model, res.set, n);
    }
    double next = variational_bound(res.set);
    res.trace.push_back(next);
    res.sweeps = sweep + 1;
    if (std::abs(next - bound) <= epsilon) break;
    bound = next;
  }
  return res;
}

ParticleSet sequential_dpvi(const DiscreteModel& model, int k,
                            const SequentialStepCallback& on_step) {
  if (!model.supports_prefix())
    throw Error("sequential pass requires prefix scoring");
  ParticleSet set;
  set.particles.push_back(model.make_empty_particle());
  set.log_weights.assign(1, 0.0);

  int n_vars = model.num_vars();
  for (int n = 0; n < n_vars; ++n) {
    std::vector<Candidate> pool = expand_candidates(set, n, model, true);
    set = select_top_k(pool, k, model, set, n);
    if (on_step) on_step(n, set);
  }
  return set;
}

DpviResult smoothing_dpvi(const DiscreteModel& model, int k, double epsilon,
                          int max_sweeps) {
  ParticleSet filtered = sequential_dpvi(model, k);
  if (max_sweeps == 0) {
    DpviResult res;
    res.trace.push_back(variational_bound(filtered));
    res.set = std::move(filtered);
    return res;
  }
  return local_dpvi(model, std::move(filtered), k, epsilon, max_sweeps);
}

ParticleSet default_init(const DiscreteModel& model, int k, Rng& rng) {
  if (model.supports_prefix()) return sequential_dpvi(model, k);

  ParticleSet set;
  std::unordered_set<std::string> seen;
  int attempts = 0;
  const int max_attempts = 64 * k;
  while (static_cast<int>(set.particles.size()) < k &&
         attempts < max_attempts) {
    ++attempts;
    Assignment x = model.prior_sample(rng);
    std::string key = model.canonical_key(x);
    if (!seen.insert(std::move(key)).second) continue;
    set.particles.push_back(model.make_particle(x));
  }
  if (set.particles.empty()) throw Error("prior sampler produced no particles");
  std::vector<double> scores;
  for (const Particle& p : set.particles) scores.push_back(p.log_score);
  set.log_weights = log_weights_from_scores(scores);
  return set;
}

std::vector<std::vector<double>> particle_marginals(const ParticleSet& set,
                                                    int num_values) {
  if (set.particles.empty()) throw Error("marginals of an empty set");
  std::size_t n = set.particles[0].assignment.size();
  std::vector<std::vector<double>> marg(
      n, std::vector<double>(static_cast<std::size_t>(num_values), 0.0));
  for (std::size_t k = 0; k < set.particles.size(); ++k) {
    double w = std::exp(set.log_weights[k]);
    const Assignment& x = set.particles[k].assignment;
    for (std::size_t i = 0; i < n; ++i) {
      assert(x[i] >= 0 && x[i] < num_values);
      marg[i][static_cast<std::size_t>(x[i])] += w;
    }
  }
  return marg;
}

}  // namespace dpvi
