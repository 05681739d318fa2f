#pragma once

#include <string>
#include <vector>

#include "core/types.hpp"
#include "util/rng.hpp"

namespace dpvi {

// Scoring interface implemented by every model. All scores are natural-log
// unnormalized joint probabilities, so candidate vectors from different
// particles are directly comparable.
//
// Two particle states are meaningful when calling per-variable operations:
//   - variable n assigned: full-conditional semantics (local moves);
//   - variable n unassigned and equal to the number of assigned variables:
//     prefix-extension semantics (sequential passes).
class DiscreteModel {
 public:
  virtual ~DiscreteModel() = default;

  virtual int num_vars() const = 0;

  // Number of candidate values for x_n in the context of particle p. For
  // growing-support models this is (live clusters) + 1, the extra slot being
  // a fresh cluster.
  virtual int support(const Particle& p, int n) const = 0;

  // Log joint score of a complete assignment, recomputed from scratch.
  virtual double full_log_score(const Assignment& x) const = 0;

  // Full joint log scores of the assignments candidate_assignment(p, n, m)
  // for m in [0, support(p, n)). Entry m may be -infinity.
  virtual std::vector<double> candidate_log_scores(const Particle& p,
                                                   int n) const = 0;

  virtual bool supports_prefix() const { return false; }

  // Joint log score of the prefix x_1..x_n with x_n = m, for each m.
  // Requires n == number of assigned variables.
  virtual std::vector<double> prefix_log_scores(const Particle& p,
                                                int n) const {
    (void)p;
    (void)n;
    throw Error("model does not support prefix scoring");
  }

  // Normalized log proposal over the prefix candidates for x_n, used by the
  // sampling baselines. Defaults to the locally-optimal choice (the
  // normalized one-step predictive); parametric models may propose from the
  // prior dynamics instead.
  virtual std::vector<double> proposal_log_probs(const Particle& p,
                                                 int n) const;

  // Assignment that results from choosing candidate m for variable n,
  // without materializing stats.
  virtual Assignment candidate_assignment(const Particle& p, int n,
                                          int m) const {
    Assignment x = p.assignment;
    x[static_cast<std::size_t>(n)] = m;
    return x;
  }

  // Applies candidate m at variable n to the particle: assignment, stats and
  // cached log score (the score computed by the candidate scorer is passed
  // through unchanged so caches stay bit-identical with selection).
  virtual void apply(Particle& p, int n, int m, double log_score) const = 0;

  // Particle with stats rebuilt from a complete assignment.
  virtual Particle make_particle(const Assignment& x) const = 0;

  // Particle with no variables assigned, ready for a sequential pass.
  virtual Particle make_empty_particle() const {
    Particle p;
    p.assignment.assign(static_cast<std::size_t>(num_vars()), kUnassigned);
    p.log_score = 0.0;
    return p;
  }

  // Canonical form of an assignment; label-symmetric models relabel clusters
  // by first appearance so partition-equal assignments compare equal.
  virtual Assignment canonicalize(const Assignment& x) const { return x; }

  // Byte key used for uniqueness tests within a particle set.
  std::string canonical_key(const Assignment& x) const {
    Assignment c = canonicalize(x);
    return std::string(reinterpret_cast<const char*>(c.data()),
                       c.size() * sizeof(std::int32_t));
  }

  virtual Assignment prior_sample(Rng& rng) const = 0;
};

// Relabels cluster ids by order of first appearance; kUnassigned passes
// through. Shared by the CRP-style models.
Assignment relabel_by_first_appearance(const Assignment& x);

}  // namespace dpvi
