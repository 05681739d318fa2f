#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/model.hpp"

namespace dpvi {

// Ground truth obtained by exhaustive enumeration, used as the oracle for
// exactness and conditional-distribution tests.
struct ExactPosterior {
  double log_z = 0.0;
  // marginals[n][v] = posterior probability of x_n = v (canonical labels).
  std::vector<std::vector<double>> marginals;
  // Canonical assignment and log score of every support point.
  std::vector<std::pair<Assignment, double>> joint;

  // Posterior probability of one canonical assignment.
  double posterior_prob(const Assignment& canonical) const;
};

// Enumerates every assignment reachable through the model's support
// (canonical label sequences for growing-support models). Throws when the
// support exceeds `cap` states.
ExactPosterior brute_force(const DiscreteModel& model,
                           std::uint64_t cap = 1u << 20);

// Absolute drift between a particle's cached log score and a from-scratch
// recomputation.
double audit_log_score_drift(const DiscreteModel& model, const Particle& p);

}  // namespace dpvi
