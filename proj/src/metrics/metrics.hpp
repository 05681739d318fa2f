#pragma once

#include <vector>

#include "core/types.hpp"

namespace dpvi::metrics {

// Summed L1 distance between per-variable distributions:
// sum_n sum_s |q_n(s) - p_n(s)|.
double total_marginal_error(const std::vector<std::vector<double>>& approx,
                            const std::vector<std::vector<double>>& exact);

// Harmonic mean of homogeneity and completeness from the label contingency
// table (natural-log entropies); 1 iff the clusterings agree up to
// relabeling, with either score defined as 1 when its entropy is zero.
double v_measure(const std::vector<std::int32_t>& predicted,
                 const std::vector<std::int32_t>& truth);

// Normalized Hamming distance after the label mapping that maximizes overlap
// (rectangular assignment problem).
double matched_hamming(const std::vector<std::int32_t>& predicted,
                       const std::vector<std::int32_t>& truth);

// Minimum-cost assignment of rows to columns for a square cost matrix;
// returns the column chosen for each row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost);

// Forward log-likelihood of a test sequence under a point-estimate HMM whose
// emission rows are add-delta smoothed: row s gives
// (count[s][v] + delta) / (sum_v count[s][v] + V * delta).
double predictive_loglik_hmm(const std::vector<double>& init,
                             const std::vector<std::vector<double>>& trans,
                             const std::vector<std::vector<int>>& emit_counts,
                             int alphabet, double delta,
                             const std::vector<int>& test);

// Weighted average of a per-particle metric over a particle set.
double weighted_particle_metric(const std::vector<double>& values,
                                const std::vector<double>& log_weights);

}  // namespace dpvi::metrics
