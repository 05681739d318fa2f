#pragma once

#include <vector>

#include "models/binary_hmm.hpp"
#include "util/rng.hpp"

namespace dpvi {

// Parametric HMM in matrix form, everything in natural logs.
struct HmmMatrices {
  std::vector<double> log_init;                    // S
  std::vector<std::vector<double>> log_trans;      // S x S
  std::vector<std::vector<double>> log_emit;       // S x V
};

HmmMatrices hmm_matrices(const BinaryHmmParams& params);

struct SmoothingResult {
  double log_likelihood = 0.0;
  std::vector<std::vector<double>> marginals;  // N x S, rows sum to 1
};

// Log-space alpha recursion; returns log P(y_1..y_N).
double forward_log_likelihood(const HmmMatrices& hmm,
                              const std::vector<int>& obs);

// Full alpha/beta smoothing pass.
SmoothingResult forward_backward(const HmmMatrices& hmm,
                                 const std::vector<int>& obs);

// Exact posterior draw of the hidden path via forward filtering and
// backward sampling.
std::vector<int> sample_posterior_path(const HmmMatrices& hmm,
                                       const std::vector<int>& obs, Rng& rng);

}  // namespace dpvi
