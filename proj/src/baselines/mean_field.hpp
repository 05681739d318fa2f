#pragma once

#include <vector>

#include "models/ising.hpp"

namespace dpvi {

struct MeanFieldResult {
  std::vector<double> m;  // per-node mean parameters in [-1, 1]
  double bound = 0.0;     // lower bound on log Z
  std::vector<double> bound_trace;
  double residual = 0.0;  // max |update| over the last sweep
  int sweeps = 0;
};

// Naive mean field for the lattice model: raster-scan coordinate updates
// m_i <- tanh(beta * sum of neighbor means + theta_i), stopping when the
// bound improves by less than tol. The bound includes the entropy term, so
// at beta = 0 it equals the exact log partition function. With damping > 0
// each update keeps that fraction of the old mean (the bound trace is only
// guaranteed monotone at damping 0).
MeanFieldResult mean_field_ising(const IsingModel& model,
                                 std::vector<double> init, double tol = 1e-10,
                                 int max_iters = 1000, double damping = 0.0);

}  // namespace dpvi
