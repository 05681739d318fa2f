#include "baselines/mean_field.hpp"

#include <cmath>

#include "util/stats_math.hpp"

namespace dpvi {

namespace {

double mf_bound(const IsingModel& model, const std::vector<double>& m) {
  int side = model.side();
  double beta = model.beta();
  const auto& theta = model.theta();
  double s = 0.0;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      std::size_t i = static_cast<std::size_t>(r * side + c);
      if (c + 1 < side) s += beta * m[i] * m[i + 1];
      if (r + 1 < side) s += beta * m[i] * m[i + static_cast<std::size_t>(side)];
      s += theta[i] * m[i];
      s += binary_entropy(0.5 * (1.0 + m[i]));
    }
  }
  return s;
}

}  // namespace

MeanFieldResult mean_field_ising(const IsingModel& model,
                                 std::vector<double> init, double tol,
                                 int max_iters, double damping) {
  if (tol <= 0.0) throw Error("tolerance must be positive");
  if (damping < 0.0 || damping >= 1.0)
    throw Error("damping must lie in [0, 1)");
  int n = model.num_vars();
  int side = model.side();
  if (init.empty()) init.assign(static_cast<std::size_t>(n), 0.0);
  if (static_cast<int>(init.size()) != n)
    throw Error("mean-field init length mismatch");

  MeanFieldResult res;
  res.m = std::move(init);
  res.bound = mf_bound(model, res.m);
  res.bound_trace.push_back(res.bound);

  double beta = model.beta();
  const auto& theta = model.theta();
  for (int iter = 0; iter < max_iters; ++iter) {
    double max_step = 0.0;
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) {
        std::size_t i = static_cast<std::size_t>(r * side + c);
        double field = theta[i];
        if (c > 0) field += beta * res.m[i - 1];
        if (c + 1 < side) field += beta * res.m[i + 1];
        if (r > 0) field += beta * res.m[i - static_cast<std::size_t>(side)];
        if (r + 1 < side)
          field += beta * res.m[i + static_cast<std::size_t>(side)];
        double updated =
            (1.0 - damping) * std::tanh(field) + damping * res.m[i];
        max_step = std::max(max_step, std::abs(updated - res.m[i]));
        res.m[i] = updated;
      }
    }
    double next = mf_bound(model, res.m);
    res.bound_trace.push_back(next);
    res.residual = max_step;
    res.sweeps = iter + 1;
    bool converged = std::abs(next - res.bound) <= tol;
    res.bound = next;
    if (converged) break;
  }
  return res;
}

}  // namespace dpvi
