#include "baselines/gibbs.hpp"

#include <cmath>

#include "util/logsumexp.hpp"

namespace dpvi {

void collapsed_gibbs(const DiscreteModel& model, Particle& p, int sweeps,
                     Rng& rng,
                     const std::function<void(int, const Particle&)>& on_sweep) {
  int n_vars = model.num_vars();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int n = 0; n < n_vars; ++n) {
      std::vector<double> scores = model.candidate_log_scores(p, n);
      double z = logsumexp(scores);
      if (z == kNegInf) throw Error("all conditional scores are zero");
      std::vector<double> probs(scores.size());
      for (std::size_t m = 0; m < scores.size(); ++m)
        probs[m] = std::exp(scores[m] - z);
      int choice = rng.categorical(probs);
      model.apply(p, n, choice, scores[static_cast<std::size_t>(choice)]);
    }
    if (on_sweep) on_sweep(sweep, p);
  }
}

}  // namespace dpvi
