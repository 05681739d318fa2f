#pragma once

#include <array>
#include <vector>

#include "core/model.hpp"

namespace dpvi {

// Two-state HMM with fixed parameters. alpha_i is the probability of leaving
// state i, beta_i the probability of emitting the opposite symbol from state
// i; all four lie in (0, 0.5).
struct BinaryHmmParams {
  double alpha0 = 0.2;
  double alpha1 = 0.1;
  double beta0 = 0.3;
  double beta1 = 0.2;
  double init1 = 0.5;  // P(x_1 = 1)

  void validate() const;
  // trans[i][j] = P(x_n = j | x_{n-1} = i)
  std::array<std::array<double, 2>, 2> transition() const {
    return {{{1.0 - alpha0, alpha0}, {alpha1, 1.0 - alpha1}}};
  }
  // emit[i][y] = P(y | x = i)
  std::array<std::array<double, 2>, 2> emission() const {
    return {{{1.0 - beta0, beta0}, {beta1, 1.0 - beta1}}};
  }
};

class BinaryHmmModel final : public DiscreteModel {
 public:
  BinaryHmmModel(BinaryHmmParams params, std::vector<int> observations);

  const BinaryHmmParams& params() const { return params_; }
  const std::vector<int>& observations() const { return obs_; }

  int num_vars() const override { return static_cast<int>(obs_.size()); }
  int support(const Particle&, int) const override { return 2; }
  double full_log_score(const Assignment& x) const override;
  std::vector<double> candidate_log_scores(const Particle& p,
                                           int n) const override;
  bool supports_prefix() const override { return true; }
  std::vector<double> prefix_log_scores(const Particle& p, int n) const override;
  // Textbook bootstrap proposal: the transition prior, leaving the emission
  // likelihood as the importance weight.
  std::vector<double> proposal_log_probs(const Particle& p,
                                         int n) const override;
  void apply(Particle& p, int n, int m, double log_score) const override;
  Particle make_particle(const Assignment& x) const override;
  Assignment prior_sample(Rng& rng) const override;

  // Sum of the log factors touching position n: emission at n, transition
  // into n and transition out of n.
  double local_factors(const Assignment& x, int n, int value) const;

 private:
  BinaryHmmParams params_;
  std::vector<int> obs_;
  double log_trans_[2][2];
  double log_emit_[2][2];
  double log_init_[2];
};

// Ancestral sample of (hidden, observed) from the parameters.
std::pair<std::vector<int>, std::vector<int>> sample_binary_hmm(
    const BinaryHmmParams& params, int length, Rng& rng);

}  // namespace dpvi
