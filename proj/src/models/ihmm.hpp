#pragma once

#include <vector>

#include "core/model.hpp"

namespace dpvi {

// Infinite HMM with Chinese-restaurant-franchise transition predictives and
// collapsed symmetric-Dirichlet emissions over a finite symbol alphabet.
//
// The joint score of an assignment is the left-to-right product of the
// transition and emission predictives, with clusters labeled by first
// appearance. Sequential extension is O(1) per candidate from the cached
// counts; single-variable changes are scored by replaying the suffix, since
// changing x_n shifts every later predictive.
class IhmmModel final : public DiscreteModel {
 public:
  IhmmModel(std::vector<int> observations, int alphabet, double alpha,
            double gamma, double emission_conc = 1.0);

  int alphabet() const { return alphabet_; }
  const std::vector<int>& observations() const { return obs_; }

  int num_vars() const override { return static_cast<int>(obs_.size()); }
  int support(const Particle& p, int n) const override;
  double full_log_score(const Assignment& x) const override;
  std::vector<double> candidate_log_scores(const Particle& p,
                                           int n) const override;
  bool supports_prefix() const override { return true; }
  std::vector<double> prefix_log_scores(const Particle& p, int n) const override;
  Assignment candidate_assignment(const Particle& p, int n,
                                  int m) const override;
  void apply(Particle& p, int n, int m, double log_score) const override;
  Particle make_particle(const Assignment& x) const override;
  Particle make_empty_particle() const override;
  Assignment canonicalize(const Assignment& x) const override {
    return relabel_by_first_appearance(x);
  }
  Assignment prior_sample(Rng& rng) const override;

  struct Stats : ParticleStats {
    int num_clusters = 0;
    std::vector<std::vector<int>> trans;  // (C+1) x C; row 0 = virtual start
    std::vector<int> row_sum;             // C+1
    std::vector<int> col_sum;             // C
    int total = 0;
    std::vector<std::vector<int>> emit;   // C x alphabet
    std::vector<int> emit_sum;            // C
    int assigned = 0;
    std::unique_ptr<ParticleStats> clone() const override {
      return std::make_unique<Stats>(*this);
    }
  };

  // log P(next | prev) under the franchise predictive; prev = -1 is the
  // virtual start state, next = C_+ asks for a brand-new cluster.
  double transition_log_predictive(const Stats& s, int prev, int next) const;
  // log P(symbol | cluster); cluster = C_+ is a fresh cluster.
  double emission_log_predictive(const Stats& s, int cluster,
                                 int symbol) const;

  // Removes / restores the transition and emission counts contributed by
  // time point n. Restoring after a removal is byte-exact.
  void detach_point(Stats& s, const Assignment& x, int n) const;
  void attach_point(Stats& s, const Assignment& x, int n) const;

  // Posterior point estimates truncated to the visited states, for held-out
  // evaluation: the initial row continues from the final training state.
  struct PointEstimates {
    std::vector<double> init;
    std::vector<std::vector<double>> trans;
    std::vector<std::vector<int>> emit_counts;
  };
  PointEstimates point_estimates(const Particle& p) const;

 private:
  double step_log(const Stats& s, int prev, int next, int symbol) const;
  // Joint log score of a canonical prefix x_0..x_{len-1}.
  double replay_log_score(const Assignment& canonical, int len) const;
  // Distinct labels of x excluding position n, in first-appearance order.
  std::vector<std::int32_t> labels_without(const Assignment& x, int n) const;

  std::vector<int> obs_;
  int alphabet_;
  double alpha_;
  double gamma_;
  double eta_;
};

}  // namespace dpvi
