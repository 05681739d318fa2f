#pragma once

#include <variant>
#include <vector>

#include "core/model.hpp"
#include "models/conjugate.hpp"

namespace dpvi {

// Dirichlet process mixture with the component parameters marginalized out.
// The joint score of an assignment is the CRP partition probability times the
// per-cluster marginal likelihood, so changing one point's cluster induces
// dependence on every other point through the cluster caches.
class DpmmModel final : public DiscreteModel {
 public:
  enum class Likelihood { kNig, kNiw };

  DpmmModel(std::vector<std::vector<double>> data, double crp_alpha,
            NigPrior prior);
  DpmmModel(std::vector<std::vector<double>> data, double crp_alpha,
            NiwPrior prior);

  int dim() const { return dim_; }
  double crp_alpha() const { return crp_alpha_; }
  const std::vector<std::vector<double>>& data() const { return data_; }

  int num_vars() const override { return static_cast<int>(data_.size()); }
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

  // Marginal likelihood of one cluster's member points, added in index order.
  double cluster_log_marginal(const std::vector<int>& members) const;

 private:
  using ClusterStats = std::variant<NigStats, NiwStats>;

  struct Stats : ParticleStats {
    std::vector<ClusterStats> clusters;  // slot-indexed, may contain holes
    std::vector<int> sizes;              // 0 marks a dead slot
    int assigned = 0;
    std::unique_ptr<ParticleStats> clone() const override {
      return std::make_unique<Stats>(*this);
    }
  };

  ClusterStats fresh_cluster() const;
  double predictive(const ClusterStats& c, const std::vector<double>& y) const;
  std::vector<int> live_labels(const Stats& s) const;
  int new_label(const Stats& s) const;
  void add_point(Stats& s, int n, int label) const;
  void remove_point(Stats& s, int n, int label) const;
  // Candidate scores relative to a context where point n is unassigned.
  std::vector<double> scores_without_point(const Stats& s, int n,
                                           double base) const;

  std::vector<std::vector<double>> data_;
  int dim_ = 0;
  double crp_alpha_ = 1.0;
  Likelihood likelihood_;
  NigPrior nig_;
  NiwPrior niw_;
};

}  // namespace dpvi
