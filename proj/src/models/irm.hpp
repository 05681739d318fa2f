#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "core/model.hpp"

namespace dpvi {

// A relation over typed entity domains: one line per observed cell. Cells
// removed for held-out evaluation are simply absent from `cells`.
struct RelationData {
  std::vector<int> type_sizes;          // entities per type
  std::vector<int> position_type;      // type occupying each slot of a cell
  struct Cell {
    std::vector<int> entities;  // entity index per position
    int value = 0;              // binary
  };
  std::vector<Cell> cells;

  int num_types() const { return static_cast<int>(type_sizes.size()); }
  int arity() const { return static_cast<int>(position_type.size()); }
  void validate() const;
};

// Infinite relational model with CRP priors over per-type partitions and the
// block Bernoulli parameters marginalized out under a Beta(beta, beta) prior.
// The engine sees one flat variable vector: all entities of type 0, then all
// of type 1, and so on.
class IrmModel final : public DiscreteModel {
 public:
  IrmModel(RelationData relation, double crp_alpha, double beta);

  const RelationData& relation() const { return rel_; }
  int type_of_var(int n) const;
  int entity_of_var(int n) const;

  int num_vars() const override { return total_entities_; }
  int support(const Particle& p, int n) const override;
  double full_log_score(const Assignment& x) const override;
  std::vector<double> candidate_log_scores(const Particle& p,
                                           int n) const override;
  Assignment candidate_assignment(const Particle& p, int n,
                                  int m) const override;
  void apply(Particle& p, int n, int m, double log_score) const override;
  Particle make_particle(const Assignment& x) const override;
  Particle make_empty_particle() const override;
  Assignment canonicalize(const Assignment& x) const override;
  Assignment prior_sample(Rng& rng) const override;

  // Collapsed log likelihood of the observed cells under an assignment
  // (sum over blocks of log Beta(m1+beta, m0+beta) - log Beta(beta, beta)).
  double block_log_likelihood(const Assignment& x) const;

  // Log posterior predictive of held-out cells given a trained particle,
  // each cell scored under its block's Beta-Bernoulli posterior.
  double heldout_log_likelihood(const Particle& p,
                                const std::vector<RelationData::Cell>& cells)
      const;

 private:
  struct Stats : ParticleStats {
    // per type: slot-indexed cluster sizes (0 = dead) and assigned count
    std::vector<std::vector<int>> sizes;
    std::vector<int> assigned;
    // block key -> (ones, zeros) over observed cells
    std::unordered_map<std::uint64_t, std::pair<int, int>> blocks;
    std::unique_ptr<ParticleStats> clone() const override {
      return std::make_unique<Stats>(*this);
    }
  };

  std::uint64_t block_key(const Assignment& x,
                          const RelationData::Cell& cell) const;
  std::vector<int> live_labels(const Stats& s, int type) const;
  int new_label(const Stats& s, int type) const;
  void add_entity(Stats& s, const Assignment& x, int n, int label) const;
  void remove_entity(Stats& s, const Assignment& x, int n) const;
  bool fully_observed_by(const Assignment& x,
                         const RelationData::Cell& cell) const;

  RelationData rel_;
  double crp_alpha_;
  double beta_;
  int total_entities_ = 0;
  std::vector<int> var_offset_;                  // per type
  std::vector<std::vector<int>> incident_cells_;  // per variable
  double log_beta_prior_;                         // log Beta(beta, beta)
};

}  // namespace dpvi
