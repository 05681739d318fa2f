#include "core/exact.hpp"

#include <cmath>
#include <cstring>

#include "util/logsumexp.hpp"

namespace dpvi {

double ExactPosterior::posterior_prob(const Assignment& canonical) const {
  for (const auto& [x, ls] : joint)
    if (x == canonical) return std::exp(ls - log_z);
  return 0.0;
}

namespace {

void enumerate(const DiscreteModel& model, Particle& p, int n,
               std::uint64_t cap, std::vector<std::pair<Assignment, double>>& out) {
  if (n == model.num_vars()) {
    if (out.size() >= cap)
      throw Error("enumeration cap exceeded: support needs more than " +
                  std::to_string(cap) + " states");
    Assignment canonical = model.canonicalize(p.assignment);
    out.emplace_back(std::move(canonical),
                     model.full_log_score(p.assignment));
    return;
  }
  int m_count = model.support(p, n);
  for (int m = 0; m < m_count; ++m) {
    Particle child = p.clone();
    model.apply(child, n, m, 0.0);
    enumerate(model, child, n + 1, cap, out);
  }
}

}  // namespace

ExactPosterior brute_force(const DiscreteModel& model, std::uint64_t cap) {
  ExactPosterior post;
  Particle root = model.make_empty_particle();
  enumerate(model, root, 0, cap, post.joint);

  std::vector<double> scores;
  scores.reserve(post.joint.size());
  for (const auto& [x, ls] : post.joint) scores.push_back(ls);
  post.log_z = logsumexp(scores);

  int n_vars = model.num_vars();
  std::int32_t max_val = 0;
  for (const auto& [x, ls] : post.joint)
    for (std::int32_t v : x) max_val = std::max(max_val, v);
  post.marginals.assign(static_cast<std::size_t>(n_vars),
                        std::vector<double>(max_val + 1, 0.0));
  for (const auto& [x, ls] : post.joint) {
    double w = std::exp(ls - post.log_z);
    for (int n = 0; n < n_vars; ++n)
      post.marginals[n][static_cast<std::size_t>(x[n])] += w;
  }
  return post;
}

double audit_log_score_drift(const DiscreteModel& model, const Particle& p) {
  return std::abs(p.log_score - model.full_log_score(p.assignment));
}

}  // namespace dpvi
