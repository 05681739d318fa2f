#include "baselines/particle_filter.hpp"

#include <algorithm>
#include <cmath>

#include "util/logsumexp.hpp"

namespace dpvi {

double ess(const std::vector<double>& weights) {
  double s = 0.0;
  for (double w : weights) s += w * w;
  return 1.0 / s;
}

std::vector<int> multinomial_resample(const std::vector<double>& weights,
                                      int k, Rng& rng) {
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cdf[i] = acc;
  }
  std::vector<int> out(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    out[static_cast<std::size_t>(j)] =
        static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                  cdf.size() - 1));
  }
  return out;
}

std::vector<int> stratified_resample(const std::vector<double>& weights,
                                     int k, Rng& rng) {
  std::vector<int> out(static_cast<std::size_t>(k));
  double u = rng.uniform();
  double acc = weights[0];
  std::size_t i = 0;
  for (int j = 0; j < k; ++j) {
    double point = (u + j) / k;
    while (point > acc && i + 1 < weights.size()) acc += weights[++i];
    out[static_cast<std::size_t>(j)] = static_cast<int>(i);
  }
  return out;
}

FilterResult particle_filter(const DiscreteModel& model, int k,
                             const ResamplePolicy& policy, Rng& rng,
                             const FilterStepCallback& on_step) {
  if (!model.supports_prefix())
    throw Error("particle filter requires prefix scoring");
  FilterResult res;
  res.particles.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    res.particles.push_back(model.make_empty_particle());
  res.weights.assign(static_cast<std::size_t>(k), 1.0 / k);

  std::vector<double> log_w(static_cast<std::size_t>(k), -std::log(double(k)));
  int n_vars = model.num_vars();
  for (int n = 0; n < n_vars; ++n) {
    for (int i = 0; i < k; ++i) {
      Particle& p = res.particles[static_cast<std::size_t>(i)];
      std::vector<double> scores = model.prefix_log_scores(p, n);
      std::vector<double> proposal = model.proposal_log_probs(p, n);
      std::vector<double> probs(proposal.size());
      for (std::size_t m = 0; m < proposal.size(); ++m)
        probs[m] = std::exp(proposal[m]);
      int choice = rng.categorical(probs);
      double increment =
          (scores[static_cast<std::size_t>(choice)] - p.log_score) -
          proposal[static_cast<std::size_t>(choice)];
      model.apply(p, n, choice, scores[static_cast<std::size_t>(choice)]);
      log_w[static_cast<std::size_t>(i)] += increment;
    }

    double z = logsumexp(log_w);
    if (z == kNegInf) throw Error("filter degenerate: total weight collapse");
    for (int i = 0; i < k; ++i)
      res.weights[static_cast<std::size_t>(i)] =
          std::exp(log_w[static_cast<std::size_t>(i)] - z);
    if (on_step) on_step(n, res.particles, res.weights);

    bool do_resample = false;
    ResamplePolicy::Kind kind = policy.kind;
    switch (kind) {
      case ResamplePolicy::Kind::kNever:
        break;
      case ResamplePolicy::Kind::kAlwaysMultinomial:
      case ResamplePolicy::Kind::kAlwaysStratified:
        do_resample = true;
        break;
      case ResamplePolicy::Kind::kEssThreshold:
        do_resample = ess(res.weights) < policy.threshold;
        break;
    }
    if (do_resample) {
      std::vector<int> picks =
          kind == ResamplePolicy::Kind::kAlwaysStratified
              ? stratified_resample(res.weights, k, rng)
              : multinomial_resample(res.weights, k, rng);
      std::vector<Particle> next;
      next.reserve(static_cast<std::size_t>(k));
      for (int idx : picks)
        next.push_back(res.particles[static_cast<std::size_t>(idx)].clone());
      res.particles = std::move(next);
      res.weights.assign(static_cast<std::size_t>(k), 1.0 / k);
      for (double& lw : log_w) lw = -std::log(double(k));
      ++res.resample_count;
    }
  }
  return res;
}

std::vector<std::vector<double>> filter_marginals(const FilterResult& res,
                                                  int num_values) {
  std::size_t n = res.particles[0].assignment.size();
  std::vector<std::vector<double>> marg(
      n, std::vector<double>(static_cast<std::size_t>(num_values), 0.0));
  for (std::size_t i = 0; i < res.particles.size(); ++i) {
    const Assignment& x = res.particles[i].assignment;
    for (std::size_t j = 0; j < n; ++j)
      marg[j][static_cast<std::size_t>(x[j])] += res.weights[i];
  }
  return marg;
}

}  // namespace dpvi
