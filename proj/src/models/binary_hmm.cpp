#include "models/binary_hmm.hpp"

#include <cmath>

namespace dpvi {

void BinaryHmmParams::validate() const {
  for (double p : {alpha0, alpha1, beta0, beta1})
    if (!(p > 0.0 && p < 0.5))
      throw Error("binary HMM rates must lie in (0, 0.5)");
  if (!(init1 > 0.0 && init1 < 1.0))
    throw Error("initial state probability must lie in (0, 1)");
}

BinaryHmmModel::BinaryHmmModel(BinaryHmmParams params,
                               std::vector<int> observations)
    : params_(params), obs_(std::move(observations)) {
  params_.validate();
  for (int y : obs_)
    if (y != 0 && y != 1) throw Error("observations must be binary");
  auto t = params_.transition();
  auto e = params_.emission();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      log_trans_[i][j] = std::log(t[i][j]);
      log_emit_[i][j] = std::log(e[i][j]);
    }
  log_init_[0] = std::log(1.0 - params_.init1);
  log_init_[1] = std::log(params_.init1);
}

double BinaryHmmModel::full_log_score(const Assignment& x) const {
  for (std::int32_t v : x)
    if (v != 0 && v != 1) throw Error("state values must be binary");
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    int v = x[n];
    s += (n == 0) ? log_init_[v] : log_trans_[x[n - 1]][v];
    s += log_emit_[v][obs_[n]];
  }
  return s;
}

double BinaryHmmModel::local_factors(const Assignment& x, int n,
                                     int value) const {
  auto i = static_cast<std::size_t>(n);
  double s = (n == 0) ? log_init_[value] : log_trans_[x[i - 1]][value];
  s += log_emit_[value][obs_[i]];
  if (i + 1 < x.size() && x[i + 1] != kUnassigned)
    s += log_trans_[value][x[i + 1]];
  return s;
}

std::vector<double> BinaryHmmModel::candidate_log_scores(const Particle& p,
                                                         int n) const {
  std::int32_t cur = p.assignment[static_cast<std::size_t>(n)];
  if (cur == kUnassigned) return prefix_log_scores(p, n);
  double old_term = local_factors(p.assignment, n, cur);
  std::vector<double> out(2);
  for (int m = 0; m < 2; ++m)
    out[static_cast<std::size_t>(m)] =
        p.log_score + (local_factors(p.assignment, n, m) - old_term);
  return out;
}

std::vector<double> BinaryHmmModel::prefix_log_scores(const Particle& p,
                                                      int n) const {
  auto i = static_cast<std::size_t>(n);
  std::vector<double> out(2);
  for (int m = 0; m < 2; ++m) {
    double step = (n == 0) ? log_init_[m] : log_trans_[p.assignment[i - 1]][m];
    step += log_emit_[m][obs_[i]];
    out[static_cast<std::size_t>(m)] = p.log_score + step;
  }
  return out;
}

std::vector<double> BinaryHmmModel::proposal_log_probs(const Particle& p,
                                                       int n) const {
  auto i = static_cast<std::size_t>(n);
  std::vector<double> out(2);
  for (int m = 0; m < 2; ++m)
    out[static_cast<std::size_t>(m)] =
        (n == 0) ? log_init_[m] : log_trans_[p.assignment[i - 1]][m];
  return out;
}

void BinaryHmmModel::apply(Particle& p, int n, int m,
                           double log_score) const {
  p.assignment[static_cast<std::size_t>(n)] = static_cast<std::int32_t>(m);
  p.log_score = log_score;
}

Particle BinaryHmmModel::make_particle(const Assignment& x) const {
  Particle p;
  p.assignment = x;
  p.log_score = full_log_score(x);
  return p;
}

Assignment BinaryHmmModel::prior_sample(Rng& rng) const {
  auto t = params_.transition();
  Assignment x(obs_.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    double p1 = (n == 0) ? params_.init1 : t[x[n - 1]][1];
    x[n] = rng.uniform() < p1 ? 1 : 0;
  }
  return x;
}

std::pair<std::vector<int>, std::vector<int>> sample_binary_hmm(
    const BinaryHmmParams& params, int length, Rng& rng) {
  params.validate();
  auto t = params.transition();
  auto e = params.emission();
  std::vector<int> hidden(static_cast<std::size_t>(length));
  std::vector<int> observed(static_cast<std::size_t>(length));
  for (int n = 0; n < length; ++n) {
    double p1 = (n == 0) ? params.init1 : t[hidden[n - 1]][1];
    hidden[n] = rng.uniform() < p1 ? 1 : 0;
    observed[n] = rng.uniform() < e[hidden[n]][1] ? 1 : 0;
  }
  return {hidden, observed};
}

}  // namespace dpvi
