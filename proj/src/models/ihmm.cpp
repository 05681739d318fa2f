#include "models/ihmm.hpp"

#include <algorithm>
#include <cmath>

namespace dpvi {

IhmmModel::IhmmModel(std::vector<int> observations, int alphabet, double alpha,
                     double gamma, double emission_conc)
    : obs_(std::move(observations)),
      alphabet_(alphabet),
      alpha_(alpha),
      gamma_(gamma),
      eta_(emission_conc) {
  if (obs_.empty()) throw Error("empty observation sequence");
  if (alphabet_ < 1) throw Error("alphabet must be positive");
  for (int y : obs_)
    if (y < 0 || y >= alphabet_) throw Error("symbol outside alphabet");
  if (!(alpha_ > 0.0 && gamma_ > 0.0 && eta_ > 0.0))
    throw Error("iHMM hyperparameters must be positive");
}

double IhmmModel::transition_log_predictive(const Stats& s, int prev,
                                            int next) const {
  auto row = static_cast<std::size_t>(prev + 1);
  if (prev < -1 || prev >= s.num_clusters) throw Error("invalid source cluster");
  if (next < 0 || next > s.num_clusters) throw Error("invalid target cluster");
  double denom_global = s.total + gamma_;
  double denom_row = s.row_sum[row] + alpha_;
  if (next == s.num_clusters)
    return std::log(alpha_ * gamma_ / (denom_global * denom_row));
  auto c = static_cast<std::size_t>(next);
  return std::log(
      (s.trans[row][c] + alpha_ * (s.col_sum[c] / denom_global)) / denom_row);
}

double IhmmModel::emission_log_predictive(const Stats& s, int cluster,
                                          int symbol) const {
  if (symbol < 0 || symbol >= alphabet_) throw Error("symbol outside alphabet");
  if (cluster < 0 || cluster > s.num_clusters)
    throw Error("invalid cluster");
  if (cluster == s.num_clusters)
    return std::log(eta_ / (alphabet_ * eta_));
  auto c = static_cast<std::size_t>(cluster);
  return std::log((s.emit[c][static_cast<std::size_t>(symbol)] + eta_) /
                  (s.emit_sum[c] + alphabet_ * eta_));
}

double IhmmModel::step_log(const Stats& s, int prev, int next,
                           int symbol) const {
  double step = transition_log_predictive(s, prev, next);
  step += emission_log_predictive(s, next, symbol);
  return step;
}

namespace {

void grow_cluster(IhmmModel::Stats& s, int alphabet) {
  ++s.num_clusters;
  for (auto& row : s.trans) row.push_back(0);
  s.trans.emplace_back(static_cast<std::size_t>(s.num_clusters), 0);
  s.row_sum.push_back(0);
  s.col_sum.push_back(0);
  s.emit.emplace_back(static_cast<std::size_t>(alphabet), 0);
  s.emit_sum.push_back(0);
}

void count_transition(IhmmModel::Stats& s, int prev, int next, int delta) {
  auto row = static_cast<std::size_t>(prev + 1);
  auto c = static_cast<std::size_t>(next);
  s.trans[row][c] += delta;
  s.row_sum[row] += delta;
  s.col_sum[c] += delta;
  s.total += delta;
}

void count_emission(IhmmModel::Stats& s, int cluster, int symbol, int delta) {
  auto c = static_cast<std::size_t>(cluster);
  s.emit[c][static_cast<std::size_t>(symbol)] += delta;
  s.emit_sum[c] += delta;
}

}  // namespace

double IhmmModel::replay_log_score(const Assignment& canonical,
                                   int len) const {
  Stats s;
  s.trans.emplace_back();  // start row
  s.row_sum.push_back(0);
  double out = 0.0;
  for (int n = 0; n < len; ++n) {
    int c = canonical[static_cast<std::size_t>(n)];
    int prev = n == 0 ? -1 : canonical[static_cast<std::size_t>(n - 1)];
    out += step_log(s, prev, c, obs_[static_cast<std::size_t>(n)]);
    if (c == s.num_clusters) grow_cluster(s, alphabet_);
    count_transition(s, prev, c, 1);
    count_emission(s, c, obs_[static_cast<std::size_t>(n)], 1);
    ++s.assigned;
  }
  return out;
}

double IhmmModel::full_log_score(const Assignment& x) const {
  for (std::int32_t v : x) {
    if (v < 0) throw Error("incomplete assignment");
    if (v >= static_cast<std::int32_t>(x.size()))
      throw Error("cluster label exceeds the sequence length");
  }
  Assignment canonical = relabel_by_first_appearance(x);
  return replay_log_score(canonical, static_cast<int>(x.size()));
}

std::vector<std::int32_t> IhmmModel::labels_without(const Assignment& x,
                                                    int n) const {
  std::vector<std::int32_t> labels;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (static_cast<int>(i) == n || x[i] == kUnassigned) continue;
    if (std::find(labels.begin(), labels.end(), x[i]) == labels.end())
      labels.push_back(x[i]);
  }
  return labels;
}

int IhmmModel::support(const Particle& p, int n) const {
  return static_cast<int>(labels_without(p.assignment, n).size()) + 1;
}

Assignment IhmmModel::candidate_assignment(const Particle& p, int n,
                                           int m) const {
  std::vector<std::int32_t> labels = labels_without(p.assignment, n);
  Assignment x = p.assignment;
  std::int32_t target;
  if (m < static_cast<int>(labels.size())) {
    target = labels[static_cast<std::size_t>(m)];
  } else {
    std::int32_t max_label = -1;
    for (std::int32_t v : x)
      if (v != kUnassigned) max_label = std::max(max_label, v);
    target = max_label + 1;
  }
  x[static_cast<std::size_t>(n)] = target;
  return relabel_by_first_appearance(x);
}

std::vector<double> IhmmModel::prefix_log_scores(const Particle& p,
                                                 int n) const {
  const auto& s = p.stats_as<Stats>();
  if (p.assignment[static_cast<std::size_t>(n)] != kUnassigned ||
      s.assigned != n)
    throw Error("prefix scoring expects the next unassigned variable");
  int prev = n == 0 ? -1 : p.assignment[static_cast<std::size_t>(n - 1)];
  int y = obs_[static_cast<std::size_t>(n)];
  std::vector<double> out(static_cast<std::size_t>(s.num_clusters) + 1);
  for (int c = 0; c <= s.num_clusters; ++c)
    out[static_cast<std::size_t>(c)] = p.log_score + step_log(s, prev, c, y);
  return out;
}

std::vector<double> IhmmModel::candidate_log_scores(const Particle& p,
                                                    int n) const {
  if (p.assignment[static_cast<std::size_t>(n)] == kUnassigned)
    return prefix_log_scores(p, n);
  int m_count = support(p, n);
  std::vector<double> out(static_cast<std::size_t>(m_count));
  for (int m = 0; m < m_count; ++m) {
    Assignment x = candidate_assignment(p, n, m);
    out[static_cast<std::size_t>(m)] =
        replay_log_score(x, static_cast<int>(x.size()));
  }
  return out;
}

void IhmmModel::apply(Particle& p, int n, int m, double log_score) const {
  auto& s = p.stats_as<Stats>();
  std::int32_t cur = p.assignment[static_cast<std::size_t>(n)];
  if (cur == kUnassigned && s.assigned == n) {
    // Sequential extension keeps the counts incremental.
    int prev = n == 0 ? -1 : p.assignment[static_cast<std::size_t>(n - 1)];
    int c = m <= s.num_clusters ? m : s.num_clusters;
    if (c == s.num_clusters) grow_cluster(s, alphabet_);
    count_transition(s, prev, c, 1);
    count_emission(s, c, obs_[static_cast<std::size_t>(n)], 1);
    ++s.assigned;
    p.assignment[static_cast<std::size_t>(n)] = c;
    p.log_score = log_score;
    return;
  }
  Assignment x = candidate_assignment(p, n, m);
  Particle rebuilt = make_particle(x);
  p.assignment = std::move(rebuilt.assignment);
  p.stats = std::move(rebuilt.stats);
  p.log_score = log_score;
}

Particle IhmmModel::make_empty_particle() const {
  Particle p;
  p.assignment.assign(obs_.size(), kUnassigned);
  p.log_score = 0.0;
  auto stats = std::make_unique<Stats>();
  stats->trans.emplace_back();
  stats->row_sum.push_back(0);
  p.stats = std::move(stats);
  return p;
}

Particle IhmmModel::make_particle(const Assignment& x) const {
  Assignment canonical = relabel_by_first_appearance(x);
  Particle p = make_empty_particle();
  auto& s = p.stats_as<Stats>();
  for (std::size_t n = 0; n < canonical.size(); ++n) {
    int c = canonical[n];
    if (c < 0) throw Error("incomplete assignment");
    int prev = n == 0 ? -1 : canonical[n - 1];
    if (c == s.num_clusters) grow_cluster(s, alphabet_);
    count_transition(s, prev, c, 1);
    count_emission(s, c, obs_[n], 1);
    ++s.assigned;
  }
  p.assignment = std::move(canonical);
  p.log_score = replay_log_score(p.assignment,
                                 static_cast<int>(p.assignment.size()));
  return p;
}

void IhmmModel::detach_point(Stats& s, const Assignment& x, int n) const {
  auto i = static_cast<std::size_t>(n);
  int c = x[i];
  int prev = n == 0 ? -1 : x[i - 1];
  count_transition(s, prev, c, -1);
  if (i + 1 < x.size() && x[i + 1] != kUnassigned)
    count_transition(s, c, x[i + 1], -1);
  count_emission(s, c, obs_[i], -1);
  --s.assigned;
}

void IhmmModel::attach_point(Stats& s, const Assignment& x, int n) const {
  auto i = static_cast<std::size_t>(n);
  int c = x[i];
  int prev = n == 0 ? -1 : x[i - 1];
  count_transition(s, prev, c, 1);
  if (i + 1 < x.size() && x[i + 1] != kUnassigned)
    count_transition(s, c, x[i + 1], 1);
  count_emission(s, c, obs_[i], 1);
  ++s.assigned;
}

IhmmModel::PointEstimates IhmmModel::point_estimates(const Particle& p) const {
  const auto& s = p.stats_as<Stats>();
  int c_count = s.num_clusters;
  if (c_count == 0) throw Error("no clusters to estimate");
  PointEstimates est;
  est.trans.assign(static_cast<std::size_t>(c_count),
                   std::vector<double>(static_cast<std::size_t>(c_count), 0.0));
  auto fill_row = [&](std::vector<double>& row, int prev) {
    double total = 0.0;
    for (int c = 0; c < c_count; ++c) {
      double w = std::exp(transition_log_predictive(s, prev, c));
      row[static_cast<std::size_t>(c)] = w;
      total += w;
    }
    for (double& v : row) v /= total;  // truncate away the new-cluster mass
  };
  for (int j = 0; j < c_count; ++j)
    fill_row(est.trans[static_cast<std::size_t>(j)], j);
  est.init.assign(static_cast<std::size_t>(c_count), 0.0);
  int last = p.assignment.back();
  fill_row(est.init, last);
  est.emit_counts = s.emit;
  return est;
}

Assignment IhmmModel::prior_sample(Rng& rng) const {
  // Ancestral draw from the franchise predictive, clusters by appearance.
  Stats s;
  s.trans.emplace_back();
  s.row_sum.push_back(0);
  Assignment x(obs_.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    int prev = n == 0 ? -1 : x[n - 1];
    std::vector<double> probs(static_cast<std::size_t>(s.num_clusters) + 1);
    for (int c = 0; c <= s.num_clusters; ++c)
      probs[static_cast<std::size_t>(c)] =
          std::exp(transition_log_predictive(s, prev, c));
    int c = rng.categorical(probs);
    if (c == s.num_clusters) grow_cluster(s, alphabet_);
    count_transition(s, prev, c, 1);
    ++s.assigned;
    x[n] = c;
  }
  return x;
}

}  // namespace dpvi
