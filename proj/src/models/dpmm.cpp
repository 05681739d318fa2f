#include "models/dpmm.hpp"

#include <algorithm>
#include <cmath>

namespace dpvi {

DpmmModel::DpmmModel(std::vector<std::vector<double>> data, double crp_alpha,
                     NigPrior prior)
    : data_(std::move(data)),
      crp_alpha_(crp_alpha),
      likelihood_(Likelihood::kNig),
      nig_(prior) {
  if (data_.empty()) throw Error("empty dataset");
  dim_ = static_cast<int>(data_[0].size());
  nig_.validate();
  if (!(crp_alpha_ > 0.0)) throw Error("CRP concentration must be positive");
}

DpmmModel::DpmmModel(std::vector<std::vector<double>> data, double crp_alpha,
                     NiwPrior prior)
    : data_(std::move(data)),
      crp_alpha_(crp_alpha),
      likelihood_(Likelihood::kNiw),
      niw_(prior) {
  if (data_.empty()) throw Error("empty dataset");
  dim_ = static_cast<int>(data_[0].size());
  niw_.validate(dim_);
  if (!(crp_alpha_ > 0.0)) throw Error("CRP concentration must be positive");
}

DpmmModel::ClusterStats DpmmModel::fresh_cluster() const {
  if (likelihood_ == Likelihood::kNig) return NigStats(dim_);
  return NiwStats(dim_);
}

double DpmmModel::predictive(const ClusterStats& c,
                             const std::vector<double>& y) const {
  if (likelihood_ == Likelihood::kNig)
    return std::get<NigStats>(c).log_predictive(y, nig_);
  return std::get<NiwStats>(c).log_predictive(y, niw_);
}

std::vector<int> DpmmModel::live_labels(const Stats& s) const {
  std::vector<int> out;
  for (std::size_t c = 0; c < s.sizes.size(); ++c)
    if (s.sizes[c] > 0) out.push_back(static_cast<int>(c));
  return out;
}

int DpmmModel::new_label(const Stats& s) const {
  for (std::size_t c = 0; c < s.sizes.size(); ++c)
    if (s.sizes[c] == 0) return static_cast<int>(c);
  return static_cast<int>(s.sizes.size());
}

void DpmmModel::add_point(Stats& s, int n, int label) const {
  auto c = static_cast<std::size_t>(label);
  if (c >= s.sizes.size()) {
    s.sizes.resize(c + 1, 0);
    s.clusters.resize(c + 1, fresh_cluster());
  }
  if (s.sizes[c] == 0) s.clusters[c] = fresh_cluster();
  std::visit([&](auto& cl) { cl.add(data_[static_cast<std::size_t>(n)]); },
             s.clusters[c]);
  ++s.sizes[c];
  ++s.assigned;
}

void DpmmModel::remove_point(Stats& s, int n, int label) const {
  auto c = static_cast<std::size_t>(label);
  if (c >= s.sizes.size() || s.sizes[c] <= 0)
    throw Error("cluster cache corrupt: removing from an empty cluster");
  std::visit([&](auto& cl) { cl.remove(data_[static_cast<std::size_t>(n)]); },
             s.clusters[c]);
  --s.sizes[c];
  --s.assigned;
}

std::vector<double> DpmmModel::scores_without_point(const Stats& s, int n,
                                                    double base) const {
  const std::vector<double>& y = data_[static_cast<std::size_t>(n)];
  std::vector<int> labels = live_labels(s);
  std::vector<double> out;
  out.reserve(labels.size() + 1);
  for (int c : labels) {
    auto ci = static_cast<std::size_t>(c);
    double delta = crp_log_predictive(s.sizes[ci], s.assigned, crp_alpha_) +
                   predictive(s.clusters[ci], y);
    out.push_back(base + delta);
  }
  double delta_new = crp_log_predictive(0, s.assigned, crp_alpha_) +
                     predictive(fresh_cluster(), y);
  out.push_back(base + delta_new);
  return out;
}

int DpmmModel::support(const Particle& p, int n) const {
  const auto& s = p.stats_as<Stats>();
  std::int32_t cur = p.assignment[static_cast<std::size_t>(n)];
  int live = static_cast<int>(live_labels(s).size());
  if (cur != kUnassigned && s.sizes[static_cast<std::size_t>(cur)] == 1)
    --live;  // removing the point dissolves its singleton cluster
  return live + 1;
}

std::vector<double> DpmmModel::candidate_log_scores(const Particle& p,
                                                    int n) const {
  const auto& s = p.stats_as<Stats>();
  std::int32_t cur = p.assignment[static_cast<std::size_t>(n)];
  if (cur == kUnassigned) return scores_without_point(s, n, p.log_score);

  // Score destinations against a view with point n removed. The kept-value
  // candidate reproduces the cached score because the removal and
  // re-insertion deltas are computed by the same expression.
  const std::vector<double>& y = data_[static_cast<std::size_t>(n)];
  auto ci = static_cast<std::size_t>(cur);
  ClusterStats reduced = s.clusters[ci];
  std::visit([&](auto& cl) { cl.remove(y); }, reduced);
  int cur_size = s.sizes[ci] - 1;
  int assigned = s.assigned - 1;

  double delta_out =
      crp_log_predictive(cur_size, assigned, crp_alpha_) +
      predictive(reduced, y);

  std::vector<double> out;
  for (std::size_t c = 0; c < s.sizes.size(); ++c) {
    int size = (static_cast<std::int32_t>(c) == cur) ? cur_size : s.sizes[c];
    if (size <= 0) continue;
    const ClusterStats& stats =
        (static_cast<std::int32_t>(c) == cur) ? reduced : s.clusters[c];
    double delta_in =
        crp_log_predictive(size, assigned, crp_alpha_) + predictive(stats, y);
    out.push_back(p.log_score + (delta_in - delta_out));
  }
  double delta_new = crp_log_predictive(0, assigned, crp_alpha_) +
                     predictive(fresh_cluster(), y);
  out.push_back(p.log_score + (delta_new - delta_out));
  return out;
}

std::vector<double> DpmmModel::prefix_log_scores(const Particle& p,
                                                 int n) const {
  const auto& s = p.stats_as<Stats>();
  if (p.assignment[static_cast<std::size_t>(n)] != kUnassigned ||
      s.assigned != n)
    throw Error("prefix scoring expects the next unassigned variable");
  return scores_without_point(s, n, p.log_score);
}

Assignment DpmmModel::candidate_assignment(const Particle& p, int n,
                                           int m) const {
  const auto& s = p.stats_as<Stats>();
  std::int32_t cur = p.assignment[static_cast<std::size_t>(n)];
  std::vector<int> labels = live_labels(s);
  if (cur != kUnassigned && s.sizes[static_cast<std::size_t>(cur)] == 1)
    labels.erase(std::find(labels.begin(), labels.end(), cur));
  Assignment x = p.assignment;
  if (m < static_cast<int>(labels.size())) {
    x[static_cast<std::size_t>(n)] = labels[static_cast<std::size_t>(m)];
  } else {
    // Fresh cluster: the lowest slot that is free once the point is removed.
    int label;
    if (cur != kUnassigned && s.sizes[static_cast<std::size_t>(cur)] == 1)
      label = cur;
    else
      label = new_label(s);
    x[static_cast<std::size_t>(n)] = label;
  }
  return x;
}

void DpmmModel::apply(Particle& p, int n, int m, double log_score) const {
  auto& s = p.stats_as<Stats>();
  Assignment x = candidate_assignment(p, n, m);
  std::int32_t cur = p.assignment[static_cast<std::size_t>(n)];
  if (cur != kUnassigned) remove_point(s, n, cur);
  add_point(s, n, x[static_cast<std::size_t>(n)]);
  p.assignment = std::move(x);
  p.log_score = log_score;
}

Particle DpmmModel::make_empty_particle() const {
  Particle p;
  p.assignment.assign(data_.size(), kUnassigned);
  p.log_score = 0.0;
  p.stats = std::make_unique<Stats>();
  return p;
}

Particle DpmmModel::make_particle(const Assignment& x) const {
  Particle p = make_empty_particle();
  auto& s = p.stats_as<Stats>();
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (x[n] < 0) throw Error("incomplete assignment");
    add_point(s, static_cast<int>(n), x[n]);
    p.assignment[n] = x[n];
  }
  p.log_score = full_log_score(x);
  return p;
}

double DpmmModel::cluster_log_marginal(const std::vector<int>& members) const {
  ClusterStats c = fresh_cluster();
  double s = 0.0;
  for (int n : members) {
    const std::vector<double>& y = data_[static_cast<std::size_t>(n)];
    s += predictive(c, y);
    std::visit([&](auto& cl) { cl.add(y); }, c);
  }
  return s;
}

double DpmmModel::full_log_score(const Assignment& x) const {
  std::int32_t max_label = -1;
  for (std::int32_t v : x) {
    if (v < 0) throw Error("incomplete assignment");
    if (v >= static_cast<std::int32_t>(x.size()))
      throw Error("cluster label exceeds the number of points");
    max_label = std::max(max_label, v);
  }
  std::vector<std::vector<int>> members(static_cast<std::size_t>(max_label) +
                                        1);
  std::vector<int> sizes(static_cast<std::size_t>(max_label) + 1, 0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    members[static_cast<std::size_t>(x[n])].push_back(static_cast<int>(n));
    ++sizes[static_cast<std::size_t>(x[n])];
  }
  double s = crp_log_partition(sizes, crp_alpha_);
  for (const auto& m : members)
    if (!m.empty()) s += cluster_log_marginal(m);
  return s;
}

Assignment DpmmModel::prior_sample(Rng& rng) const {
  Assignment x(data_.size());
  std::vector<int> sizes;
  for (std::size_t n = 0; n < x.size(); ++n) {
    double total = static_cast<double>(n) + crp_alpha_;
    double u = rng.uniform() * total;
    int label = static_cast<int>(sizes.size());
    double acc = 0.0;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      acc += sizes[c];
      if (u < acc) {
        label = static_cast<int>(c);
        break;
      }
    }
    if (label == static_cast<int>(sizes.size()))
      sizes.push_back(1);
    else
      ++sizes[static_cast<std::size_t>(label)];
    x[n] = label;
  }
  return x;
}

}  // namespace dpvi
