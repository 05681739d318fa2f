#include "models/irm.hpp"

#include <algorithm>
#include <cmath>

#include "models/conjugate.hpp"
#include "util/stats_math.hpp"

namespace dpvi {

void RelationData::validate() const {
  if (type_sizes.empty() || position_type.empty())
    throw Error("relation needs at least one type and one position");
  if (arity() > 4) throw Error("relation arity capped at 4");
  for (int t : position_type)
    if (t < 0 || t >= num_types()) throw Error("bad position type");
  for (const Cell& c : cells) {
    if (static_cast<int>(c.entities.size()) != arity())
      throw Error("cell arity mismatch");
    for (int pos = 0; pos < arity(); ++pos) {
      int i = c.entities[static_cast<std::size_t>(pos)];
      int t = position_type[static_cast<std::size_t>(pos)];
      if (i < 0 || i >= type_sizes[static_cast<std::size_t>(t)])
        throw Error("cell entity index out of range");
    }
    if (c.value != 0 && c.value != 1) throw Error("relation values must be 0/1");
  }
}

IrmModel::IrmModel(RelationData relation, double crp_alpha, double beta)
    : rel_(std::move(relation)), crp_alpha_(crp_alpha), beta_(beta) {
  rel_.validate();
  if (!(crp_alpha_ > 0.0 && beta_ > 0.0))
    throw Error("IRM hyperparameters must be positive");
  var_offset_.resize(rel_.type_sizes.size());
  for (std::size_t t = 0; t < rel_.type_sizes.size(); ++t) {
    var_offset_[t] = total_entities_;
    total_entities_ += rel_.type_sizes[t];
  }
  incident_cells_.resize(static_cast<std::size_t>(total_entities_));
  for (std::size_t ci = 0; ci < rel_.cells.size(); ++ci) {
    const auto& cell = rel_.cells[ci];
    int last_var = -1;
    for (int pos = 0; pos < rel_.arity(); ++pos) {
      int t = rel_.position_type[static_cast<std::size_t>(pos)];
      int var = var_offset_[static_cast<std::size_t>(t)] +
                cell.entities[static_cast<std::size_t>(pos)];
      if (var != last_var) {  // entities may repeat within a cell
        auto& lst = incident_cells_[static_cast<std::size_t>(var)];
        if (lst.empty() || lst.back() != static_cast<int>(ci))
          lst.push_back(static_cast<int>(ci));
      }
      last_var = var;
    }
  }
  log_beta_prior_ = log_beta(beta_, beta_);
}

int IrmModel::type_of_var(int n) const {
  for (int t = rel_.num_types() - 1; t >= 0; --t)
    if (n >= var_offset_[static_cast<std::size_t>(t)]) return t;
  throw Error("variable index out of range");
}

int IrmModel::entity_of_var(int n) const {
  return n - var_offset_[static_cast<std::size_t>(type_of_var(n))];
}

std::uint64_t IrmModel::block_key(const Assignment& x,
                                  const RelationData::Cell& cell) const {
  std::uint64_t key = 0;
  for (int pos = 0; pos < rel_.arity(); ++pos) {
    int t = rel_.position_type[static_cast<std::size_t>(pos)];
    int var = var_offset_[static_cast<std::size_t>(t)] +
              cell.entities[static_cast<std::size_t>(pos)];
    auto label = static_cast<std::uint64_t>(
        x[static_cast<std::size_t>(var)]);
    key = (key << 16) | (label + 1);
  }
  return key;
}

bool IrmModel::fully_observed_by(const Assignment& x,
                                 const RelationData::Cell& cell) const {
  for (int pos = 0; pos < rel_.arity(); ++pos) {
    int t = rel_.position_type[static_cast<std::size_t>(pos)];
    int var = var_offset_[static_cast<std::size_t>(t)] +
              cell.entities[static_cast<std::size_t>(pos)];
    if (x[static_cast<std::size_t>(var)] == kUnassigned) return false;
  }
  return true;
}

std::vector<int> IrmModel::live_labels(const Stats& s, int type) const {
  std::vector<int> out;
  const auto& sizes = s.sizes[static_cast<std::size_t>(type)];
  for (std::size_t c = 0; c < sizes.size(); ++c)
    if (sizes[c] > 0) out.push_back(static_cast<int>(c));
  return out;
}

int IrmModel::new_label(const Stats& s, int type) const {
  const auto& sizes = s.sizes[static_cast<std::size_t>(type)];
  for (std::size_t c = 0; c < sizes.size(); ++c)
    if (sizes[c] == 0) return static_cast<int>(c);
  return static_cast<int>(sizes.size());
}

void IrmModel::add_entity(Stats& s, const Assignment& x, int n,
                          int label) const {
  int type = type_of_var(n);
  auto& sizes = s.sizes[static_cast<std::size_t>(type)];
  auto li = static_cast<std::size_t>(label);
  if (li >= sizes.size()) sizes.resize(li + 1, 0);
  ++sizes[li];
  ++s.assigned[static_cast<std::size_t>(type)];
  for (int ci : incident_cells_[static_cast<std::size_t>(n)]) {
    const auto& cell = rel_.cells[static_cast<std::size_t>(ci)];
    if (!fully_observed_by(x, cell)) continue;
    auto& counts = s.blocks[block_key(x, cell)];
    if (cell.value == 1)
      ++counts.first;
    else
      ++counts.second;
  }
}

void IrmModel::remove_entity(Stats& s, const Assignment& x, int n) const {
  int type = type_of_var(n);
  std::int32_t label = x[static_cast<std::size_t>(n)];
  auto& sizes = s.sizes[static_cast<std::size_t>(type)];
  if (label < 0 || sizes[static_cast<std::size_t>(label)] <= 0)
    throw Error("cluster cache corrupt: removing unassigned entity");
  for (int ci : incident_cells_[static_cast<std::size_t>(n)]) {
    const auto& cell = rel_.cells[static_cast<std::size_t>(ci)];
    if (!fully_observed_by(x, cell)) continue;
    auto it = s.blocks.find(block_key(x, cell));
    if (it == s.blocks.end()) throw Error("cluster cache corrupt: block miss");
    if (cell.value == 1)
      --it->second.first;
    else
      --it->second.second;
    if (it->second.first == 0 && it->second.second == 0) s.blocks.erase(it);
  }
  --sizes[static_cast<std::size_t>(label)];
  --s.assigned[static_cast<std::size_t>(type)];
}

int IrmModel::support(const Particle& p, int n) const {
  const auto& s = p.stats_as<Stats>();
  int type = type_of_var(n);
  std::int32_t cur = p.assignment[static_cast<std::size_t>(n)];
  int live = static_cast<int>(live_labels(s, type).size());
  if (cur != kUnassigned &&
      s.sizes[static_cast<std::size_t>(type)][static_cast<std::size_t>(cur)] ==
          1)
    --live;
  return live + 1;
}

Assignment IrmModel::candidate_assignment(const Particle& p, int n,
                                          int m) const {
  const auto& s = p.stats_as<Stats>();
  int type = type_of_var(n);
  std::int32_t cur = p.assignment[static_cast<std::size_t>(n)];
  std::vector<int> labels = live_labels(s, type);
  bool singleton =
      cur != kUnassigned &&
      s.sizes[static_cast<std::size_t>(type)][static_cast<std::size_t>(cur)] ==
          1;
  if (singleton)
    labels.erase(std::find(labels.begin(), labels.end(), cur));
  Assignment x = p.assignment;
  if (m < static_cast<int>(labels.size()))
    x[static_cast<std::size_t>(n)] = labels[static_cast<std::size_t>(m)];
  else
    x[static_cast<std::size_t>(n)] =
        singleton ? cur : new_label(s, type);
  return x;
}

std::vector<double> IrmModel::candidate_log_scores(const Particle& p,
                                                   int n) const {
  const auto& s = p.stats_as<Stats>();
  int type = type_of_var(n);
  std::int32_t cur = p.assignment[static_cast<std::size_t>(n)];
  const auto& sizes = s.sizes[static_cast<std::size_t>(type)];

  // Block-count decrements induced by detaching entity n (empty when the
  // entity is not assigned yet).
  std::unordered_map<std::uint64_t, std::pair<int, int>> removed;
  Assignment x = p.assignment;
  if (cur != kUnassigned) {
    for (int ci : incident_cells_[static_cast<std::size_t>(n)]) {
      const auto& cell = rel_.cells[static_cast<std::size_t>(ci)];
      if (!fully_observed_by(x, cell)) continue;
      auto& counts = removed[block_key(x, cell)];
      if (cell.value == 1)
        ++counts.first;
      else
        ++counts.second;
    }
  }
  int assigned = s.assigned[static_cast<std::size_t>(type)] -
                 (cur != kUnassigned ? 1 : 0);

  auto base_counts = [&](std::uint64_t key) {
    std::pair<int, int> counts{0, 0};
    auto it = s.blocks.find(key);
    if (it != s.blocks.end()) counts = it->second;
    auto rit = removed.find(key);
    if (rit != removed.end()) {
      counts.first -= rit->second.first;
      counts.second -= rit->second.second;
    }
    return counts;
  };

  // Log-likelihood delta of re-attaching entity n under cluster label c.
  auto attach_delta = [&](int label) {
    x[static_cast<std::size_t>(n)] = label;
    std::unordered_map<std::uint64_t, std::pair<int, int>> added;
    for (int ci : incident_cells_[static_cast<std::size_t>(n)]) {
      const auto& cell = rel_.cells[static_cast<std::size_t>(ci)];
      if (!fully_observed_by(x, cell)) continue;
      auto& counts = added[block_key(x, cell)];
      if (cell.value == 1)
        ++counts.first;
      else
        ++counts.second;
    }
    // Empty blocks contribute zero, so the same expression covers newly
    // created and pre-existing blocks alike.
    double delta = 0.0;
    for (const auto& [key, a] : added) {
      auto [m1, m0] = base_counts(key);
      delta += log_beta(m1 + a.first + beta_, m0 + a.second + beta_) -
               log_beta(m1 + beta_, m0 + beta_);
    }
    x[static_cast<std::size_t>(n)] = cur;
    return delta;
  };

  double delta_out = 0.0;
  if (cur != kUnassigned) {
    int cur_size = sizes[static_cast<std::size_t>(cur)] - 1;
    delta_out = crp_log_predictive(cur_size, assigned, crp_alpha_) +
                attach_delta(cur);
  }

  std::vector<double> out;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    int size = (static_cast<std::int32_t>(c) == cur) ? sizes[c] - 1 : sizes[c];
    if (size <= 0) continue;
    double delta_in = crp_log_predictive(size, assigned, crp_alpha_) +
                      attach_delta(static_cast<int>(c));
    out.push_back(p.log_score + (delta_in - delta_out));
  }
  bool singleton =
      cur != kUnassigned && sizes[static_cast<std::size_t>(cur)] == 1;
  int fresh = singleton ? cur : new_label(s, type);
  double delta_new = crp_log_predictive(0, assigned, crp_alpha_) +
                     attach_delta(fresh);
  out.push_back(p.log_score + (delta_new - delta_out));
  return out;
}

void IrmModel::apply(Particle& p, int n, int m, double log_score) const {
  auto& s = p.stats_as<Stats>();
  Assignment target = candidate_assignment(p, n, m);
  std::int32_t cur = p.assignment[static_cast<std::size_t>(n)];
  if (cur != kUnassigned) {
    remove_entity(s, p.assignment, n);
    p.assignment[static_cast<std::size_t>(n)] = kUnassigned;
  }
  p.assignment[static_cast<std::size_t>(n)] =
      target[static_cast<std::size_t>(n)];
  add_entity(s, p.assignment, n, target[static_cast<std::size_t>(n)]);
  p.log_score = log_score;
}

Particle IrmModel::make_empty_particle() const {
  Particle p;
  p.assignment.assign(static_cast<std::size_t>(total_entities_), kUnassigned);
  p.log_score = 0.0;
  auto stats = std::make_unique<Stats>();
  stats->sizes.resize(rel_.type_sizes.size());
  stats->assigned.assign(rel_.type_sizes.size(), 0);
  p.stats = std::move(stats);
  return p;
}

Particle IrmModel::make_particle(const Assignment& x) const {
  Particle p = make_empty_particle();
  auto& s = p.stats_as<Stats>();
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (x[n] < 0) throw Error("incomplete assignment");
    p.assignment[n] = x[n];
    add_entity(s, p.assignment, static_cast<int>(n), x[n]);
  }
  p.log_score = full_log_score(x);
  return p;
}

Assignment IrmModel::canonicalize(const Assignment& x) const {
  Assignment out(x.size());
  for (int t = 0; t < rel_.num_types(); ++t) {
    auto begin = static_cast<std::size_t>(var_offset_[static_cast<std::size_t>(t)]);
    auto count = static_cast<std::size_t>(rel_.type_sizes[static_cast<std::size_t>(t)]);
    Assignment part(x.begin() + begin, x.begin() + begin + count);
    Assignment relabeled = relabel_by_first_appearance(part);
    std::copy(relabeled.begin(), relabeled.end(), out.begin() + begin);
  }
  return out;
}

double IrmModel::block_log_likelihood(const Assignment& x) const {
  std::unordered_map<std::uint64_t, std::pair<int, int>> blocks;
  for (const auto& cell : rel_.cells) {
    auto& counts = blocks[block_key(x, cell)];
    if (cell.value == 1)
      ++counts.first;
    else
      ++counts.second;
  }
  double s = 0.0;
  for (const auto& [key, c] : blocks)
    s += log_beta(c.first + beta_, c.second + beta_) - log_beta_prior_;
  return s;
}

double IrmModel::full_log_score(const Assignment& x) const {
  for (int t = 0; t < rel_.num_types(); ++t) {
    auto begin = static_cast<std::size_t>(var_offset_[static_cast<std::size_t>(t)]);
    auto count = static_cast<std::size_t>(rel_.type_sizes[static_cast<std::size_t>(t)]);
    for (std::size_t i = begin; i < begin + count; ++i) {
      if (x[i] < 0) throw Error("incomplete assignment");
      if (x[i] >= static_cast<std::int32_t>(count))
        throw Error("cluster label exceeds the type's entity count");
    }
  }
  double s = block_log_likelihood(x);
  for (int t = 0; t < rel_.num_types(); ++t) {
    auto begin = static_cast<std::size_t>(var_offset_[static_cast<std::size_t>(t)]);
    auto count = static_cast<std::size_t>(rel_.type_sizes[static_cast<std::size_t>(t)]);
    std::vector<int> sizes;
    for (std::size_t i = begin; i < begin + count; ++i) {
      auto c = static_cast<std::size_t>(x[i]);
      if (c >= sizes.size()) sizes.resize(c + 1, 0);
      ++sizes[c];
    }
    s += crp_log_partition(sizes, crp_alpha_);
  }
  return s;
}

double IrmModel::heldout_log_likelihood(
    const Particle& p, const std::vector<RelationData::Cell>& cells) const {
  const auto& s = p.stats_as<Stats>();
  double out = 0.0;
  for (const auto& cell : cells) {
    for (int pos = 0; pos < rel_.arity(); ++pos) {
      int t = rel_.position_type[static_cast<std::size_t>(pos)];
      int i = cell.entities[static_cast<std::size_t>(pos)];
      if (i < 0 || i >= rel_.type_sizes[static_cast<std::size_t>(t)])
        throw Error("held-out cell index out of range");
    }
    std::pair<int, int> counts{0, 0};
    auto it = s.blocks.find(block_key(p.assignment, cell));
    if (it != s.blocks.end()) counts = it->second;
    double p1 =
        (counts.first + beta_) / (counts.first + counts.second + 2.0 * beta_);
    out += std::log(cell.value == 1 ? p1 : 1.0 - p1);
  }
  return out;
}

Assignment IrmModel::prior_sample(Rng& rng) const {
  Assignment x(static_cast<std::size_t>(total_entities_));
  for (int t = 0; t < rel_.num_types(); ++t) {
    std::vector<int> sizes;
    for (int i = 0; i < rel_.type_sizes[static_cast<std::size_t>(t)]; ++i) {
      double total = static_cast<double>(i) + crp_alpha_;
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
      x[static_cast<std::size_t>(var_offset_[static_cast<std::size_t>(t)] + i)] =
          label;
    }
  }
  return x;
}

}  // namespace dpvi
