#include "models/ising.hpp"

#include <cmath>

#include "util/logsumexp.hpp"

namespace dpvi {

namespace {
inline double spin(std::int32_t v) { return v == 1 ? 1.0 : -1.0; }
}  // namespace

IsingModel::IsingModel(int side, double beta, std::vector<double> theta)
    : side_(side), beta_(beta), theta_(std::move(theta)) {
  if (side_ < 1) throw Error("lattice side must be positive");
  int n = side_ * side_;
  if (theta_.empty()) theta_.assign(static_cast<std::size_t>(n), 0.0);
  if (static_cast<int>(theta_.size()) != n)
    throw Error("field vector length must equal the number of nodes");
  neighbors_.resize(static_cast<std::size_t>(n));
  for (int r = 0; r < side_; ++r) {
    for (int c = 0; c < side_; ++c) {
      int i = r * side_ + c;
      if (c + 1 < side_) edges_.emplace_back(i, i + 1);
      if (r + 1 < side_) edges_.emplace_back(i, i + side_);
    }
  }
  for (auto [a, b] : edges_) {
    neighbors_[static_cast<std::size_t>(a)].push_back(b);
    neighbors_[static_cast<std::size_t>(b)].push_back(a);
  }
}

double IsingModel::full_log_score(const Assignment& x) const {
  double s = 0.0;
  for (auto [a, b] : edges_)
    s += beta_ * spin(x[static_cast<std::size_t>(a)]) *
         spin(x[static_cast<std::size_t>(b)]);
  for (std::size_t i = 0; i < x.size(); ++i) s += theta_[i] * spin(x[i]);
  return s;
}

double IsingModel::local_field_term(const Assignment& x, int n,
                                    int value) const {
  double field = theta_[static_cast<std::size_t>(n)];
  for (int j : neighbors_[static_cast<std::size_t>(n)]) {
    std::int32_t v = x[static_cast<std::size_t>(j)];
    if (v != kUnassigned) field += beta_ * spin(v);
  }
  return spin(value) * field;
}

std::vector<double> IsingModel::prefix_log_scores(const Particle& p,
                                                  int n) const {
  double base = p.log_score;
  return {base + local_field_term(p.assignment, n, 0),
          base + local_field_term(p.assignment, n, 1)};
}

std::vector<double> IsingModel::candidate_log_scores(const Particle& p,
                                                     int n) const {
  std::int32_t cur = p.assignment[static_cast<std::size_t>(n)];
  if (cur == kUnassigned) return prefix_log_scores(p, n);
  double old_term = local_field_term(p.assignment, n, cur);
  std::vector<double> out(2);
  for (int m = 0; m < 2; ++m)
    out[static_cast<std::size_t>(m)] =
        p.log_score + (local_field_term(p.assignment, n, m) - old_term);
  return out;
}

void IsingModel::apply(Particle& p, int n, int m, double log_score) const {
  p.assignment[static_cast<std::size_t>(n)] = static_cast<std::int32_t>(m);
  p.log_score = log_score;
}

Particle IsingModel::make_particle(const Assignment& x) const {
  Particle p;
  p.assignment = x;
  p.log_score = full_log_score(x);
  return p;
}

Assignment IsingModel::prior_sample(Rng& rng) const {
  Assignment x(static_cast<std::size_t>(num_vars()));
  for (auto& v : x) v = static_cast<std::int32_t>(rng.next_u32() & 1u);
  return x;
}

double ising_log_z_brute(const IsingModel& model) {
  int n = model.num_vars();
  if (n > 16) throw Error("brute-force partition function capped at 4x4");
  std::vector<double> scores;
  scores.reserve(1u << n);
  Assignment x(static_cast<std::size_t>(n));
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    for (int i = 0; i < n; ++i)
      x[static_cast<std::size_t>(i)] =
          static_cast<std::int32_t>((bits >> i) & 1u);
    scores.push_back(model.full_log_score(x));
  }
  return logsumexp(scores);
}

double ising_log_z_transfer(const IsingModel& model) {
  int side = model.side();
  if (side > 8) throw Error("transfer-matrix partition function capped at 8x8");
  double beta = model.beta();
  const std::vector<double>& theta = model.theta();
  std::uint32_t states = 1u << side;

  auto row_spin = [](std::uint32_t r, int c) {
    return ((r >> c) & 1u) ? 1.0 : -1.0;
  };
  auto intra = [&](int row, std::uint32_t r) {
    double s = 0.0;
    for (int c = 0; c + 1 < side; ++c)
      s += beta * row_spin(r, c) * row_spin(r, c + 1);
    for (int c = 0; c < side; ++c)
      s += theta[static_cast<std::size_t>(row * side + c)] * row_spin(r, c);
    return s;
  };

  std::vector<double> log_v(states);
  for (std::uint32_t r = 0; r < states; ++r) log_v[r] = intra(0, r);

  std::vector<double> terms(states);
  for (int row = 1; row < side; ++row) {
    std::vector<double> next(states);
    for (std::uint32_t r2 = 0; r2 < states; ++r2) {
      double in2 = intra(row, r2);
      for (std::uint32_t r1 = 0; r1 < states; ++r1) {
        double inter = 0.0;
        for (int c = 0; c < side; ++c)
          inter += beta * row_spin(r1, c) * row_spin(r2, c);
        terms[r1] = log_v[r1] + inter;
      }
      next[r2] = in2 + logsumexp(terms);
    }
    log_v = std::move(next);
  }
  return logsumexp(log_v);
}

}  // namespace dpvi
