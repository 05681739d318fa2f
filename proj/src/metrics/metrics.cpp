#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "util/logsumexp.hpp"

namespace dpvi::metrics {

double total_marginal_error(const std::vector<std::vector<double>>& approx,
                            const std::vector<std::vector<double>>& exact) {
  if (approx.size() != exact.size())
    throw Error("marginal table shape mismatch");
  double err = 0.0;
  for (std::size_t n = 0; n < approx.size(); ++n) {
    if (approx[n].size() != exact[n].size())
      throw Error("marginal table shape mismatch");
    for (std::size_t s = 0; s < approx[n].size(); ++s)
      err += std::abs(approx[n][s] - exact[n][s]);
  }
  return err;
}

namespace {

// Contingency counts with labels compacted to dense indices.
struct Contingency {
  std::vector<std::vector<int>> table;  // pred x true
  std::vector<int> pred_sizes;
  std::vector<int> true_sizes;
  int total = 0;
};

Contingency contingency(const std::vector<std::int32_t>& predicted,
                        const std::vector<std::int32_t>& truth) {
  if (predicted.empty() || predicted.size() != truth.size())
    throw Error("label sequences must be non-empty and equal length");
  std::map<std::int32_t, int> pred_ids, true_ids;
  for (std::int32_t v : predicted) pred_ids.emplace(v, 0);
  for (std::int32_t v : truth) true_ids.emplace(v, 0);
  int next = 0;
  for (auto& [k, v] : pred_ids) v = next++;
  next = 0;
  for (auto& [k, v] : true_ids) v = next++;

  Contingency c;
  c.table.assign(pred_ids.size(), std::vector<int>(true_ids.size(), 0));
  c.pred_sizes.assign(pred_ids.size(), 0);
  c.true_sizes.assign(true_ids.size(), 0);
  c.total = static_cast<int>(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    int p = pred_ids[predicted[i]];
    int t = true_ids[truth[i]];
    ++c.table[static_cast<std::size_t>(p)][static_cast<std::size_t>(t)];
    ++c.pred_sizes[static_cast<std::size_t>(p)];
    ++c.true_sizes[static_cast<std::size_t>(t)];
  }
  return c;
}

double entropy(const std::vector<int>& sizes, int total) {
  double h = 0.0;
  for (int s : sizes) {
    if (s == 0) continue;
    double p = static_cast<double>(s) / total;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double v_measure(const std::vector<std::int32_t>& predicted,
                 const std::vector<std::int32_t>& truth) {
  Contingency c = contingency(predicted, truth);
  double h_true = entropy(c.true_sizes, c.total);
  double h_pred = entropy(c.pred_sizes, c.total);

  double h_true_given_pred = 0.0;
  double h_pred_given_true = 0.0;
  for (std::size_t p = 0; p < c.table.size(); ++p) {
    for (std::size_t t = 0; t < c.table[p].size(); ++t) {
      int n = c.table[p][t];
      if (n == 0) continue;
      double joint = static_cast<double>(n) / c.total;
      h_true_given_pred -=
          joint * std::log(static_cast<double>(n) /
                           c.pred_sizes[p]);
      h_pred_given_true -=
          joint * std::log(static_cast<double>(n) /
                           c.true_sizes[t]);
    }
  }

  double homogeneity = h_true == 0.0 ? 1.0 : 1.0 - h_true_given_pred / h_true;
  double completeness = h_pred == 0.0 ? 1.0 : 1.0 - h_pred_given_true / h_pred;
  if (homogeneity + completeness == 0.0) return 0.0;
  return 2.0 * homogeneity * completeness / (homogeneity + completeness);
}

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  int n = static_cast<int>(cost.size());
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  const double inf = std::numeric_limits<double>::infinity();

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        double cur = cost[static_cast<std::size_t>(i0 - 1)]
                         [static_cast<std::size_t>(j - 1)] -
                     u[static_cast<std::size_t>(i0)] -
                     v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[static_cast<std::size_t>(j)] != 0)
      row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] =
          j - 1;
  return row_to_col;
}

double matched_hamming(const std::vector<std::int32_t>& predicted,
                       const std::vector<std::int32_t>& truth) {
  Contingency c = contingency(predicted, truth);
  std::size_t side = std::max(c.table.size(), c.table[0].size());
  // Maximize overlap = minimize negated counts, padded square.
  std::vector<std::vector<double>> cost(side, std::vector<double>(side, 0.0));
  for (std::size_t p = 0; p < c.table.size(); ++p)
    for (std::size_t t = 0; t < c.table[p].size(); ++t)
      cost[p][t] = -static_cast<double>(c.table[p][t]);
  std::vector<int> match = hungarian(cost);
  int overlap = 0;
  for (std::size_t p = 0; p < c.table.size(); ++p) {
    int t = match[p];
    if (t >= 0 && t < static_cast<int>(c.table[p].size()))
      overlap += c.table[p][static_cast<std::size_t>(t)];
  }
  return 1.0 - static_cast<double>(overlap) / c.total;
}

double predictive_loglik_hmm(const std::vector<double>& init,
                             const std::vector<std::vector<double>>& trans,
                             const std::vector<std::vector<int>>& emit_counts,
                             int alphabet, double delta,
                             const std::vector<int>& test) {
  if (test.empty()) throw Error("empty test sequence");
  if (delta < 0.0) throw Error("smoothing delta must be non-negative");
  std::size_t s_count = init.size();

  std::vector<std::vector<double>> log_emit(
      s_count, std::vector<double>(static_cast<std::size_t>(alphabet)));
  for (std::size_t s = 0; s < s_count; ++s) {
    double row_total = 0.0;
    for (int v = 0; v < alphabet; ++v)
      row_total += emit_counts[s][static_cast<std::size_t>(v)] + delta;
    for (int v = 0; v < alphabet; ++v)
      log_emit[s][static_cast<std::size_t>(v)] = std::log(
          (emit_counts[s][static_cast<std::size_t>(v)] + delta) / row_total);
  }

  std::vector<double> log_alpha(s_count), next(s_count), terms(s_count);
  for (std::size_t s = 0; s < s_count; ++s)
    log_alpha[s] = std::log(init[s]) +
                   log_emit[s][static_cast<std::size_t>(test[0])];
  for (std::size_t n = 1; n < test.size(); ++n) {
    for (std::size_t s = 0; s < s_count; ++s) {
      for (std::size_t r = 0; r < s_count; ++r)
        terms[r] = log_alpha[r] + std::log(trans[r][s]);
      next[s] = logsumexp(terms) +
                log_emit[s][static_cast<std::size_t>(test[n])];
    }
    log_alpha = next;
  }
  return logsumexp(log_alpha);
}

double weighted_particle_metric(const std::vector<double>& values,
                                const std::vector<double>& log_weights) {
  if (values.size() != log_weights.size())
    throw Error("metric/weight length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k)
    s += std::exp(log_weights[k]) * values[k];
  return s;
}

}  // namespace dpvi::metrics
