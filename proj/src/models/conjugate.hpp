#pragma once

#include <cmath>
#include <vector>

#include "core/types.hpp"
#include "util/stats_math.hpp"

namespace dpvi {

// Normal likelihood with independent Normal-Inverse-Gamma priors per
// dimension: y_d ~ N(m_d, s2_d), m_d ~ N(0, s2_d / tau), s2_d ~ IG(a, b).
struct NigPrior {
  double tau = 25.0;
  double a = 1.0;
  double b = 1.0;
  void validate() const {
    if (!(tau > 0.0 && a > 0.0 && b > 0.0))
      throw Error("NIG hyperparameters must be positive");
  }
};

// Per-cluster sufficient statistics: count plus per-dimension sum and sum of
// squares (compensated).
class NigStats {
 public:
  NigStats() = default;
  explicit NigStats(int dim) : sum_(dim), sumsq_(dim) {}

  int count() const { return count_; }
  void add(const std::vector<double>& y) {
    ++count_;
    for (std::size_t d = 0; d < sum_.size(); ++d) {
      sum_[d].add(y[d]);
      sumsq_[d].add(y[d] * y[d]);
    }
  }
  void remove(const std::vector<double>& y) {
    --count_;
    if (count_ < 0) throw Error("cluster cache underflow");
    for (std::size_t d = 0; d < sum_.size(); ++d) {
      sum_[d].sub(y[d]);
      sumsq_[d].sub(y[d] * y[d]);
    }
  }

  // log posterior-predictive density of y given the cluster members, a
  // product of Student-t densities over dimensions.
  double log_predictive(const std::vector<double>& y,
                        const NigPrior& prior) const {
    double n = count_;
    double out = 0.0;
    for (std::size_t d = 0; d < sum_.size(); ++d) {
      double s = sum_[d].value();
      double q = sumsq_[d].value();
      double kappa_n = prior.tau + n;
      double mu_n = s / kappa_n;
      double a_n = prior.a + 0.5 * n;
      // b + (sum of squared deviations)/2 + tau*n*(mean-0)^2 / (2(tau+n)),
      // expanded in raw moments: b + (q - s^2/kappa_n)/2.
      double b_n = prior.b + 0.5 * (q - s * s / kappa_n);
      double dof = 2.0 * a_n;
      double scale2 = b_n * (kappa_n + 1.0) / (a_n * kappa_n);
      out += student_t_logpdf(y[d], dof, mu_n, scale2);
    }
    return out;
  }

 private:
  int count_ = 0;
  std::vector<Kahan> sum_;
  std::vector<Kahan> sumsq_;
};

// Normal likelihood with a Normal-Inverse-Wishart prior:
// y ~ N(m, L), m ~ N(0, L / tau), L ~ IW(Lambda0, nu).
struct NiwPrior {
  double tau = 0.01;
  double nu = 3.0;       // must exceed dim - 1
  SymMat lambda0;        // defaults to identity when empty
  void validate(int dim) const {
    if (!(tau > 0.0)) throw Error("NIW tau must be positive");
    if (!(nu > dim - 1)) throw Error("NIW nu must exceed dim - 1");
  }
};

class NiwStats {
 public:
  NiwStats() = default;
  explicit NiwStats(int dim)
      : dim_(dim),
        sum_(static_cast<std::size_t>(dim)),
        rawmom_(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)) {
  }

  int count() const { return count_; }
  int dim() const { return dim_; }

  void add(const std::vector<double>& y) {
    ++count_;
    for (int d = 0; d < dim_; ++d) {
      sum_[static_cast<std::size_t>(d)].add(y[static_cast<std::size_t>(d)]);
      for (int e = 0; e < dim_; ++e)
        rawmom_[idx(d, e)].add(y[static_cast<std::size_t>(d)] *
                               y[static_cast<std::size_t>(e)]);
    }
  }
  void remove(const std::vector<double>& y) {
    --count_;
    if (count_ < 0) throw Error("cluster cache underflow");
    for (int d = 0; d < dim_; ++d) {
      sum_[static_cast<std::size_t>(d)].sub(y[static_cast<std::size_t>(d)]);
      for (int e = 0; e < dim_; ++e)
        rawmom_[idx(d, e)].sub(y[static_cast<std::size_t>(d)] *
                               y[static_cast<std::size_t>(e)]);
    }
  }

  std::vector<double> mean() const {
    std::vector<double> m(static_cast<std::size_t>(dim_), 0.0);
    if (count_ == 0) return m;
    for (int d = 0; d < dim_; ++d)
      m[static_cast<std::size_t>(d)] =
          sum_[static_cast<std::size_t>(d)].value() / count_;
    return m;
  }

  // Scatter matrix sum_i (y_i - mean)(y_i - mean)^T from the raw moments.
  SymMat scatter() const {
    SymMat s(dim_);
    std::vector<double> m = mean();
    for (int d = 0; d < dim_; ++d)
      for (int e = 0; e < dim_; ++e)
        s(d, e) = rawmom_[idx(d, e)].value() -
                  count_ * m[static_cast<std::size_t>(d)] *
                      m[static_cast<std::size_t>(e)];
    return s;
  }

  // log multivariate Student-t posterior predictive of y.
  double log_predictive(const std::vector<double>& y,
                        const NiwPrior& prior) const {
    double n = count_;
    double kappa_n = prior.tau + n;
    double nu_n = prior.nu + n;
    std::vector<double> m = mean();
    SymMat lambda_n =
        prior.lambda0.dim() == dim_ ? prior.lambda0 : SymMat::identity(dim_);
    lambda_n += scatter();
    if (count_ > 0)
      lambda_n.add_outer(m, m, prior.tau * n / kappa_n);

    double dof = nu_n - dim_ + 1.0;
    double scale_factor = (kappa_n + 1.0) / (kappa_n * dof);
    SymMat sigma = lambda_n.scaled(scale_factor);
    SymMat lower;
    if (!sigma.cholesky(lower))
      throw Error("predictive scale matrix is not positive definite");

    std::vector<double> mu_n(static_cast<std::size_t>(dim_), 0.0);
    for (int d = 0; d < dim_; ++d)
      mu_n[static_cast<std::size_t>(d)] =
          n * m[static_cast<std::size_t>(d)] / kappa_n;
    std::vector<double> delta(static_cast<std::size_t>(dim_));
    for (int d = 0; d < dim_; ++d)
      delta[static_cast<std::size_t>(d)] =
          y[static_cast<std::size_t>(d)] - mu_n[static_cast<std::size_t>(d)];
    std::vector<double> z = SymMat::forward_solve(lower, delta);
    double quad = 0.0;
    for (double v : z) quad += v * v;

    return std::lgamma(0.5 * (dof + dim_)) - std::lgamma(0.5 * dof) -
           0.5 * dim_ * std::log(dof * kPi) -
           0.5 * SymMat::log_det_from_cholesky(lower) -
           0.5 * (dof + dim_) * std::log1p(quad / dof);
  }

 private:
  std::size_t idx(int d, int e) const {
    return static_cast<std::size_t>(d * dim_ + e);
  }

  int count_ = 0;
  int dim_ = 0;
  std::vector<Kahan> sum_;
  std::vector<Kahan> rawmom_;
};

// CRP predictive: log P(x_n = c | previous n_before points), where
// `size_or_new` is the cluster size t_c for an existing table and 0 for a
// fresh one.
inline double crp_log_predictive(int size_or_new, int n_before, double alpha) {
  double num = size_or_new > 0 ? static_cast<double>(size_or_new) : alpha;
  return std::log(num) - std::log(n_before + alpha);
}

// Closed-form log CRP probability of a partition with the given cluster
// sizes over n points.
inline double crp_log_partition(const std::vector<int>& sizes, double alpha) {
  int n = 0;
  double s = 0.0;
  int live = 0;
  for (int t : sizes) {
    if (t <= 0) continue;
    ++live;
    n += t;
    s += std::lgamma(static_cast<double>(t));
  }
  return live * std::log(alpha) + s + std::lgamma(alpha) -
         std::lgamma(n + alpha);
}

}  // namespace dpvi
