#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dpvi {

inline constexpr double kPi = 3.14159265358979323846;

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Binary entropy in nats; H(0) = H(1) = 0.
inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

// log density of a Student-t with `dof` degrees of freedom, location `loc`
// and squared scale `scale2`.
inline double student_t_logpdf(double x, double dof, double loc,
                               double scale2) {
  double z2 = (x - loc) * (x - loc) / scale2;
  return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
         0.5 * std::log(dof * kPi * scale2) -
         0.5 * (dof + 1.0) * std::log1p(z2 / dof);
}

// Kahan-compensated accumulator; supports subtraction for remove updates.
class Kahan {
 public:
  void add(double x) {
    double y = x - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  void sub(double x) { add(-x); }
  double value() const { return sum_; }
  void reset() { sum_ = comp_ = 0.0; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Dense symmetric matrix, row-major, for the small dimensions used by the
// full-covariance conjugate model.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(int dim, double diag = 0.0) : dim_(dim), a_(dim * dim, 0.0) {
    for (int i = 0; i < dim; ++i) (*this)(i, i) = diag;
  }
  static SymMat identity(int dim) { return SymMat(dim, 1.0); }

  int dim() const { return dim_; }
  double& operator()(int i, int j) { return a_[i * dim_ + j]; }
  double operator()(int i, int j) const { return a_[i * dim_ + j]; }

  SymMat& operator+=(const SymMat& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  SymMat scaled(double s) const {
    SymMat r = *this;
    for (double& v : r.a_) v *= s;
    return r;
  }
  void add_outer(const std::vector<double>& u, const std::vector<double>& v,
                 double w) {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) (*this)(i, j) += w * u[i] * v[j];
  }

  // In-place lower Cholesky; returns false when not positive definite.
  bool cholesky(SymMat& lower) const {
    lower = SymMat(dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = (*this)(i, j);
        for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
        if (i == j) {
          if (s <= 0.0) return false;
          lower(i, i) = std::sqrt(s);
        } else {
          lower(i, j) = s / lower(j, j);
        }
      }
    }
    return true;
  }

  // Solves L y = b for lower-triangular L.
  static std::vector<double> forward_solve(const SymMat& lower,
                                           const std::vector<double>& b) {
    int n = lower.dim();
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      double s = b[i];
      for (int k = 0; k < i; ++k) s -= lower(i, k) * y[k];
      y[i] = s / lower(i, i);
    }
    return y;
  }

  static double log_det_from_cholesky(const SymMat& lower) {
    double s = 0.0;
    for (int i = 0; i < lower.dim(); ++i) s += std::log(lower(i, i));
    return 2.0 * s;
  }

 private:
  int dim_ = 0;
  std::vector<double> a_;
};

// log of the multivariate gamma function Gamma_d(a).
inline double log_multigamma(int d, double a) {
  double s = 0.25 * d * (d - 1) * std::log(kPi);
  for (int i = 0; i < d; ++i) s += std::lgamma(a - 0.5 * i);
  return s;
}

}  // namespace dpvi
