#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace dpvi {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Max-subtracted logsumexp. Summation is strict left-to-right so that
// repeated evaluations of the same inputs are bit-identical.
inline double logsumexp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs)
    if (x > m) m = x;
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

inline double logsumexp2(double a, double b) {
  if (a == kNegInf && b == kNegInf) return kNegInf;
  double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace dpvi
