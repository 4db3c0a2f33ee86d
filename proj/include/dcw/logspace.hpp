#pragma once

// Log-domain arithmetic helpers and compensated summation.  Everything that
// aggregates exponentially scaled weights goes through these routines.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace dcw {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; handles -inf identities.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == neg_inf) return a;  // covers both -inf
  return a + std::log1p(std::exp(b - a));
}

// log(sum_i exp(x_i)) with a single max shift and compensated accumulation.
// Empty input yields -inf (the sum of no terms is zero).
inline double log_sum_exp(std::span<const double> xs) {
  double m = neg_inf;
  for (double x : xs) {
    if (std::isnan(x)) throw std::invalid_argument("log_sum_exp: NaN term");
    if (x > m) m = x;
  }
  if (m == neg_inf) return neg_inf;
  double sum = 0.0, c = 0.0;
  for (double x : xs) {
    double t = std::exp(x - m);
    double y = t - c;
    double u = sum + y;
    c = (u - sum) - y;
    sum = u;
  }
  return m + std::log(sum);
}

inline double log_sum_exp(const std::vector<double>& xs) {
  return log_sum_exp(std::span<const double>(xs));
}

// Kahan-compensated accumulator for long linear-domain sums.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Streaming log-sum-exp: keeps a running shift and rescales when a term
// exceeds it.  Suitable for single-pass enumeration sweeps.
class LogSumAccumulator {
 public:
  void add_log(double x) {
    if (x == neg_inf) return;
    if (std::isnan(x)) throw std::invalid_argument("LogSumAccumulator: NaN term");
    if (x > shift_) {
      // rescale previous mass to the new shift
      sum_ = sum_ * std::exp(shift_ - x) + 1.0;
      shift_ = x;
    } else {
      sum_ += std::exp(x - shift_);
    }
  }
  double log_value() const {
    if (sum_ <= 0.0) return neg_inf;
    return shift_ + std::log(sum_);
  }

 private:
  double shift_ = neg_inf;
  double sum_ = 0.0;
};

// log C(n, k) via lgamma; exact arguments, ~1e-14 relative accuracy.
inline double log_binomial(long long n, long long k) {
  if (k < 0 || k > n) return neg_inf;
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// log cosh(x) without overflow for large |x|.
inline double log_cosh(double x) {
  double a = std::fabs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

}  // namespace dcw
