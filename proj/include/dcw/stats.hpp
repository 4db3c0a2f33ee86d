#pragma once

// Small scalar statistics shared by replica experiments.

#include <cmath>
#include <stdexcept>

namespace dcw {

struct WilsonInterval {
  double low;
  double high;
};

// Wilson score interval for a binomial proportion.  z = 1.959964 for 95%,
// 2.575829 for 99%.
inline WilsonInterval wilson_interval(long long successes, long long trials, double z) {
  if (trials <= 0) throw std::invalid_argument("wilson_interval: trials must be > 0");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_interval: successes out of range");
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  double lo = center - half, hi = center + half;
  if (lo < 0.0) lo = 0.0;
  if (hi > 1.0) hi = 1.0;
  // At the boundaries center - half (resp. center + half) cancels exactly in
  // real arithmetic; pin the bound so rounding residue cannot leak through.
  if (successes == 0) lo = 0.0;
  if (successes == trials) hi = 1.0;
  return {lo, hi};
}

inline constexpr double z_95 = 1.959963984540054;
inline constexpr double z_99 = 2.5758293035489004;

}  // namespace dcw
