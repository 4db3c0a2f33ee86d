#include "dcw/counting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dcw/logspace.hpp"
#include "dcw/model.hpp"

namespace dcw {

std::string big_count_to_string(BigCount v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

bool admissible_sector(int n, int s) {
  return s >= -n && s <= n && ((s + n) % 2 == 0);
}

namespace {

// Exact binomial via the multiplicative recurrence; every intermediate stays
// a product of at most one extra factor over the exact value, so n <= 100
// keeps everything inside 128 bits.
BigCount big_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (n > 100) throw std::invalid_argument("big_binomial: exact path limited to n <= 100");
  if (k > n - k) k = n - k;
  BigCount res = 1;
  for (int i = 1; i <= k; ++i) {
    res = res * static_cast<BigCount>(static_cast<unsigned>(n - k + i));
    res /= static_cast<BigCount>(static_cast<unsigned>(i));
  }
  return res;
}

}  // namespace

BigCount nu_count(int n, int s) {
  if (n < 1) throw std::invalid_argument("nu_count: n must be >= 1");
  if (!admissible_sector(n, s)) return 0;
  return big_binomial(n, (n + s) / 2);
}

double log_nu_count(int n, int s) {
  if (n < 1) throw std::invalid_argument("log_nu_count: n must be >= 1");
  if (!admissible_sector(n, s)) return neg_inf;
  return log_binomial(n, (n + s) / 2);
}

double de_moivre_laplace_log(int n, int s) {
  if (n < 1) throw std::invalid_argument("de_moivre_laplace_log: n must be >= 1");
  if (!admissible_sector(n, s))
    throw std::invalid_argument("de_moivre_laplace_log: s violates sector parity/range");
  double nd = static_cast<double>(n);
  double sd = static_cast<double>(s);
  return nd * std::log(2.0) - 0.5 * std::log(0.5 * M_PI * nd) - sd * sd / (2.0 * nd);
}

// Pattern counts for a pair (x, y): sites split into (+,+), (+,-), (-,+),
// (-,-) classes of sizes a, b, c, d with
//   a+b+c+d = n, (a+b)-(c+d) = s, (a+c)-(b+d) = t, (a+d)-(b+c) = u.
// Solving: a = (n+s+t+u)/4, b = (n+s-t-u)/4, c = (n-s+t-u)/4, d = (n-s-t+u)/4.
namespace {
bool triple_pattern_counts(int n, int s, int t, int u, long long out[4]) {
  long long nums[4] = {
      static_cast<long long>(n) + s + t + u, static_cast<long long>(n) + s - t - u,
      static_cast<long long>(n) - s + t - u, static_cast<long long>(n) - s - t + u};
  for (int i = 0; i < 4; ++i) {
    if (nums[i] < 0 || nums[i] % 4 != 0) return false;
    out[i] = nums[i] / 4;
  }
  return true;
}
}  // namespace

BigCount nu_triple(int n, int s, int t, int u) {
  if (n < 1) throw std::invalid_argument("nu_triple: n must be >= 1");
  if (n > 60) throw std::invalid_argument("nu_triple: exact path limited to n <= 60");
  long long abcd[4];
  if (!triple_pattern_counts(n, s, t, u, abcd)) return 0;
  // multinomial n!/(a!b!c!d!) as a product of nested binomials; partial
  // products are multinomials over coarser partitions, so no overflow before
  // the final value (which is at most 4^n < 2^128 for n <= 60).
  BigCount res = big_binomial(n, static_cast<int>(abcd[0]));
  res *= big_binomial(n - static_cast<int>(abcd[0]), static_cast<int>(abcd[1]));
  res *= big_binomial(n - static_cast<int>(abcd[0] + abcd[1]), static_cast<int>(abcd[2]));
  return res;
}

double log_nu_triple(int n, int s, int t, int u) {
  if (n < 1) throw std::invalid_argument("log_nu_triple: n must be >= 1");
  long long abcd[4];
  if (!triple_pattern_counts(n, s, t, u, abcd)) return neg_inf;
  double lg = std::lgamma(static_cast<double>(n) + 1.0);
  for (int i = 0; i < 4; ++i) lg -= std::lgamma(static_cast<double>(abcd[i]) + 1.0);
  return lg;
}

bool is_typical(const ModelParams& params, int s) {
  return static_cast<double>(s) * s <= params.typicality_threshold();
}

bool is_typical(const ModelParams& params, const SpinConfig& config) {
  if (config.size() != params.n) throw std::invalid_argument("is_typical: size mismatch");
  return is_typical(params, config.magnetization());
}

bool is_typical_pair(const ModelParams& params, int s, int t, int u) {
  double thr = params.typicality_threshold();
  return static_cast<double>(s) * s <= thr && static_cast<double>(t) * t <= thr &&
         static_cast<double>(u) * u <= thr;
}

bool is_typical_pair(const ModelParams& params, const SpinConfig& x, const SpinConfig& y) {
  if (x.size() != params.n || y.size() != params.n)
    throw std::invalid_argument("is_typical_pair: size mismatch");
  return is_typical_pair(params, x.magnetization(), y.magnetization(), overlap(x, y));
}

double atypical_tail_ratio(const ModelParams& params, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("atypical_tail_ratio: delta must be > 0");
  int n = params.n;
  double thr = params.typicality_threshold();
  LogSumAccumulator acc;
  bool any = false;
  for (int s = -n; s <= n; s += 2) {
    double s2 = static_cast<double>(s) * s;
    if (s2 <= thr) continue;  // typical sectors excluded
    any = true;
    acc.add_log(log_nu_count(n, s) + (1.0 - delta) * s2 / (2.0 * n));
  }
  if (!any) return 0.0;
  return std::exp(acc.log_value() - n * std::log(2.0));
}

double triple_bound_margin(int n, int s, int t, int u, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("triple_bound_margin: C must be > 0");
  double log_nu = log_nu_triple(n, s, t, u);
  if (log_nu == neg_inf) return std::numeric_limits<double>::infinity();
  double nd = static_cast<double>(n);
  double log_bound = 2.0 * nd * std::log(2.0) + std::log(c) - 1.5 * std::log(nd) -
                     (static_cast<double>(s) * s + static_cast<double>(t) * t +
                      static_cast<double>(u) * u) /
                         (2.0 * nd);
  return log_bound - log_nu;
}

double z_cw_lower_bound_margin(const ModelParams& params) {
  params.require_theorem_mode();
  double log_c = std::log(0.25) + 0.5 * std::log(M_PI / (2.0 * (1.0 - params.beta)));
  return z_cw_log(params) - params.n * std::log(2.0) - log_c;
}

}  // namespace dcw
