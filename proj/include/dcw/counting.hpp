#pragma once

// Exact spin-counting combinatorics: sector counts, the de Moivre-Laplace
// surrogate, typicality cuts, and tail/margin diagnostics.

#include <cstdint>
#include <string>

#include "dcw/params.hpp"
#include "dcw/spin.hpp"

namespace dcw {

// 128-bit unsigned counts cover every exact path used here: single-sector
// counts up to n = 100 and triple counts up to 4^n for n <= 60.
using BigCount = unsigned __int128;

std::string big_count_to_string(BigCount v);

// Parity-admissible magnetizations: s in {-n, -n+2, ..., n}.
bool admissible_sector(int n, int s);

// nu_{n,s} = #{x : s(x) = s} = C(n, (n+s)/2); 0 when s is not admissible.
// Exact path requires n <= 100.
BigCount nu_count(int n, int s);

// log nu_{n,s} via lgamma (valid for all n); -inf when not admissible.
double log_nu_count(int n, int s);

// log of the surrogate 2^n / sqrt(pi n / 2) * exp(-s^2 / (2n)).
// Requires an admissible sector.
double de_moivre_laplace_log(int n, int s);

// nu_{n,(s,t,u)} = #{(x,y) pairs : s(x)=s, s(y)=t, overlap(x,y)=u}.
// Closed form: the multinomial n! / (n_pp! n_pm! n_mp! n_mm!) with
//   n_pp = (n+s+t+u)/4, n_pm = (n+s-t-u)/4,
//   n_mp = (n-s+t-u)/4, n_mm = (n-s-t+u)/4,
// and 0 unless all four are nonnegative integers.  Exact path: n <= 60.
BigCount nu_triple(int n, int s, int t, int u);

// log nu_{n,(s,t,u)} via lgamma (valid for all n); -inf when unrealizable.
double log_nu_triple(int n, int s, int t, int u);

// Typicality: s^2 <= n (n p)^m, boundary included.
bool is_typical(const ModelParams& params, int s);
bool is_typical(const ModelParams& params, const SpinConfig& config);

// Pair typicality: all of s^2, t^2, u^2 within the threshold.
bool is_typical_pair(const ModelParams& params, int s, int t, int u);
bool is_typical_pair(const ModelParams& params, const SpinConfig& x, const SpinConfig& y);

// 2^-n * sum over atypical sectors s of nu_{n,s} * exp((1-delta) s^2 / (2n)),
// evaluated in log space with the lgamma sector counts.
double atypical_tail_ratio(const ModelParams& params, double delta);

// log of [ C * 4^n / n^{3/2} * exp(-(s^2+t^2+u^2)/(2n)) ] minus log nu_triple.
// Positive margins certify the envelope bound at constant C.
double triple_bound_margin(int n, int s, int t, int u, double c);

// log Z_cw - n log 2 - log((1/4) sqrt(pi / (2 (1 - beta)))).  Positive when
// the partition function clears the 2^n C floor.  Requires beta < 1.
double z_cw_lower_bound_margin(const ModelParams& params);

}  // namespace dcw
