#pragma once

// CW and BG Gibbs weights, exact finite-N sector laws, and full enumeration
// over configuration space for small N.

#include <cstdint>
#include <functional>
#include <vector>

#include "dcw/graph.hpp"
#include "dcw/law.hpp"
#include "dcw/params.hpp"
#include "dcw/spin.hpp"

namespace dcw {

// Default ceiling for 2^N enumeration sweeps.
inline constexpr int default_enum_cap = 24;

// Default ceiling for O(N) / O(N^2) magnetization-sector sums.
inline constexpr int default_sector_cap = 100000;

// log mu_cw(x) = (beta / 2N) s(x)^2 (sum over all ordered pairs, i=j included).
double cw_log_weight(const ModelParams& params, const SpinConfig& config);

// log mu_bg(x) = (beta / 2Np) sum_{(i,j) in graph} x_i x_j, self-loops included.
double bg_log_weight(const ModelParams& params, const GraphSample& graph,
                     const SpinConfig& config);

// log Z_cw = log sum_s nu_{N,s} exp(beta s^2 / 2N), exact sector sum.
double z_cw_log(const ModelParams& params, int cap = default_sector_cap);

// Law of s under the CW Gibbs measure; outcomes are the raw magnetizations.
WeightedLaw cw_exact_magnetization_law(const ModelParams& params,
                                       int cap = default_sector_cap);

// Joint law of (s1, s2) for a covering two-group partition under CW.
// Cost O(n1 * n2) sector pairs; non-covering partitions are rejected here.
WeightedLaw cw_exact_two_group_law(const ModelParams& params,
                                   const TwoGroupPartition& part,
                                   int cap = 4000);

// A map SpinConfig -> R^d for exact pushforwards.
struct VectorObservable {
  int dim;
  std::function<void(const SpinConfig&, double* out)> eval;
};

VectorObservable scaled_magnetization_observable(double scale);
VectorObservable constant_observable(double value);
VectorObservable two_group_observable(const TwoGroupPartition& part,
                                      double scale1, double scale2);

// Exact pushforward law by full 2^N enumeration, CW or BG weights.
WeightedLaw enumerate_pushforward_cw(const ModelParams& params,
                                     const VectorObservable& obs,
                                     int cap = default_enum_cap);
WeightedLaw enumerate_pushforward_bg(const ModelParams& params,
                                     const GraphSample& graph,
                                     const VectorObservable& obs,
                                     int cap = default_enum_cap);

// Joint counts of (energy, magnetization) over all 2^N configurations, where
// energy E(x) = sum_{(i,j) in graph} x_i x_j.  E has the parity of edge_count
// and lies in [-edge_count, edge_count]; cell (e, s) is stored at
// [(e + edge_count)/2 * (N+1) + (s + N)/2].  This collapses the BG sweep for
// every magnetization-sector observable into |cells| = O(N^3) work afterward.
struct BgSectorHistogram {
  int n = 0;
  long long edge_count = 0;
  std::vector<std::uint32_t> counts;

  std::uint32_t count(long long e, int s) const;

  // log sum over cells of count * exp(a * E) * f(s), f >= 0 sector weights
  // given as log f; returns -inf for identically -inf input.
  double log_weighted_sum(double a, const std::vector<double>& log_f_by_sector) const;
};

BgSectorHistogram bg_sector_histogram(const GraphSample& graph,
                                      int cap = default_enum_cap);

// Exact BG law of the raw magnetization via the (E, s) histogram.
WeightedLaw bg_exact_magnetization_law(const ModelParams& params,
                                       const GraphSample& graph,
                                       int cap = default_enum_cap);

// Gray-code sweep over all configurations of up to `cap` spins.  The callback
// receives (config, s, e) with e the graph energy above; configs differ by one
// flipped spin between consecutive calls.
void for_each_config_bg(const GraphSample& graph,
                        const std::function<void(const SpinConfig&, int, long long)>& cb,
                        int cap = default_enum_cap);

}  // namespace dcw
