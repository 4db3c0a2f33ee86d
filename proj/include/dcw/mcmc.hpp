#pragma once

// Glauber (random-scan heat-bath) dynamics targeting the BG Gibbs measure on
// a fixed graph realization.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dcw/graph.hpp"
#include "dcw/params.hpp"
#include "dcw/spin.hpp"

namespace dcw {

struct ChainConfig {
  long long sweeps = 0;          // total sweeps, burn-in included
  long long burn_in_sweeps = 0;
  int thinning = 1;              // in sweeps; recorded = floor((sweeps-burn)/thinning)
  std::uint64_t seed = 0;
  enum class Init { AllUp, AllDown, UniformRandom } init = Init::UniformRandom;
};

// Default run shape: burn-in 10 N sweeps (diagnostics-gated via the ESS floor,
// not asserted sufficient a priori), then `recorded` thinned samples.
ChainConfig default_chain_config(int n, std::uint64_t seed, long long recorded = 3000,
                                 int thinning = 1);

// h_i = (beta/(2Np)) sum_{j != i} (eps_ij + eps_ji) x_j.  The self-loop term
// only ever contributes x_i^2 = 1 to the energy, so it drops out of every
// single-site update and is excluded here.
double local_field(const ModelParams& params, const GraphSample& graph,
                   const SpinConfig& config, int i);

// One chain; strictly sequential, bitwise reproducible given (graph, config).
class GlauberChain {
 public:
  GlauberChain(const ModelParams& params, const GraphSample& graph,
               std::uint64_t seed, ChainConfig::Init init);

  // N random-site heat-bath updates; site i is set to +1 with probability
  // e^{h_i}/(e^{h_i} + e^{-h_i}).
  void sweep();

  int size() const { return n_; }
  int magnetization() const { return s_; }
  SpinConfig state() const;
  std::pair<int, int> group_sums_now(const TwoGroupPartition& part) const;
  long long updates() const { return updates_; }
  long long flips() const { return flips_; }

 private:
  int n_;
  double a_;
  int words_;
  std::vector<std::uint64_t> row_nd_, col_nd_;  // diagonal-free masks, flattened
  std::vector<int> pair_degree_;                // |row_i| + |col_i| without diagonal
  std::vector<std::uint64_t> state_;
  int s_ = 0;
  long long updates_ = 0;
  long long flips_ = 0;
  SplitMix64 rng_;
};

// Thinned post-burn-in samples of the standardized two-group vector
// (s1/sqrt(n1), s2/sqrt(n2)).
std::vector<std::array<double, 2>> run_chain(const ModelParams& params,
                                             const GraphSample& graph,
                                             const TwoGroupPartition& part,
                                             const ChainConfig& chain);

// Thinned post-burn-in samples of scale * s.
std::vector<double> run_chain_magnetization(const ModelParams& params,
                                            const GraphSample& graph,
                                            const ChainConfig& chain, double scale);

// Row-major (2^n x 2^n) one-update transition matrix of the random-scan chain
// (n <= 10); state index bit i = 1 means x_i = +1.
std::vector<double> build_random_scan_kernel(const ModelParams& params,
                                             const GraphSample& graph);

// Batch-means effective sample size (sqrt(n) batches).  Constant input
// degenerates to ESS = 1; output clipped to [1, n].  Needs >= 100 samples.
double batch_means_ess(std::span<const double> samples);

// Per-coordinate ESS of two-group samples.
std::array<double, 2> batch_means_ess2(std::span<const std::array<double, 2>> samples);

}  // namespace dcw
