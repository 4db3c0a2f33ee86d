#pragma once

// Quenched (graph-averaged) moments of the normalized BG weight, the R/T
// functionals, and Monte Carlo concentration over graph replicas.

#include <cstdint>
#include <functional>
#include <vector>

#include "dcw/graph.hpp"
#include "dcw/model.hpp"
#include "dcw/params.hpp"
#include "dcw/stats.hpp"

namespace dcw {

// A quenched-moment value together with its per-pair-class breakdown:
// log_value = sum over classes of count * log_factor (exactly, by
// construction; the reconstruction identity is testable to 1e-12).
struct NormalizedWeightMoment {
  double log_value;
  struct Component {
    double count;       // number of ordered site pairs in the class
    double log_factor;  // log of the common per-pair factor
  };
  std::vector<Component> components;

  double reconstruct() const;
};

// Sum_eps log cosh(a) = edge_count * log cosh(beta/(2Np)).
double normalizer_log(const ModelParams& params, const GraphSample& graph);

// log E_eps[ e^{a E(x)} / cosh(a)^{edge_count} ] for any x with s(x) = s.
// Independence across ordered pairs gives
//   ((N^2+s^2)/2) log(1 + p tanh a) + ((N^2-s^2)/2) log(1 - p tanh a).
NormalizedWeightMoment exact_first_moment_log(const ModelParams& params, int s);

// log E_eps[ product of two normalized weights ] for any pair with
// magnetizations (s1, s2) and overlap r.  Pair classes (u, v) =
// (x_i x_j, y_i y_j) in {+-1}^2 have counts
//   n_uv = (N^2 + u' s1^2 + v' s2^2 + u'v' r^2)/4   (u', v' the signs)
// and per-pair factor 1 - p + p e^{a(u+v)} / cosh^2 a.
NormalizedWeightMoment exact_second_moment_log(const ModelParams& params, int s1,
                                               int s2, int r);

// exact_first_moment_log minus the displayed principal term
// (-beta^2/8 + beta s^2/(2N)).  Requires a typical sector.
double residual_c1(const ModelParams& params, int s);

// Exhaustive oracles: plain averages over all 2^(n^2) graphs (n <= 4).
double enumerated_first_moment_log(const ModelParams& params, int s);
double enumerated_second_moment_log(const ModelParams& params, int s1, int s2, int r);

// Bounded non-negative observables of the magnetization sector.
using SectorObservable = std::function<double(int)>;

// E^{P,CW}(f) by exact sector sum.
double cw_sector_expectation(const ModelParams& params, const SectorObservable& f,
                             int cap = default_sector_cap);

// R_N(f) = E^{mu,BG}(f) / [cosh(a)^{edge_count} e^{-beta^2/8} E^{mu,CW}(f)],
// with R_N = 1 when E^{mu,CW}(f) = 0.  Expectations under mu are sums against
// the unnormalized Gibbs weights, computed by exact 2^N sweeps.
double r_functional(const ModelParams& params, const GraphSample& graph,
                    const SectorObservable& f, int cap = default_enum_cap);

// T_N(f) = E^{mu,BG}(f) / [cosh(a)^{edge_count} e^{-beta^2/8} Z_cw];
// satisfies T = R * E^{P,CW}(f) whenever E^{mu,CW}(f) > 0.
double t_functional(const ModelParams& params, const GraphSample& graph,
                    const SectorObservable& f, int cap = default_enum_cap);

struct RTValue {
  double r;
  double t;
};

// Both functionals from a single enumeration sweep.
RTValue rt_functionals(const ModelParams& params, const GraphSample& graph,
                       const SectorObservable& f, int cap = default_enum_cap);

struct ReplicaRT {
  int replica;
  std::uint64_t seed;
  double r;
  double t;
  long long edge_count;
};

struct ConcentrationResult {
  std::vector<ReplicaRT> replicas;
  long long exceed_count;
  double fraction;             // estimated P(|R - 1| > delta)
  WilsonInterval wilson95;
};

// Monte Carlo estimate of P_eps(|R_N(f) - 1| > delta) over plan replicas.
ConcentrationResult concentration_experiment(const ModelParams& params,
                                             const SectorObservable& f,
                                             const ReplicaPlan& plan, double delta,
                                             int cap = default_enum_cap,
                                             int threads = 1);

}  // namespace dcw
