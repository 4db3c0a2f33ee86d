#include "dcw/quenched.hpp"

#include <cmath>
#include <stdexcept>

#include "dcw/counting.hpp"
#include "dcw/logspace.hpp"
#include "dcw/parallel.hpp"

namespace dcw {

double NormalizedWeightMoment::reconstruct() const {
  KahanSum acc;
  for (const auto& comp : components) acc.add(comp.count * comp.log_factor);
  return acc.value();
}

double normalizer_log(const ModelParams& params, const GraphSample& graph) {
  if (graph.size() != params.n)
    throw std::invalid_argument("normalizer_log: graph size mismatch");
  return static_cast<double>(graph.edge_count()) * log_cosh(params.edge_coupling());
}

NormalizedWeightMoment exact_first_moment_log(const ModelParams& params, int s) {
  int n = params.n;
  if (!admissible_sector(n, s))
    throw std::invalid_argument("exact_first_moment_log: s violates sector parity/range");
  double a = params.edge_coupling();
  double pt = params.p * std::tanh(a);
  // Ordered pairs split by the sign of x_i x_j: (N^2 + s^2)/2 positive pairs,
  // (N^2 - s^2)/2 negative ones.  Averaging the per-pair indicator gives
  // 1 - p + p e^{+-a}/cosh a = 1 +- p tanh a.
  double n2 = static_cast<double>(n) * n;
  double s2 = static_cast<double>(s) * s;
  NormalizedWeightMoment m;
  m.components = {{(n2 + s2) / 2.0, std::log1p(pt)}, {(n2 - s2) / 2.0, std::log1p(-pt)}};
  m.log_value = m.components[0].count * m.components[0].log_factor +
                m.components[1].count * m.components[1].log_factor;
  return m;
}

NormalizedWeightMoment exact_second_moment_log(const ModelParams& params, int s1,
                                               int s2, int r) {
  int n = params.n;
  if (log_nu_triple(n, s1, s2, r) == neg_inf)
    throw std::invalid_argument("exact_second_moment_log: unrealizable (s1, s2, r)");
  double a = params.edge_coupling();
  double t = std::tanh(a);
  double p = params.p;
  // Pair classes by (u, v) = (x_i x_j, y_i y_j).  With site-pattern counts
  // (A, B, C, D) for (x_i, y_i) patterns, the class sizes are
  //   n_pp = A^2+B^2+C^2+D^2, n_pm = 2AB+2CD, n_mp = 2AC+2BD, n_mm = 2AD+2BC,
  // which collapse to quarter-sums of (N^2, s1^2, s2^2, r^2).
  double n2 = static_cast<double>(n) * n;
  double q1 = static_cast<double>(s1) * s1;
  double q2 = static_cast<double>(s2) * s2;
  double qr = static_cast<double>(r) * r;
  double n_pp = (n2 + q1 + q2 + qr) / 4.0;
  double n_pm = (n2 + q1 - q2 - qr) / 4.0;
  double n_mp = (n2 - q1 + q2 - qr) / 4.0;
  double n_mm = (n2 - q1 - q2 + qr) / 4.0;
  // e^{a(u+v)}/cosh^2 a - 1 equals 2t + t^2, -2t + t^2, or -t^2.
  double f_pp = std::log1p(p * (2.0 * t + t * t));
  double f_mm = std::log1p(p * (t * t - 2.0 * t));
  double f_mixed = std::log1p(-p * t * t);
  NormalizedWeightMoment m;
  m.components = {{n_pp, f_pp}, {n_pm, f_mixed}, {n_mp, f_mixed}, {n_mm, f_mm}};
  m.log_value = 0.0;
  for (const auto& comp : m.components) m.log_value += comp.count * comp.log_factor;
  return m;
}

double residual_c1(const ModelParams& params, int s) {
  if (!is_typical(params, s))
    throw std::invalid_argument("residual_c1: s must be typical");
  double principal = -params.beta * params.beta / 8.0 +
                     params.beta * static_cast<double>(s) * s / (2.0 * params.n);
  return exact_first_moment_log(params, s).log_value - principal;
}

namespace {

// log P(graph with e edges) when pairs = n^2 trials; safe at p = 1.
double log_graph_prob(int e, int pairs, double p) {
  double lp = e == 0 ? 0.0 : e * std::log(p);
  double lq = e == pairs ? 0.0
                         : (p < 1.0 ? (pairs - e) * std::log1p(-p) : neg_inf);
  return lp + lq;
}

}  // namespace

double enumerated_first_moment_log(const ModelParams& params, int s) {
  int n = params.n;
  if (n > 4)
    throw std::invalid_argument("enumerated_first_moment_log: exhaustive path needs n <= 4");
  if (!admissible_sector(n, s))
    throw std::invalid_argument("enumerated_first_moment_log: bad sector");
  // Representative configuration with magnetization s.
  SpinConfig x(n);
  for (int i = 0; i < (n + s) / 2; ++i) x.set_spin(i, +1);
  int pairs = n * n;
  std::vector<int> u(static_cast<std::size_t>(pairs));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      u[static_cast<std::size_t>(i * n + j)] = x.spin(i) * x.spin(j);
  double a = params.edge_coupling();
  double lc = log_cosh(a);
  LogSumAccumulator acc;
  for (std::uint64_t g = 0; g < (1ULL << pairs); ++g) {
    long long e_sum = 0;
    int edges = std::popcount(g);
    std::uint64_t bits = g;
    while (bits) {
      int b = std::countr_zero(bits);
      bits &= bits - 1;
      e_sum += u[static_cast<std::size_t>(b)];
    }
    acc.add_log(log_graph_prob(edges, pairs, params.p) +
                a * static_cast<double>(e_sum) - edges * lc);
  }
  return acc.log_value();
}

double enumerated_second_moment_log(const ModelParams& params, int s1, int s2, int r) {
  int n = params.n;
  if (n > 4)
    throw std::invalid_argument("enumerated_second_moment_log: exhaustive path needs n <= 4");
  if (nu_triple(n, s1, s2, r) == 0)
    throw std::invalid_argument("enumerated_second_moment_log: unrealizable (s1, s2, r)");
  // Representatives built from the site-pattern counts (A, B, C, D).
  long long A = (static_cast<long long>(n) + s1 + s2 + r) / 4;
  long long B = (static_cast<long long>(n) + s1 - s2 - r) / 4;
  long long C = (static_cast<long long>(n) - s1 + s2 - r) / 4;
  SpinConfig x(n), y(n);
  for (int i = 0; i < A + B; ++i) x.set_spin(i, +1);
  for (int i = 0; i < A; ++i) y.set_spin(i, +1);
  for (int i = static_cast<int>(A + B); i < A + B + C; ++i) y.set_spin(i, +1);
  int pairs = n * n;
  std::vector<int> uv(static_cast<std::size_t>(pairs));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      uv[static_cast<std::size_t>(i * n + j)] =
          x.spin(i) * x.spin(j) + y.spin(i) * y.spin(j);
  double a = params.edge_coupling();
  double lc = log_cosh(a);
  LogSumAccumulator acc;
  for (std::uint64_t g = 0; g < (1ULL << pairs); ++g) {
    long long e_sum = 0;
    int edges = std::popcount(g);
    std::uint64_t bits = g;
    while (bits) {
      int b = std::countr_zero(bits);
      bits &= bits - 1;
      e_sum += uv[static_cast<std::size_t>(b)];
    }
    acc.add_log(log_graph_prob(edges, pairs, params.p) +
                a * static_cast<double>(e_sum) - 2.0 * edges * lc);
  }
  return acc.log_value();
}

namespace {

// Per-sector log f values; validates non-negativity and boundedness.
std::vector<double> sector_log_f(int n, const SectorObservable& f) {
  std::vector<double> lf(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    double v = f(2 * k - n);
    if (std::isnan(v) || v < 0.0 || !std::isfinite(v))
      throw std::invalid_argument("sector observable must be finite and non-negative");
    lf[static_cast<std::size_t>(k)] = v == 0.0 ? neg_inf : std::log(v);
  }
  return lf;
}

// log E^{mu,CW}(f) = log sum_s nu_s f(s) e^{beta s^2/(2N)}.
double log_mu_cw_f(const ModelParams& params, const std::vector<double>& lf) {
  int n = params.n;
  LogSumAccumulator acc;
  for (int k = 0; k <= n; ++k) {
    if (lf[static_cast<std::size_t>(k)] == neg_inf) continue;
    double s = 2.0 * k - n;
    acc.add_log(log_binomial(n, k) + params.beta * s * s / (2.0 * n) +
                lf[static_cast<std::size_t>(k)]);
  }
  return acc.log_value();
}

}  // namespace

double cw_sector_expectation(const ModelParams& params, const SectorObservable& f,
                             int cap) {
  if (params.n > cap)
    throw std::invalid_argument("cw_sector_expectation: sector cap exceeded");
  auto lf = sector_log_f(params.n, f);
  double num = log_mu_cw_f(params, lf);
  if (num == neg_inf) return 0.0;
  return std::exp(num - z_cw_log(params, cap));
}

RTValue rt_functionals(const ModelParams& params, const GraphSample& graph,
                       const SectorObservable& f, int cap) {
  if (graph.size() != params.n)
    throw std::invalid_argument("rt_functionals: graph size mismatch");
  auto lf = sector_log_f(params.n, f);
  BgSectorHistogram hist = bg_sector_histogram(graph, cap);
  double a = params.edge_coupling();
  double log_num = hist.log_weighted_sum(a, lf);
  double log_norm = normalizer_log(params, graph) - params.beta * params.beta / 8.0;
  double log_mu_cw = log_mu_cw_f(params, lf);
  double z_cw = z_cw_log(params);
  RTValue out;
  // E^{mu,CW}(f) = 0 forces the degenerate branches: R := 1, T = 0.
  out.r = log_mu_cw == neg_inf ? 1.0 : std::exp(log_num - log_norm - log_mu_cw);
  out.t = log_num == neg_inf ? 0.0 : std::exp(log_num - log_norm - z_cw);
  return out;
}

double r_functional(const ModelParams& params, const GraphSample& graph,
                    const SectorObservable& f, int cap) {
  return rt_functionals(params, graph, f, cap).r;
}

double t_functional(const ModelParams& params, const GraphSample& graph,
                    const SectorObservable& f, int cap) {
  return rt_functionals(params, graph, f, cap).t;
}

ConcentrationResult concentration_experiment(const ModelParams& params,
                                             const SectorObservable& f,
                                             const ReplicaPlan& plan, double delta,
                                             int cap, int threads) {
  if (plan.replicas < 1)
    throw std::invalid_argument("concentration_experiment: need at least one replica");
  if (!(delta > 0.0))
    throw std::invalid_argument("concentration_experiment: delta must be > 0");
  ConcentrationResult result;
  result.replicas.resize(static_cast<std::size_t>(plan.replicas));
  parallel_for_index(plan.replicas, threads, [&](int rep) {
    std::uint64_t seed = plan.stream(rep, 0);
    GraphSample graph = sample_graph(params, seed);
    RTValue rt = rt_functionals(params, graph, f, cap);
    result.replicas[static_cast<std::size_t>(rep)] =
        ReplicaRT{rep, seed, rt.r, rt.t, graph.edge_count()};
  });
  long long exceed = 0;
  for (const auto& rec : result.replicas)
    if (std::fabs(rec.r - 1.0) > delta) ++exceed;
  result.exceed_count = exceed;
  result.fraction = static_cast<double>(exceed) / plan.replicas;
  result.wilson95 = wilson_interval(exceed, plan.replicas, z_95);
  return result;
}

}  // namespace dcw
