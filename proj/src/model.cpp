#include "dcw/model.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dcw/counting.hpp"
#include "dcw/logspace.hpp"

namespace dcw {

double cw_log_weight(const ModelParams& params, const SpinConfig& config) {
  if (config.size() != params.n)
    throw std::invalid_argument("cw_log_weight: config size mismatch");
  double s = config.magnetization();
  return params.beta * s * s / (2.0 * params.n);
}

double bg_log_weight(const ModelParams& params, const GraphSample& graph,
                     const SpinConfig& config) {
  if (config.size() != params.n || graph.size() != params.n)
    throw std::invalid_argument("bg_log_weight: dimension mismatch");
  // E = sum over present pairs of x_i x_j; count agreeing pairs by masked
  // popcount row by row.
  long long agree = 0;
  int n = params.n;
  int words = graph.words_per_row();
  for (int i = 0; i < n; ++i) {
    const std::uint64_t* row = graph.row(i);
    int xi = config.spin(i);
    for (int w = 0; w < words; ++w) {
      // bits j with x_i x_j = +1; ~word has stray bits only beyond n, where
      // the row is guaranteed empty.
      std::uint64_t pos = xi > 0 ? config.word(w) : ~config.word(w);
      agree += std::popcount(row[w] & pos);
    }
  }
  long long e = 2 * agree - graph.edge_count();
  return params.edge_coupling() * static_cast<double>(e);
}

namespace {
std::vector<double> log_binom_table(int n) {
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) t[static_cast<std::size_t>(k)] = log_binomial(n, k);
  return t;
}
}  // namespace

double z_cw_log(const ModelParams& params, int cap) {
  if (params.n > cap) throw std::invalid_argument("z_cw_log: sector cap exceeded");
  int n = params.n;
  auto lb = log_binom_table(n);
  LogSumAccumulator acc;
  for (int k = 0; k <= n; ++k) {
    double s = 2.0 * k - n;
    acc.add_log(lb[static_cast<std::size_t>(k)] + params.beta * s * s / (2.0 * n));
  }
  return acc.log_value();
}

WeightedLaw cw_exact_magnetization_law(const ModelParams& params, int cap) {
  if (params.n > cap)
    throw std::invalid_argument("cw_exact_magnetization_law: sector cap exceeded");
  int n = params.n;
  auto lb = log_binom_table(n);
  WeightedLaw law(1);
  for (int k = 0; k <= n; ++k) {
    double s = 2.0 * k - n;
    law.add1(s, lb[static_cast<std::size_t>(k)] + params.beta * s * s / (2.0 * n));
  }
  law.normalize();
  return law;
}

WeightedLaw cw_exact_two_group_law(const ModelParams& params,
                                   const TwoGroupPartition& part, int cap) {
  if (part.size() != params.n)
    throw std::invalid_argument("cw_exact_two_group_law: partition size mismatch");
  if (!part.covering())
    throw std::invalid_argument(
        "cw_exact_two_group_law: exact mode requires a covering partition (n1 + n2 = N)");
  if (params.n > cap)
    throw std::invalid_argument("cw_exact_two_group_law: sector cap exceeded");
  int n1 = part.n1(), n2 = part.n2(), n = params.n;
  auto lb1 = log_binom_table(n1);
  auto lb2 = log_binom_table(n2);
  WeightedLaw law(2);
  // s1 outer, s2 inner: outcomes arrive already in lexicographic order, so
  // every add is an O(1) append.
  for (int k1 = 0; k1 <= n1; ++k1) {
    double s1 = 2.0 * k1 - n1;
    for (int k2 = 0; k2 <= n2; ++k2) {
      double s2 = 2.0 * k2 - n2;
      double s = s1 + s2;
      law.add2(s1, s2,
               lb1[static_cast<std::size_t>(k1)] + lb2[static_cast<std::size_t>(k2)] +
                   params.beta * s * s / (2.0 * n));
    }
  }
  law.normalize();
  return law;
}

VectorObservable scaled_magnetization_observable(double scale) {
  return VectorObservable{1, [scale](const SpinConfig& c, double* out) {
                            out[0] = scale * c.magnetization();
                          }};
}

VectorObservable constant_observable(double value) {
  return VectorObservable{1, [value](const SpinConfig&, double* out) { out[0] = value; }};
}

VectorObservable two_group_observable(const TwoGroupPartition& part, double scale1,
                                      double scale2) {
  return VectorObservable{2, [part, scale1, scale2](const SpinConfig& c, double* out) {
                            auto [s1, s2] = group_sums(c, part);
                            out[0] = scale1 * s1;
                            out[1] = scale2 * s2;
                          }};
}

void for_each_config_bg(const GraphSample& graph,
                        const std::function<void(const SpinConfig&, int, long long)>& cb,
                        int cap) {
  int n = graph.size();
  if (n > cap || n > 30) throw std::invalid_argument("for_each_config_bg: enumeration cap exceeded");
  // Per-site neighbor masks with the diagonal cleared; the self-loop term
  // x_i^2 = 1 never changes under flips.
  std::vector<std::uint64_t> row_nd(static_cast<std::size_t>(n)),
      col_nd(static_cast<std::size_t>(n));
  std::vector<int> row_sz(static_cast<std::size_t>(n)), col_sz(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::uint64_t r = graph.row_mask(i) & ~(1ULL << i);
    std::uint64_t c = graph.col_mask(i) & ~(1ULL << i);
    row_nd[static_cast<std::size_t>(i)] = r;
    col_nd[static_cast<std::size_t>(i)] = c;
    row_sz[static_cast<std::size_t>(i)] = std::popcount(r);
    col_sz[static_cast<std::size_t>(i)] = std::popcount(c);
  }
  SpinConfig config(n);  // all -1 <=> mask 0
  std::uint64_t mask = 0;
  int s = -n;
  long long e = graph.edge_count();  // all pairs agree at the start
  cb(config, s, e);
  std::uint64_t total = 1ULL << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    int b = std::countr_zero(k);  // Gray code flips bit ctz(k) at step k
    mask ^= 1ULL << b;
    config.flip(b);
    int xb = (mask >> b) & 1ULL ? +1 : -1;
    // Energy shift from flipping site b:  delta E = 2 x_b sum_{j != b}
    // (eps_bj + eps_jb) x_j  evaluated at the new state.
    long long nb = 2 * std::popcount(row_nd[static_cast<std::size_t>(b)] & mask) -
                   row_sz[static_cast<std::size_t>(b)] +
                   2 * std::popcount(col_nd[static_cast<std::size_t>(b)] & mask) -
                   col_sz[static_cast<std::size_t>(b)];
    e += 2 * xb * nb;
    s += 2 * xb;
    cb(config, s, e);
  }
}

namespace {

WeightedLaw enumerate_pushforward_impl(const ModelParams& params,
                                       const GraphSample* graph,
                                       const VectorObservable& obs, int cap) {
  if (params.n > cap)
    throw std::invalid_argument("enumerate_pushforward: enumeration cap exceeded");
  if (obs.dim < 1) throw std::invalid_argument("enumerate_pushforward: bad observable dim");
  // Aggregate into a map first: pushforward supports are usually tiny, and the
  // map keeps per-config work at O(log support).
  std::map<std::vector<double>, double> agg;
  std::vector<double> value(static_cast<std::size_t>(obs.dim));
  auto feed = [&](const SpinConfig& config, double log_w) {
    obs.eval(config, value.data());
    auto [it, fresh] = agg.try_emplace(value, log_w);
    if (!fresh) it->second = log_add(it->second, log_w);
  };
  if (graph != nullptr) {
    double a = params.edge_coupling();
    for_each_config_bg(*graph, [&](const SpinConfig& c, int, long long e) {
      feed(c, a * static_cast<double>(e));
    }, cap);
  } else {
    // CW needs no graph: drive the same sweep with the complete self-looped
    // graph, whose energy is exactly s^2.
    GraphSample complete = GraphSample::complete_with_self_loops(params.n);
    double coef = params.beta / (2.0 * params.n);
    for_each_config_bg(complete, [&](const SpinConfig& c, int s, long long) {
      feed(c, coef * static_cast<double>(s) * s);
    }, cap);
  }
  WeightedLaw law(obs.dim);
  for (const auto& [outcome, log_w] : agg) law.add(outcome, log_w);
  law.normalize();
  return law;
}

}  // namespace

WeightedLaw enumerate_pushforward_cw(const ModelParams& params,
                                     const VectorObservable& obs, int cap) {
  return enumerate_pushforward_impl(params, nullptr, obs, cap);
}

WeightedLaw enumerate_pushforward_bg(const ModelParams& params, const GraphSample& graph,
                                     const VectorObservable& obs, int cap) {
  if (graph.size() != params.n)
    throw std::invalid_argument("enumerate_pushforward_bg: graph size mismatch");
  return enumerate_pushforward_impl(params, &graph, obs, cap);
}

std::uint32_t BgSectorHistogram::count(long long e, int s) const {
  if (e < -edge_count || e > edge_count || (e + edge_count) % 2 != 0) return 0;
  if (s < -n || s > n || (s + n) % 2 != 0) return 0;
  return counts[static_cast<std::size_t>((e + edge_count) / 2) *
                    static_cast<std::size_t>(n + 1) +
                static_cast<std::size_t>((s + n) / 2)];
}

double BgSectorHistogram::log_weighted_sum(
    double a, const std::vector<double>& log_f_by_sector) const {
  if (log_f_by_sector.size() != static_cast<std::size_t>(n + 1))
    throw std::invalid_argument("log_weighted_sum: need one log f per sector");
  // Global shift a*edge_count bounds every exponent at or below zero when
  // a >= 0; accumulate linearly under it with compensation.
  double shift = std::fabs(a) * static_cast<double>(edge_count);
  KahanSum acc;
  std::size_t rows = static_cast<std::size_t>(edge_count) + 1;
  for (std::size_t ei = 0; ei < rows; ++ei) {
    long long e = 2 * static_cast<long long>(ei) - edge_count;
    double ew = a * static_cast<double>(e) - shift;
    for (int k = 0; k <= n; ++k) {
      std::uint32_t c = counts[ei * static_cast<std::size_t>(n + 1) +
                               static_cast<std::size_t>(k)];
      if (c == 0) continue;
      double lf = log_f_by_sector[static_cast<std::size_t>(k)];
      if (lf == neg_inf) continue;
      acc.add(static_cast<double>(c) * std::exp(ew + lf));
    }
  }
  if (acc.value() <= 0.0) return neg_inf;
  return shift + std::log(acc.value());
}

BgSectorHistogram bg_sector_histogram(const GraphSample& graph, int cap) {
  int n = graph.size();
  if (n > cap || n > 30)
    throw std::invalid_argument("bg_sector_histogram: enumeration cap exceeded");
  BgSectorHistogram h;
  h.n = n;
  h.edge_count = graph.edge_count();
  h.counts.assign((static_cast<std::size_t>(h.edge_count) + 1) *
                      static_cast<std::size_t>(n + 1),
                  0);
  // Local re-implementation of the Gray sweep without the SpinConfig mirror:
  // this loop runs 2^N times in replica experiments and the mirror costs ~2x.
  std::vector<std::uint64_t> row_nd(static_cast<std::size_t>(n)),
      col_nd(static_cast<std::size_t>(n));
  std::vector<int> row_sz(static_cast<std::size_t>(n)), col_sz(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::uint64_t r = graph.row_mask(i) & ~(1ULL << i);
    std::uint64_t c = graph.col_mask(i) & ~(1ULL << i);
    row_nd[static_cast<std::size_t>(i)] = r;
    col_nd[static_cast<std::size_t>(i)] = c;
    row_sz[static_cast<std::size_t>(i)] = std::popcount(r);
    col_sz[static_cast<std::size_t>(i)] = std::popcount(c);
  }
  std::uint64_t mask = 0;
  long long e = h.edge_count;
  int ups = 0;
  auto bump = [&] {
    h.counts[static_cast<std::size_t>((e + h.edge_count) / 2) *
                 static_cast<std::size_t>(n + 1) +
             static_cast<std::size_t>(ups)]++;
  };
  bump();
  std::uint64_t total = 1ULL << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    int b = std::countr_zero(k);
    std::uint64_t bit = 1ULL << b;
    mask ^= bit;
    int xb = (mask & bit) ? +1 : -1;
    long long nb = 2 * std::popcount(row_nd[static_cast<std::size_t>(b)] & mask) -
                   row_sz[static_cast<std::size_t>(b)] +
                   2 * std::popcount(col_nd[static_cast<std::size_t>(b)] & mask) -
                   col_sz[static_cast<std::size_t>(b)];
    e += 2 * xb * nb;
    ups += xb;
    bump();
  }
  return h;
}

WeightedLaw bg_exact_magnetization_law(const ModelParams& params,
                                       const GraphSample& graph, int cap) {
  if (graph.size() != params.n)
    throw std::invalid_argument("bg_exact_magnetization_law: graph size mismatch");
  BgSectorHistogram h = bg_sector_histogram(graph, cap);
  double a = params.edge_coupling();
  int n = params.n;
  WeightedLaw law(1);
  std::size_t rows = static_cast<std::size_t>(h.edge_count) + 1;
  for (int k = 0; k <= n; ++k) {
    LogSumAccumulator acc;
    for (std::size_t ei = 0; ei < rows; ++ei) {
      std::uint32_t c = h.counts[ei * static_cast<std::size_t>(n + 1) +
                                 static_cast<std::size_t>(k)];
      if (c == 0) continue;
      long long e = 2 * static_cast<long long>(ei) - h.edge_count;
      acc.add_log(std::log(static_cast<double>(c)) + a * static_cast<double>(e));
    }
    double lw = acc.log_value();
    if (lw != neg_inf) law.add1(2.0 * k - n, lw);
  }
  law.normalize();
  return law;
}

}  // namespace dcw
