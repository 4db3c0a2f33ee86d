#include "dcw/mcmc.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dcw {

ChainConfig default_chain_config(int n, std::uint64_t seed, long long recorded,
                                 int thinning) {
  ChainConfig cfg;
  cfg.burn_in_sweeps = 10LL * n;
  cfg.thinning = thinning;
  cfg.sweeps = cfg.burn_in_sweeps + recorded * thinning;
  cfg.seed = seed;
  cfg.init = ChainConfig::Init::UniformRandom;
  return cfg;
}

double local_field(const ModelParams& params, const GraphSample& graph,
                   const SpinConfig& config, int i) {
  if (graph.size() != params.n || config.size() != params.n)
    throw std::invalid_argument("local_field: dimension mismatch");
  if (i < 0 || i >= params.n) throw std::out_of_range("local_field: site out of range");
  long long sum = 0;
  for (int j = 0; j < params.n; ++j) {
    if (j == i) continue;
    int w = (graph.has_edge(i, j) ? 1 : 0) + (graph.has_edge(j, i) ? 1 : 0);
    if (w != 0) sum += static_cast<long long>(w) * config.spin(j);
  }
  return params.edge_coupling() * static_cast<double>(sum);
}

GlauberChain::GlauberChain(const ModelParams& params, const GraphSample& graph,
                           std::uint64_t seed, ChainConfig::Init init)
    : n_(params.n),
      a_(params.edge_coupling()),
      words_(graph.words_per_row()),
      rng_(seed) {
  if (graph.size() != params.n)
    throw std::invalid_argument("GlauberChain: graph size mismatch");
  row_nd_.assign(static_cast<std::size_t>(n_) * words_, 0);
  col_nd_.assign(static_cast<std::size_t>(n_) * words_, 0);
  pair_degree_.assign(static_cast<std::size_t>(n_), 0);
  for (int i = 0; i < n_; ++i) {
    int deg = 0;
    for (int w = 0; w < words_; ++w) {
      std::uint64_t r = graph.row(i)[w];
      std::uint64_t c = graph.col(i)[w];
      if (w == i / 64) {
        std::uint64_t diag = 1ULL << (i % 64);
        r &= ~diag;
        c &= ~diag;
      }
      row_nd_[static_cast<std::size_t>(i) * words_ + w] = r;
      col_nd_[static_cast<std::size_t>(i) * words_ + w] = c;
      deg += std::popcount(r) + std::popcount(c);
    }
    pair_degree_[static_cast<std::size_t>(i)] = deg;
  }
  state_.assign(static_cast<std::size_t>(words_), 0);
  switch (init) {
    case ChainConfig::Init::AllDown:
      break;
    case ChainConfig::Init::AllUp:
      for (auto& w : state_) w = ~0ULL;
      break;
    case ChainConfig::Init::UniformRandom:
      for (auto& w : state_) w = rng_.next();
      break;
  }
  int rem = n_ % 64;
  if (rem != 0) state_.back() &= (1ULL << rem) - 1;
  int ups = 0;
  for (std::uint64_t w : state_) ups += std::popcount(w);
  s_ = 2 * ups - n_;
}

void GlauberChain::sweep() {
  for (int step = 0; step < n_; ++step) {
    int i = static_cast<int>(rng_.next_below(static_cast<std::uint64_t>(n_)));
    // weighted neighbor sum: rows count eps_ij, columns count eps_ji
    const std::uint64_t* r = row_nd_.data() + static_cast<std::size_t>(i) * words_;
    const std::uint64_t* c = col_nd_.data() + static_cast<std::size_t>(i) * words_;
    int ups = 0;
    for (int w = 0; w < words_; ++w) {
      std::uint64_t st = state_[static_cast<std::size_t>(w)];
      ups += std::popcount(r[w] & st) + std::popcount(c[w] & st);
    }
    long long nb = 2LL * ups - pair_degree_[static_cast<std::size_t>(i)];
    double h = a_ * static_cast<double>(nb);
    double p_up = 1.0 / (1.0 + std::exp(-2.0 * h));
    int next = rng_.next_double() < p_up ? +1 : -1;
    std::uint64_t bit = 1ULL << (i % 64);
    std::uint64_t& word = state_[static_cast<std::size_t>(i) / 64];
    int cur = (word & bit) ? +1 : -1;
    if (next != cur) {
      word ^= bit;
      s_ += 2 * next;
      ++flips_;
    }
    ++updates_;
  }
}

SpinConfig GlauberChain::state() const {
  SpinConfig c(n_);
  for (int i = 0; i < n_; ++i)
    if ((state_[static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1ULL) c.set_spin(i, +1);
  return c;
}

std::pair<int, int> GlauberChain::group_sums_now(const TwoGroupPartition& part) const {
  if (part.size() != n_) throw std::invalid_argument("group_sums_now: size mismatch");
  int up1 = 0, up2 = 0;
  for (int w = 0; w < words_; ++w) {
    up1 += std::popcount(state_[static_cast<std::size_t>(w)] &
                         part.mask1()[static_cast<std::size_t>(w)]);
    up2 += std::popcount(state_[static_cast<std::size_t>(w)] &
                         part.mask2()[static_cast<std::size_t>(w)]);
  }
  return {2 * up1 - part.n1(), 2 * up2 - part.n2()};
}

namespace {

void validate_chain(const ChainConfig& chain) {
  if (chain.sweeps < 0 || chain.burn_in_sweeps < 0 || chain.burn_in_sweeps > chain.sweeps)
    throw std::invalid_argument("ChainConfig: need 0 <= burn_in <= sweeps");
  if (chain.thinning < 1) throw std::invalid_argument("ChainConfig: thinning must be >= 1");
}

template <typename Record>
void drive_chain(const ModelParams& params, const GraphSample& graph,
                 const ChainConfig& chain, Record&& record) {
  validate_chain(chain);
  GlauberChain g(params, graph, chain.seed, chain.init);
  for (long long t = 0; t < chain.sweeps; ++t) {
    g.sweep();
    long long post = t + 1 - chain.burn_in_sweeps;
    if (post > 0 && post % chain.thinning == 0) record(g);
  }
}

}  // namespace

std::vector<std::array<double, 2>> run_chain(const ModelParams& params,
                                             const GraphSample& graph,
                                             const TwoGroupPartition& part,
                                             const ChainConfig& chain) {
  if (part.size() != params.n) throw std::invalid_argument("run_chain: partition mismatch");
  double inv1 = 1.0 / std::sqrt(static_cast<double>(part.n1()));
  double inv2 = 1.0 / std::sqrt(static_cast<double>(part.n2()));
  std::vector<std::array<double, 2>> samples;
  samples.reserve(static_cast<std::size_t>(
      (chain.sweeps - chain.burn_in_sweeps) / chain.thinning));
  drive_chain(params, graph, chain, [&](const GlauberChain& g) {
    auto [s1, s2] = g.group_sums_now(part);
    samples.push_back({s1 * inv1, s2 * inv2});
  });
  return samples;
}

std::vector<double> run_chain_magnetization(const ModelParams& params,
                                            const GraphSample& graph,
                                            const ChainConfig& chain, double scale) {
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(
      (chain.sweeps - chain.burn_in_sweeps) / chain.thinning));
  drive_chain(params, graph, chain,
              [&](const GlauberChain& g) { samples.push_back(scale * g.magnetization()); });
  return samples;
}

std::vector<double> build_random_scan_kernel(const ModelParams& params,
                                             const GraphSample& graph) {
  int n = params.n;
  if (graph.size() != n) throw std::invalid_argument("kernel: graph size mismatch");
  if (n > 10) throw std::invalid_argument("kernel: explicit matrix needs n <= 10");
  std::size_t states = 1ULL << n;
  std::vector<double> kernel(states * states, 0.0);
  for (std::size_t x = 0; x < states; ++x) {
    SpinConfig config = SpinConfig::from_mask(n, x);
    for (int i = 0; i < n; ++i) {
      double h = local_field(params, graph, config, i);
      double p_up = 1.0 / (1.0 + std::exp(-2.0 * h));
      std::size_t up = x | (1ULL << i);
      std::size_t down = x & ~(1ULL << i);
      kernel[x * states + up] += p_up / n;
      kernel[x * states + down] += (1.0 - p_up) / n;
    }
  }
  return kernel;
}

double batch_means_ess(std::span<const double> samples) {
  std::size_t n = samples.size();
  if (n < 100) throw std::invalid_argument("batch_means_ess: need at least 100 samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n - 1);
  if (var <= 0.0) return 1.0;  // constant chain carries one sample of information
  std::size_t batches = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  std::size_t len = n / batches;
  double bvar = 0.0, bmean_sum = 0.0;
  std::vector<double> bmeans(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double acc = 0.0;
    for (std::size_t k = b * len; k < (b + 1) * len; ++k) acc += samples[k];
    bmeans[b] = acc / static_cast<double>(len);
    bmean_sum += bmeans[b];
  }
  double bmean = bmean_sum / static_cast<double>(batches);
  for (std::size_t b = 0; b < batches; ++b)
    bvar += (bmeans[b] - bmean) * (bmeans[b] - bmean);
  bvar /= static_cast<double>(batches - 1);
  // tau_hat = len * Var(batch means) / Var(samples); ESS = n / tau_hat.
  double tau = static_cast<double>(len) * bvar / var;
  if (tau < 1.0) tau = 1.0;
  double ess = static_cast<double>(n) / tau;
  if (ess < 1.0) ess = 1.0;
  return ess;
}

std::array<double, 2> batch_means_ess2(std::span<const std::array<double, 2>> samples) {
  std::vector<double> coord(samples.size());
  std::array<double, 2> out{};
  for (int k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < samples.size(); ++i)
      coord[i] = samples[i][static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k)] = batch_means_ess(coord);
  }
  return out;
}

}  // namespace dcw
