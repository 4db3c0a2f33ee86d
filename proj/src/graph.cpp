#include "dcw/graph.hpp"

#include <bit>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dcw {

std::uint64_t splitmix64_mix(std::uint64_t x) {
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_replica_seed(std::uint64_t master_seed, std::uint64_t replica_index) {
  // master + (r+1)*gamma is injective in r for fixed master; the finalizer is
  // a bijection, so derived seeds are collision-free across replicas.
  return splitmix64_mix(master_seed + (replica_index + 1) * 0x9E3779B97F4A7C15ULL);
}

GraphSample::GraphSample(int n) : n_(n), words_((n + 63) / 64) {
  if (n < 1) throw std::invalid_argument("GraphSample: n must be >= 1");
  rows_.assign(static_cast<std::size_t>(n) * words_, 0);
  cols_.assign(static_cast<std::size_t>(n) * words_, 0);
}

GraphSample GraphSample::complete_with_self_loops(int n) {
  GraphSample g(n);
  for (int i = 0; i < n; ++i)
    for (int w = 0; w < g.words_; ++w) {
      std::uint64_t full = ~0ULL;
      int rem = n - w * 64;
      if (rem < 64) full = rem <= 0 ? 0ULL : ((1ULL << rem) - 1);
      g.rows_[static_cast<std::size_t>(i) * g.words_ + w] = full;
    }
  g.rebuild_derived();
  return g;
}

GraphSample GraphSample::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  GraphSample g(n);
  for (auto [i, j] : edges) g.add_edge(i, j);
  return g;
}

bool GraphSample::has_edge(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= n_)
    throw std::out_of_range("GraphSample::has_edge: index out of range");
  return (row(i)[j / 64] >> (j % 64)) & 1ULL;
}

void GraphSample::add_edge(int i, int j) {
  if (i < 0 || i >= n_ || j < 0 || j >= n_)
    throw std::out_of_range("GraphSample::add_edge: index out of range");
  std::uint64_t bit = 1ULL << (j % 64);
  std::uint64_t& w = rows_[static_cast<std::size_t>(i) * words_ + j / 64];
  if (!(w & bit)) {
    w |= bit;
    cols_[static_cast<std::size_t>(j) * words_ + i / 64] |= 1ULL << (i % 64);
    ++edge_count_;
  }
}

std::uint64_t GraphSample::row_mask(int i) const {
  if (n_ > 64) throw std::logic_error("GraphSample::row_mask: n > 64");
  return row(i)[0];
}

std::uint64_t GraphSample::col_mask(int j) const {
  if (n_ > 64) throw std::logic_error("GraphSample::col_mask: n > 64");
  return col(j)[0];
}

int GraphSample::out_degree(int i) const {
  int c = 0;
  for (int w = 0; w < words_; ++w) c += std::popcount(row(i)[w]);
  return c;
}

int GraphSample::in_degree(int j) const {
  int c = 0;
  for (int w = 0; w < words_; ++w) c += std::popcount(col(j)[w]);
  return c;
}

void GraphSample::rebuild_derived() {
  edge_count_ = 0;
  std::fill(cols_.begin(), cols_.end(), 0ULL);
  for (int i = 0; i < n_; ++i) {
    for (int w = 0; w < words_; ++w) {
      std::uint64_t bits = row(i)[w];
      edge_count_ += std::popcount(bits);
      while (bits) {
        int j = w * 64 + std::countr_zero(bits);
        bits &= bits - 1;
        cols_[static_cast<std::size_t>(j) * words_ + i / 64] |= 1ULL << (i % 64);
      }
    }
  }
}

void GraphSample::write_text(std::ostream& os) const {
  os << n_ << " " << edge_count_ << "\n";
  for (int i = 0; i < n_; ++i)
    for (int w = 0; w < words_; ++w) {
      std::uint64_t bits = row(i)[w];
      while (bits) {
        int j = w * 64 + std::countr_zero(bits);
        bits &= bits - 1;
        os << i << " " << j << "\n";
      }
    }
}

GraphSample GraphSample::read_text(std::istream& is) {
  int n = 0;
  long long ec = 0;
  if (!(is >> n >> ec)) throw std::runtime_error("GraphSample::read_text: bad header");
  GraphSample g(n);
  for (long long e = 0; e < ec; ++e) {
    int i = 0, j = 0;
    if (!(is >> i >> j)) throw std::runtime_error("GraphSample::read_text: truncated edge list");
    g.add_edge(i, j);
  }
  if (g.edge_count_ != ec)
    throw std::runtime_error("GraphSample::read_text: duplicate edges in input");
  return g;
}

GraphSample sample_graph(const ModelParams& params, std::uint64_t seed) {
  GraphSample g(params.n);
  SplitMix64 rng(seed);
  for (int i = 0; i < params.n; ++i)
    for (int j = 0; j < params.n; ++j)
      if (rng.next_bernoulli(params.p)) g.add_edge(i, j);
  return g;
}

}  // namespace dcw
