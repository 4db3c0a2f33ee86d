#pragma once

// Directed Erdos-Renyi sampling, the deterministic RNG, and seed derivation.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dcw/params.hpp"

namespace dcw {

// SplitMix64 (Steele-Lea-Flood).  Stream increment 0x9E3779B97F4A7C15;
// finalizer multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB with
// shifts 30/27/31.  Small, fast, and fully reproducible across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) via the multiply-shift reduction.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  bool next_bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

// Stateless mix of the SplitMix64 finalizer, used for seed derivation.
std::uint64_t splitmix64_mix(std::uint64_t x);

// Deterministic per-replica seed: distinct replica indices under one master
// seed never collide (the map is a bijection of the 64-bit state space).
std::uint64_t derive_replica_seed(std::uint64_t master_seed, std::uint64_t replica_index);

// A replica schedule: replica r uses stream(r, k) for its k-th independent
// randomness consumer (graph draw, chain, ...).
struct ReplicaPlan {
  std::uint64_t master_seed;
  int replicas;

  std::uint64_t stream(int replica, int consumer = 0) const {
    return derive_replica_seed(master_seed,
                               static_cast<std::uint64_t>(replica) * 8ULL +
                                   static_cast<std::uint64_t>(consumer));
  }
};

// Directed graph on {0..n-1} with independent Bernoulli(p) indicators for
// every ordered pair (i, j), the diagonal included.  Rows give out-edges;
// the transpose is precomputed for in-edge scans.
class GraphSample {
 public:
  explicit GraphSample(int n);

  static GraphSample complete_with_self_loops(int n);
  static GraphSample from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int size() const { return n_; }
  int words_per_row() const { return words_; }
  long long edge_count() const { return edge_count_; }

  bool has_edge(int i, int j) const;
  void add_edge(int i, int j);

  const std::uint64_t* row(int i) const { return rows_.data() + static_cast<std::size_t>(i) * words_; }
  const std::uint64_t* col(int j) const { return cols_.data() + static_cast<std::size_t>(j) * words_; }

  // n <= 64 convenience views.
  std::uint64_t row_mask(int i) const;
  std::uint64_t col_mask(int j) const;

  int out_degree(int i) const;
  int in_degree(int j) const;

  // Debug text form: "n edge_count" then one "i j" line per edge in row order.
  void write_text(std::ostream& os) const;
  static GraphSample read_text(std::istream& is);

  bool operator==(const GraphSample& o) const {
    return n_ == o.n_ && rows_ == o.rows_;
  }

 private:
  void rebuild_derived();

  int n_;
  int words_;
  long long edge_count_ = 0;
  std::vector<std::uint64_t> rows_;
  std::vector<std::uint64_t> cols_;
};

// One Bernoulli(p) draw per ordered pair, diagonal included, in row-major
// order.  Bitwise reproducible given (params, seed).
GraphSample sample_graph(const ModelParams& params, std::uint64_t seed);

}  // namespace dcw
