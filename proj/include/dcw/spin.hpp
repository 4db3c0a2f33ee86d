#pragma once

// Bit-packed spin configurations on {-1,+1}^N and two-group index partitions.
// Bit value 1 encodes spin +1, bit 0 encodes spin -1.

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcw {

class SpinConfig {
 public:
  // All spins start at -1.
  explicit SpinConfig(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("SpinConfig: n must be >= 1");
    words_.assign(word_count(), 0);
  }

  static SpinConfig all_down(int n) { return SpinConfig(n); }

  static SpinConfig all_up(int n) {
    SpinConfig c(n);
    for (int w = 0; w < c.word_count(); ++w) c.words_[w] = ~0ULL;
    c.mask_tail();
    return c;
  }

  // n <= 64 convenience: bit i of `mask` is the sign bit of spin i.
  static SpinConfig from_mask(int n, std::uint64_t mask) {
    if (n > 64) throw std::invalid_argument("SpinConfig::from_mask: n > 64");
    SpinConfig c(n);
    c.words_[0] = n == 64 ? mask : (mask & ((1ULL << n) - 1));
    return c;
  }

  static SpinConfig from_signs(const std::vector<int>& signs) {
    SpinConfig c(static_cast<int>(signs.size()));
    for (int i = 0; i < c.n_; ++i) c.set_spin(i, signs[static_cast<std::size_t>(i)]);
    return c;
  }

  int size() const { return n_; }
  int word_count() const { return (n_ + 63) / 64; }
  std::uint64_t word(int w) const { return words_[static_cast<std::size_t>(w)]; }
  const std::vector<std::uint64_t>& words() const { return words_; }

  int spin(int i) const {
    check_index(i);
    return (words_[static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1ULL ? +1 : -1;
  }

  void set_spin(int i, int value) {
    check_index(i);
    if (value != 1 && value != -1)
      throw std::invalid_argument("SpinConfig::set_spin: value must be +1 or -1");
    std::uint64_t bit = 1ULL << (i % 64);
    if (value == 1)
      words_[static_cast<std::size_t>(i) / 64] |= bit;
    else
      words_[static_cast<std::size_t>(i) / 64] &= ~bit;
  }

  void flip(int i) {
    check_index(i);
    words_[static_cast<std::size_t>(i) / 64] ^= 1ULL << (i % 64);
  }

  int popcount() const {
    int c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
  }

  // s(x) = sum_i x_i = 2 * #(+1) - N
  int magnetization() const { return 2 * popcount() - n_; }

  bool operator==(const SpinConfig& o) const { return n_ == o.n_ && words_ == o.words_; }

 private:
  void check_index(int i) const {
    if (i < 0 || i >= n_) throw std::out_of_range("SpinConfig: index out of range");
  }
  void mask_tail() {
    int rem = n_ % 64;
    if (rem != 0) words_.back() &= (1ULL << rem) - 1;
  }

  int n_;
  std::vector<std::uint64_t> words_;
};

inline int magnetization(const SpinConfig& c) { return c.magnetization(); }

// sum_i x_i y_i = N - 2 * #(disagreements)
inline int overlap(const SpinConfig& x, const SpinConfig& y) {
  if (x.size() != y.size()) throw std::invalid_argument("overlap: size mismatch");
  int diff = 0;
  for (int w = 0; w < x.word_count(); ++w)
    diff += std::popcount(x.word(w) ^ y.word(w));
  return x.size() - 2 * diff;
}

// Two disjoint nonempty groups of sites with n1 + n2 <= n, kept both as index
// lists and as word masks so group sums reduce to masked popcounts.
class TwoGroupPartition {
 public:
  TwoGroupPartition(int n, std::vector<int> group1, std::vector<int> group2)
      : n_(n), group1_(std::move(group1)), group2_(std::move(group2)) {
    if (n < 2) throw std::invalid_argument("TwoGroupPartition: n must be >= 2");
    if (group1_.empty() || group2_.empty())
      throw std::invalid_argument("TwoGroupPartition: groups must be nonempty");
    if (group1_.size() + group2_.size() > static_cast<std::size_t>(n))
      throw std::invalid_argument("TwoGroupPartition: group sizes exceed n");
    int words = (n + 63) / 64;
    mask1_.assign(static_cast<std::size_t>(words), 0);
    mask2_.assign(static_cast<std::size_t>(words), 0);
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    auto fill = [&](const std::vector<int>& idx, std::vector<std::uint64_t>& mask) {
      for (int i : idx) {
        if (i < 0 || i >= n) throw std::invalid_argument("TwoGroupPartition: index out of range");
        if (seen[static_cast<std::size_t>(i)])
          throw std::invalid_argument("TwoGroupPartition: groups must be disjoint");
        seen[static_cast<std::size_t>(i)] = true;
        mask[static_cast<std::size_t>(i) / 64] |= 1ULL << (i % 64);
      }
    };
    fill(group1_, mask1_);
    fill(group2_, mask2_);
  }

  // First n1 sites vs the next n2 (default: the rest).
  static TwoGroupPartition contiguous(int n, int n1, int n2 = -1) {
    if (n2 < 0) n2 = n - n1;
    if (n1 < 1 || n2 < 1 || n1 + n2 > n)
      throw std::invalid_argument("TwoGroupPartition::contiguous: bad group sizes");
    std::vector<int> g1, g2;
    for (int i = 0; i < n1; ++i) g1.push_back(i);
    for (int i = n1; i < n1 + n2; ++i) g2.push_back(i);
    return TwoGroupPartition(n, std::move(g1), std::move(g2));
  }

  bool covering() const { return group1_.size() + group2_.size() == static_cast<std::size_t>(n_); }

  int size() const { return n_; }
  int n1() const { return static_cast<int>(group1_.size()); }
  int n2() const { return static_cast<int>(group2_.size()); }
  const std::vector<int>& group1() const { return group1_; }
  const std::vector<int>& group2() const { return group2_; }
  const std::vector<std::uint64_t>& mask1() const { return mask1_; }
  const std::vector<std::uint64_t>& mask2() const { return mask2_; }

 private:
  int n_;
  std::vector<int> group1_, group2_;
  std::vector<std::uint64_t> mask1_, mask2_;
};

// (s1, s2) = (sum over group1 of x_i, sum over group2 of x_i)
inline std::pair<int, int> group_sums(const SpinConfig& c, const TwoGroupPartition& part) {
  if (c.size() != part.size()) throw std::invalid_argument("group_sums: size mismatch");
  int up1 = 0, up2 = 0;
  for (int w = 0; w < c.word_count(); ++w) {
    up1 += std::popcount(c.word(w) & part.mask1()[static_cast<std::size_t>(w)]);
    up2 += std::popcount(c.word(w) & part.mask2()[static_cast<std::size_t>(w)]);
  }
  return {2 * up1 - part.n1(), 2 * up2 - part.n2()};
}

}  // namespace dcw
