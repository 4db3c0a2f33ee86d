#pragma once

// Finite weighted laws on R^d stored in log-weight form.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace dcw {

// A finite collection of distinct outcomes with log-domain weights.  Outcomes
// are kept sorted lexicographically in a flat buffer (dim doubles per entry);
// duplicates handed to add() are merged by log-addition, so the stored support
// is always duplicate-free.
class WeightedLaw {
 public:
  explicit WeightedLaw(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return log_weights_.size(); }
  bool normalized() const { return normalized_; }

  void add(std::span<const double> outcome, double log_weight);
  void add1(double outcome, double log_weight);
  void add2(double a, double b, double log_weight);

  // Divides by the log-sum-exp of all weights.  No-op when already normalized.
  void normalize();

  // Log of the total weight currently stored (log Z before normalize()).
  double total_log_weight() const;

  std::span<const double> outcome(std::size_t i) const;
  double log_weight(std::size_t i) const;
  double probability(std::size_t i) const;  // requires normalized()

  // Mean of coordinate k and mixed second moment E[y_j y_k]; require normalized().
  double mean(int k) const;
  double second_moment(int j, int k) const;

  // 1-d only: sorted (x, P(X <= x)) pairs, one per support point.
  std::vector<std::pair<double, double>> cdf_points() const;

  // 1-d only: total probability of outcomes satisfying the predicate.
  template <typename Pred>
  double mass_where(Pred&& pred) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
      if (pred(outcome(i)[0])) acc += probability(i);
    return acc;
  }

  // Marginal law of a subset of coordinates (merges collapsed outcomes).
  WeightedLaw marginal(const std::vector<int>& coords) const;

  // Pushforward under y_k -> factors[k] * y_k, factors[k] > 0 (order-preserving,
  // so the support copies over directly).
  WeightedLaw scaled(const std::vector<double>& factors) const;

  // header outcome_1,...,outcome_d,probability; 17 significant digits.
  void write_csv(std::ostream& os) const;

 private:
  std::size_t find_or_insert(std::span<const double> outcome);

  int dim_;
  bool normalized_ = false;
  std::vector<double> outcomes_;  // flat, dim_ doubles per entry, sorted
  std::vector<double> log_weights_;
};

}  // namespace dcw
