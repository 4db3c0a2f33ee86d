#include "dcw/law.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "dcw/logspace.hpp"

namespace dcw {

WeightedLaw::WeightedLaw(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("WeightedLaw: dim must be >= 1");
}

namespace {
// lexicographic compare of two dim-length outcome slices
int compare_outcome(const double* a, const double* b, int dim) {
  for (int k = 0; k < dim; ++k) {
    if (a[k] < b[k]) return -1;
    if (a[k] > b[k]) return 1;
  }
  return 0;
}
}  // namespace

std::size_t WeightedLaw::find_or_insert(std::span<const double> outcome) {
  if (static_cast<int>(outcome.size()) != dim_)
    throw std::invalid_argument("WeightedLaw: outcome dimension mismatch");
  for (double v : outcome)
    if (std::isnan(v)) throw std::invalid_argument("WeightedLaw: NaN outcome");
  // binary search over flat entries
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (compare_outcome(outcomes_.data() + mid * dim_, outcome.data(), dim_) < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < size() &&
      compare_outcome(outcomes_.data() + lo * dim_, outcome.data(), dim_) == 0)
    return lo;
  outcomes_.insert(outcomes_.begin() + static_cast<std::ptrdiff_t>(lo * dim_),
                   outcome.begin(), outcome.end());
  log_weights_.insert(log_weights_.begin() + static_cast<std::ptrdiff_t>(lo), neg_inf);
  return lo;
}

void WeightedLaw::add(std::span<const double> outcome, double log_weight) {
  if (normalized_) throw std::logic_error("WeightedLaw: add after normalize");
  std::size_t pos = find_or_insert(outcome);
  log_weights_[pos] = log_add(log_weights_[pos], log_weight);
}

void WeightedLaw::add1(double outcome, double log_weight) {
  add(std::span<const double>(&outcome, 1), log_weight);
}

void WeightedLaw::add2(double a, double b, double log_weight) {
  double pt[2] = {a, b};
  add(std::span<const double>(pt, 2), log_weight);
}

double WeightedLaw::total_log_weight() const { return log_sum_exp(log_weights_); }

void WeightedLaw::normalize() {
  if (normalized_) return;
  if (log_weights_.empty())
    throw std::logic_error("WeightedLaw: cannot normalize empty law");
  double z = total_log_weight();
  if (z == neg_inf) throw std::domain_error("WeightedLaw: total weight is zero");
  for (double& lw : log_weights_) lw -= z;
  normalized_ = true;
}

std::span<const double> WeightedLaw::outcome(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("WeightedLaw: index out of range");
  return {outcomes_.data() + i * dim_, static_cast<std::size_t>(dim_)};
}

double WeightedLaw::log_weight(std::size_t i) const { return log_weights_.at(i); }

double WeightedLaw::probability(std::size_t i) const {
  if (!normalized_) throw std::logic_error("WeightedLaw: probability before normalize");
  return std::exp(log_weights_.at(i));
}

double WeightedLaw::mean(int k) const {
  if (k < 0 || k >= dim_) throw std::out_of_range("WeightedLaw::mean: bad coordinate");
  if (!normalized_) throw std::logic_error("WeightedLaw: mean before normalize");
  KahanSum acc;
  for (std::size_t i = 0; i < size(); ++i)
    acc.add(outcomes_[i * dim_ + static_cast<std::size_t>(k)] * std::exp(log_weights_[i]));
  return acc.value();
}

double WeightedLaw::second_moment(int j, int k) const {
  if (j < 0 || j >= dim_ || k < 0 || k >= dim_)
    throw std::out_of_range("WeightedLaw::second_moment: bad coordinate");
  if (!normalized_) throw std::logic_error("WeightedLaw: moment before normalize");
  KahanSum acc;
  for (std::size_t i = 0; i < size(); ++i)
    acc.add(outcomes_[i * dim_ + static_cast<std::size_t>(j)] *
            outcomes_[i * dim_ + static_cast<std::size_t>(k)] *
            std::exp(log_weights_[i]));
  return acc.value();
}

std::vector<std::pair<double, double>> WeightedLaw::cdf_points() const {
  if (dim_ != 1) throw std::logic_error("WeightedLaw::cdf_points: requires dim == 1");
  if (!normalized_) throw std::logic_error("WeightedLaw: cdf before normalize");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(size());
  KahanSum acc;
  for (std::size_t i = 0; i < size(); ++i) {
    acc.add(std::exp(log_weights_[i]));
    pts.emplace_back(outcomes_[i], std::min(acc.value(), 1.0));
  }
  if (!pts.empty()) pts.back().second = 1.0;  // clamp rounding at the top
  return pts;
}

WeightedLaw WeightedLaw::marginal(const std::vector<int>& coords) const {
  if (coords.empty()) throw std::invalid_argument("WeightedLaw::marginal: empty coords");
  for (int c : coords)
    if (c < 0 || c >= dim_) throw std::out_of_range("WeightedLaw::marginal: bad coordinate");
  WeightedLaw out(static_cast<int>(coords.size()));
  std::vector<double> proj(coords.size());
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t k = 0; k < coords.size(); ++k)
      proj[k] = outcomes_[i * dim_ + static_cast<std::size_t>(coords[k])];
    out.add(proj, log_weights_[i]);
  }
  out.normalized_ = normalized_;
  return out;
}

WeightedLaw WeightedLaw::scaled(const std::vector<double>& factors) const {
  if (factors.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("WeightedLaw::scaled: factor count != dim");
  for (double f : factors)
    if (!(f > 0.0)) throw std::invalid_argument("WeightedLaw::scaled: factors must be > 0");
  WeightedLaw out(dim_);
  out.outcomes_ = outcomes_;
  out.log_weights_ = log_weights_;
  out.normalized_ = normalized_;
  for (std::size_t i = 0; i < out.outcomes_.size(); ++i)
    out.outcomes_[i] *= factors[i % static_cast<std::size_t>(dim_)];
  return out;
}

void WeightedLaw::write_csv(std::ostream& os) const {
  if (!normalized_) throw std::logic_error("WeightedLaw: write_csv before normalize");
  for (int k = 1; k <= dim_; ++k) os << "outcome_" << k << ",";
  os << "probability\n";
  char buf[64];
  for (std::size_t i = 0; i < size(); ++i) {
    for (int k = 0; k < dim_; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", outcomes_[i * dim_ + static_cast<std::size_t>(k)]);
      os << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.17g", std::exp(log_weights_[i]));
    os << buf << "\n";
  }
}

}  // namespace dcw
