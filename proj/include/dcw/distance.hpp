#pragma once

// Distances between laws: exact 1D Levy metric, Kolmogorov-Smirnov, the
// versioned bounded-Lipschitz surrogate for 2D weak convergence, and pooled
// covariance estimation with replicate error bars.

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dcw/law.hpp"
#include "dcw/limits.hpp"

namespace dcw {

// A 1D CDF: either a right-continuous step function given by sorted
// (x, F(x)) breakpoints with final value 1, or an analytic Gaussian.
class Cdf1D {
 public:
  enum class Kind { Step, Gaussian };

  static Cdf1D step(std::vector<std::pair<double, double>> breakpoints);
  static Cdf1D gaussian(double mean, double variance);
  static Cdf1D from_law(const WeightedLaw& law);          // dim-1, normalized
  static Cdf1D from_samples(std::span<const double> xs);  // ties merged
  static Cdf1D point_mass(double x);

  Kind kind() const { return kind_; }
  double value(double x) const;       // F(x)
  double left_value(double x) const;  // F(x-)
  const std::vector<std::pair<double, double>>& breakpoints() const;
  double mean_param() const { return mean_; }
  double variance_param() const { return variance_; }

 private:
  Cdf1D() = default;
  Kind kind_ = Kind::Step;
  std::vector<std::pair<double, double>> pts_;
  double mean_ = 0.0, variance_ = 1.0;
};

// Exact d_L = inf{eps : F(x-eps)-eps <= G(x) <= F(x+eps)+eps for all x},
// by bisection over eps with breakpoint/stationary-point scanning.
// Absolute error <= 1e-9.
double levy_distance_1d(const Cdf1D& f, const Cdf1D& g);

// sup_x |F(x) - G(x)| over breakpoints (and stationary points when both
// sides are analytic).  Dominates d_L.
double ks_distance(const Cdf1D& f, const Cdf1D& g);

// One member of the bounded-Lipschitz test family.
struct TestFunction2D {
  std::string id;
  double bound;  // sup |h|
  std::function<double(double, double)> eval;
};

// Version 1 of the family (fixed for reproducibility): 25 cosine/sine
// products on the frequency grid {0.5, 1.0, 1.5, 2.0, 2.5}^2 (cos*cos when
// the index sum is even, sin*sin otherwise) plus 9 smoothed rectangle
// indicators centered on {-2, 0, 2}^2 with side 2 and linear ramp width 0.5.
const std::vector<TestFunction2D>& bl_family_v1();
inline constexpr int bl_family_version = 1;

// E_reference[h]: exact for point mixtures; closed form (characteristic
// function) for the trig members under a Gaussian; adaptive quadrature
// otherwise.
double reference_expectation_2d(const TestFunction2D& h, const LimitLaw& reference);

// max over the family of |mean_sample h - E_reference h|.
double bl_distance_2d(std::span<const std::array<double, 2>> samples,
                      const LimitLaw& reference);
double bl_distance_2d(const WeightedLaw& law, const LimitLaw& reference);

struct CovarianceEstimate {
  Matrix2 cov;
  Matrix2 se;   // between-replicate standard errors (zero when !has_se)
  bool has_se;
  int replicates;
};

// Pooled covariance over all samples (grand-mean centered), with per-entry
// standard errors from the dispersion of per-replicate covariances.
CovarianceEstimate empirical_covariance(std::span<const std::array<double, 2>> samples,
                                        std::span<const int> replicate_ids);

}  // namespace dcw
