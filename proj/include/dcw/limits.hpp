#pragma once

// Analytic limit objects: the tanh fixed point, LLN mixture, CLT covariance,
// and Gaussian reference probabilities.

#include <array>
#include <functional>
#include <vector>

namespace dcw {

using Matrix2 = std::array<std::array<double, 2>, 2>;
using Vec2 = std::array<double, 2>;

// The non-negative solution of x = tanh(beta x): 0 for beta <= 1, otherwise
// the positive root by bracketed bisection (residual <= 1e-12).
double m_beta(double beta);

struct LimitLaw {
  enum class Kind { PointMixture, Gaussian };
  struct Atom {
    double weight;
    Vec2 point;
  };

  Kind kind;
  std::vector<Atom> mixture;  // PointMixture
  Vec2 mean{};                // Gaussian
  Matrix2 cov{};              // Gaussian

  static LimitLaw point_mixture(std::vector<Atom> atoms);
  static LimitLaw gaussian(Vec2 mean, Matrix2 cov);
};

// (1/2)(delta_{(-m,-m)} + delta_{(m,m)}), collapsing to delta_{(0,0)} at m=0.
LimitLaw lln_limit(double beta);

// C = [[1 + a1 b/(1-b), sqrt(a1 a2) b/(1-b)], [., 1 + a2 b/(1-b)]].
// Requires a1, a2 >= 0, a1 + a2 <= 1, beta < 1.
Matrix2 clt_covariance(double alpha1, double alpha2, double beta);

// Phi((x - mean)/sqrt(variance)) via erfc; absolute error ~1e-15.
double gaussian_cdf_1d(double x, double mean, double variance);

// Axis-aligned rectangle, +-infinity endpoints allowed.
struct Rect {
  double x_lo, x_hi, y_lo, y_hi;
};

// P(xi in rect) for xi ~ N(mean, cov) by conditional reduction: the inner
// coordinate integrates in closed form, the outer by adaptive quadrature.
// Absolute error <= 1e-7 (inner exact, outer tolerance 1e-9).
double gaussian_rect_prob_2d(const Rect& rect, const Vec2& mean, const Matrix2& cov);

// E[h(xi)] for xi ~ N(mean, cov) by adaptive tensor quadrature over
// mean +- 9 sigma; abs_tol is the outer-integral tolerance.
double gaussian_expectation_2d(const std::function<double(double, double)>& h,
                               const Vec2& mean, const Matrix2& cov,
                               double abs_tol = 1e-9);

// One-dimensional adaptive Simpson quadrature on [lo, hi].  The range is cut
// into 16 fixed panels before adapting, so features narrower than the initial
// probe spacing but wider than a panel are still resolved.
double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          double abs_tol, int max_depth = 48);

}  // namespace dcw
