#include "dcw/limits.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dcw/logspace.hpp"

namespace dcw {

double m_beta(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("m_beta: beta must be > 0");
  if (beta <= 1.0) return 0.0;
  // x = tanh(beta x) has exactly one root in (0, 1) when beta > 1; g(x) =
  // tanh(beta x) - x is positive near 0+ and negative at 1.
  double lo = 1e-16, hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    double g = std::tanh(beta * mid) - mid;
    if (g > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

LimitLaw LimitLaw::point_mixture(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("LimitLaw: empty mixture");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (a.weight < 0.0) throw std::invalid_argument("LimitLaw: negative weight");
    total += a.weight;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("LimitLaw: mixture weights must sum to 1");
  LimitLaw law;
  law.kind = Kind::PointMixture;
  law.mixture = std::move(atoms);
  return law;
}

LimitLaw LimitLaw::gaussian(Vec2 mean, Matrix2 cov) {
  if (std::fabs(cov[0][1] - cov[1][0]) > 1e-12)
    throw std::invalid_argument("LimitLaw: covariance must be symmetric");
  // 2x2 PSD check: nonnegative diagonal and determinant (within rounding).
  double det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
  if (cov[0][0] < 0.0 || cov[1][1] < 0.0 || det < -1e-12)
    throw std::invalid_argument("LimitLaw: covariance must be positive semi-definite");
  LimitLaw law;
  law.kind = Kind::Gaussian;
  law.mean = mean;
  law.cov = cov;
  return law;
}

LimitLaw lln_limit(double beta) {
  double m = m_beta(beta);
  if (m == 0.0)
    return LimitLaw::point_mixture({{1.0, {0.0, 0.0}}});
  return LimitLaw::point_mixture({{0.5, {-m, -m}}, {0.5, {m, m}}});
}

Matrix2 clt_covariance(double alpha1, double alpha2, double beta) {
  if (alpha1 < 0.0 || alpha2 < 0.0 || alpha1 + alpha2 > 1.0 + 1e-12)
    throw std::invalid_argument("clt_covariance: need alpha1, alpha2 >= 0, alpha1+alpha2 <= 1");
  if (!(beta >= 0.0) || beta >= 1.0)
    throw std::domain_error("clt_covariance: requires beta in [0, 1)");
  double g = beta / (1.0 - beta);
  double off = std::sqrt(alpha1 * alpha2) * g;
  return Matrix2{{{1.0 + alpha1 * g, off}, {off, 1.0 + alpha2 * g}}};
}

double gaussian_cdf_1d(double x, double mean, double variance) {
  if (!(variance > 0.0)) throw std::domain_error("gaussian_cdf_1d: variance must be > 0");
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa,
                     double b, double fb, double m, double fm, double whole,
                     double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          double abs_tol, int max_depth) {
  if (!(hi > lo)) return 0.0;
  // Composite: adapt within fixed panels so an integrand supported strictly
  // between the three initial sample points cannot be mistaken for zero.
  const int panels = 16;
  double width = (hi - lo) / panels;
  double panel_tol = abs_tol / panels;
  KahanSum total;
  for (int k = 0; k < panels; ++k) {
    double a = lo + k * width;
    double b = (k == panels - 1) ? hi : a + width;
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = simpson(a, fa, b, fb, fm);
    total.add(adaptive_step(f, a, fa, b, fb, m, fm, whole, panel_tol, max_depth));
  }
  return total.value();
}

namespace {

struct Gauss2 {
  double mu1, mu2, s1, s2, rho;
};

Gauss2 decompose(const Vec2& mean, const Matrix2& cov) {
  if (std::fabs(cov[0][1] - cov[1][0]) > 1e-12)
    throw std::invalid_argument("gaussian: covariance must be symmetric");
  double v1 = cov[0][0], v2 = cov[1][1];
  double det = v1 * v2 - cov[0][1] * cov[1][0];
  if (!(v1 > 0.0) || !(v2 > 0.0) || !(det > 0.0))
    throw std::domain_error("gaussian: degenerate covariance");
  Gauss2 g;
  g.mu1 = mean[0];
  g.mu2 = mean[1];
  g.s1 = std::sqrt(v1);
  g.s2 = std::sqrt(v2);
  g.rho = cov[0][1] / (g.s1 * g.s2);
  return g;
}

}  // namespace

double gaussian_rect_prob_2d(const Rect& rect, const Vec2& mean, const Matrix2& cov) {
  if (rect.x_hi < rect.x_lo || rect.y_hi < rect.y_lo)
    throw std::invalid_argument("gaussian_rect_prob_2d: empty rectangle");
  Gauss2 g = decompose(mean, cov);
  // Conditional law of xi2 given xi1 = y: mean mu2 + rho s2/s1 (y - mu1),
  // sd s2 sqrt(1 - rho^2); the inner integral is a difference of Phi values.
  double cond_sd = g.s2 * std::sqrt(1.0 - g.rho * g.rho);
  double lo = std::max(rect.x_lo, g.mu1 - 9.0 * g.s1);
  double hi = std::min(rect.x_hi, g.mu1 + 9.0 * g.s1);
  if (!(hi > lo)) return 0.0;
  auto integrand = [&](double y) {
    double z = (y - g.mu1) / g.s1;
    double density = std::exp(-0.5 * z * z) / (g.s1 * std::sqrt(2.0 * M_PI));
    double cmean = g.mu2 + g.rho * g.s2 * z;
    double top = rect.y_hi == std::numeric_limits<double>::infinity()
                     ? 1.0
                     : gaussian_cdf_1d(rect.y_hi, cmean, cond_sd * cond_sd);
    double bot = rect.y_lo == -std::numeric_limits<double>::infinity()
                     ? 0.0
                     : gaussian_cdf_1d(rect.y_lo, cmean, cond_sd * cond_sd);
    return density * (top - bot);
  };
  return integrate_adaptive(integrand, lo, hi, 1e-9);
}

double gaussian_expectation_2d(const std::function<double(double, double)>& h,
                               const Vec2& mean, const Matrix2& cov, double abs_tol) {
  Gauss2 g = decompose(mean, cov);
  double cond_sd = g.s2 * std::sqrt(1.0 - g.rho * g.rho);
  auto outer = [&](double y1) {
    double z = (y1 - g.mu1) / g.s1;
    double density = std::exp(-0.5 * z * z) / (g.s1 * std::sqrt(2.0 * M_PI));
    if (density == 0.0) return 0.0;
    double cmean = g.mu2 + g.rho * g.s2 * z;
    double inner = integrate_adaptive(
        [&](double y2) {
          double w = (y2 - cmean) / cond_sd;
          return h(y1, y2) * std::exp(-0.5 * w * w) / (cond_sd * std::sqrt(2.0 * M_PI));
        },
        cmean - 9.0 * cond_sd, cmean + 9.0 * cond_sd, abs_tol * 0.1);
    return density * inner;
  };
  return integrate_adaptive(outer, g.mu1 - 9.0 * g.s1, g.mu1 + 9.0 * g.s1, abs_tol);
}

}  // namespace dcw
