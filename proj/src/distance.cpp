#include "dcw/distance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

#include "dcw/logspace.hpp"

namespace dcw {

Cdf1D Cdf1D::step(std::vector<std::pair<double, double>> breakpoints) {
  if (breakpoints.empty()) throw std::invalid_argument("Cdf1D: empty breakpoint list");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (std::isnan(breakpoints[i].first) || std::isnan(breakpoints[i].second))
      throw std::invalid_argument("Cdf1D: NaN breakpoint");
    if (i > 0 && !(breakpoints[i].first > breakpoints[i - 1].first))
      throw std::invalid_argument("Cdf1D: breakpoints must be strictly increasing");
    if (i > 0 && breakpoints[i].second < breakpoints[i - 1].second - 1e-15)
      throw std::invalid_argument("Cdf1D: cumulative values must be non-decreasing");
  }
  if (std::fabs(breakpoints.back().second - 1.0) > 1e-9)
    throw std::invalid_argument("Cdf1D: final cumulative value must be 1");
  breakpoints.back().second = 1.0;
  Cdf1D f;
  f.kind_ = Kind::Step;
  f.pts_ = std::move(breakpoints);
  return f;
}

Cdf1D Cdf1D::gaussian(double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("Cdf1D: variance must be > 0");
  Cdf1D f;
  f.kind_ = Kind::Gaussian;
  f.mean_ = mean;
  f.variance_ = variance;
  return f;
}

Cdf1D Cdf1D::from_law(const WeightedLaw& law) {
  if (law.dim() != 1) throw std::invalid_argument("Cdf1D::from_law: law must be 1-d");
  return step(law.cdf_points());
}

Cdf1D Cdf1D::from_samples(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("Cdf1D::from_samples: no samples");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> pts;
  double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // merge ties by keeping the last (largest) cumulative value
    if (!pts.empty() && pts.back().first == sorted[i])
      pts.back().second = static_cast<double>(i + 1) / n;
    else
      pts.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  }
  return step(std::move(pts));
}

Cdf1D Cdf1D::point_mass(double x) { return step({{x, 1.0}}); }

double Cdf1D::value(double x) const {
  if (kind_ == Kind::Gaussian) return gaussian_cdf_1d(x, mean_, variance_);
  // last breakpoint with position <= x
  auto it = std::upper_bound(pts_.begin(), pts_.end(), x,
                             [](double v, const auto& p) { return v < p.first; });
  if (it == pts_.begin()) return 0.0;
  return std::prev(it)->second;
}

double Cdf1D::left_value(double x) const {
  if (kind_ == Kind::Gaussian) return gaussian_cdf_1d(x, mean_, variance_);
  // last breakpoint with position < x
  auto it = std::lower_bound(pts_.begin(), pts_.end(), x,
                             [](const auto& p, double v) { return p.first < v; });
  if (it == pts_.begin()) return 0.0;
  return std::prev(it)->second;
}

const std::vector<std::pair<double, double>>& Cdf1D::breakpoints() const {
  if (kind_ != Kind::Step) throw std::logic_error("Cdf1D: analytic CDF has no breakpoints");
  return pts_;
}

namespace {

// Stationary points of x -> P(x) - Q(x + shift) when both are Gaussian:
// density equality reduces to a quadratic.
void gaussian_stationary_points(const Cdf1D& p, const Cdf1D& q, double shift,
                                std::vector<double>& out) {
  double v1 = p.variance_param(), v2 = q.variance_param();
  double m1 = p.mean_param(), m2 = q.mean_param();
  double a = 0.5 / v2 - 0.5 / v1;
  double b = (shift - m2) / v2 + m1 / v1;
  double c = (shift - m2) * (shift - m2) / (2.0 * v2) - m1 * m1 / (2.0 * v1) -
             0.5 * std::log(v1 / v2);
  if (std::fabs(a) < 1e-300) {
    if (std::fabs(b) > 0.0) out.push_back(-c / b);
    return;
  }
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return;
  double root = std::sqrt(disc);
  out.push_back((-b + root) / (2.0 * a));
  out.push_back((-b - root) / (2.0 * a));
}

// sup over x of P(x) - Q(x + shift); the sup is always >= 0 (tails).
double sup_diff_shift(const Cdf1D& p, const Cdf1D& q, double shift) {
  double best = 0.0;
  if (p.kind() == Cdf1D::Kind::Step) {
    // P jumps up at b: candidate x = b exactly.
    for (const auto& [b, cum] : p.breakpoints())
      best = std::max(best, cum - q.value(b + shift));
  }
  if (q.kind() == Cdf1D::Kind::Step) {
    // Q jumps up at b: approach x -> (b - shift) from below.
    for (const auto& [b, cum] : q.breakpoints())
      best = std::max(best, p.left_value(b - shift) - q.left_value(b));
  }
  if (p.kind() == Cdf1D::Kind::Gaussian && q.kind() == Cdf1D::Kind::Gaussian) {
    std::vector<double> xs;
    gaussian_stationary_points(p, q, shift, xs);
    for (double x : xs) best = std::max(best, p.value(x) - q.value(x + shift));
  }
  return best;
}

bool levy_feasible(const Cdf1D& f, const Cdf1D& g, double eps) {
  return sup_diff_shift(g, f, eps) <= eps && sup_diff_shift(f, g, eps) <= eps;
}

}  // namespace

double levy_distance_1d(const Cdf1D& f, const Cdf1D& g) {
  if (levy_feasible(f, g, 0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;  // eps = 1 is always feasible (CDFs live in [0,1])
  for (int iter = 0; iter < 60; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (levy_feasible(f, g, mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double ks_distance(const Cdf1D& f, const Cdf1D& g) {
  return std::max(sup_diff_shift(f, g, 0.0), sup_diff_shift(g, f, 0.0));
}

namespace {

double ramp_box(double t, double center) {
  // 1 on [center-1, center+1], linear ramps of width 0.5 outside, 0 beyond.
  double up = (t - (center - 1.5)) / 0.5;
  double down = ((center + 1.5) - t) / 0.5;
  return std::clamp(std::min(up, down), 0.0, 1.0);
}

std::vector<TestFunction2D> make_bl_family_v1() {
  std::vector<TestFunction2D> family;
  const double freqs[5] = {0.5, 1.0, 1.5, 2.0, 2.5};
  char buf[64];
  for (int j = 0; j < 5; ++j)
    for (int k = 0; k < 5; ++k) {
      double w1 = freqs[j], w2 = freqs[k];
      bool cos_kind = (j + k) % 2 == 0;
      std::snprintf(buf, sizeof buf, "%s:%g:%g", cos_kind ? "cc" : "ss", w1, w2);
      if (cos_kind)
        family.push_back({buf, 1.0, [w1, w2](double y1, double y2) {
                            return std::cos(w1 * y1) * std::cos(w2 * y2);
                          }});
      else
        family.push_back({buf, 1.0, [w1, w2](double y1, double y2) {
                            return std::sin(w1 * y1) * std::sin(w2 * y2);
                          }});
    }
  const double centers[3] = {-2.0, 0.0, 2.0};
  for (double cx : centers)
    for (double cy : centers) {
      std::snprintf(buf, sizeof buf, "box:%g:%g", cx, cy);
      family.push_back({buf, 1.0, [cx, cy](double y1, double y2) {
                          return ramp_box(y1, cx) * ramp_box(y2, cy);
                        }});
    }
  return family;
}

// id -> (kind, w1, w2) for the closed-form Gaussian expectations.
bool parse_trig_id(const std::string& id, bool& cos_kind, double& w1, double& w2) {
  char kind[8];
  if (std::sscanf(id.c_str(), "%2[cs]:%lf:%lf", kind, &w1, &w2) != 3) return false;
  if (kind[0] == 'c' && kind[1] == 'c')
    cos_kind = true;
  else if (kind[0] == 's' && kind[1] == 's')
    cos_kind = false;
  else
    return false;
  return true;
}

}  // namespace

const std::vector<TestFunction2D>& bl_family_v1() {
  static const std::vector<TestFunction2D> family = make_bl_family_v1();
  return family;
}

double reference_expectation_2d(const TestFunction2D& h, const LimitLaw& reference) {
  if (reference.kind == LimitLaw::Kind::PointMixture) {
    double acc = 0.0;
    for (const auto& atom : reference.mixture)
      acc += atom.weight * h.eval(atom.point[0], atom.point[1]);
    return acc;
  }
  bool cos_kind = false;
  double w1 = 0.0, w2 = 0.0;
  if (parse_trig_id(h.id, cos_kind, w1, w2)) {
    // cos A cos B = (cos(A-B) + cos(A+B))/2, sin A sin B = the difference;
    // E cos<t, xi> = exp(-t'Ct/2) cos<t, mu>.
    const Matrix2& c = reference.cov;
    const Vec2& mu = reference.mean;
    double q_minus = w1 * w1 * c[0][0] - 2.0 * w1 * w2 * c[0][1] + w2 * w2 * c[1][1];
    double q_plus = w1 * w1 * c[0][0] + 2.0 * w1 * w2 * c[0][1] + w2 * w2 * c[1][1];
    double term_minus = std::exp(-0.5 * q_minus) * std::cos(w1 * mu[0] - w2 * mu[1]);
    double term_plus = std::exp(-0.5 * q_plus) * std::cos(w1 * mu[0] + w2 * mu[1]);
    return cos_kind ? 0.5 * (term_minus + term_plus) : 0.5 * (term_minus - term_plus);
  }
  return gaussian_expectation_2d(h.eval, reference.mean, reference.cov, 1e-9);
}

double bl_distance_2d(std::span<const std::array<double, 2>> samples,
                      const LimitLaw& reference) {
  if (samples.empty()) throw std::invalid_argument("bl_distance_2d: no samples");
  const auto& family = bl_family_v1();
  double worst = 0.0;
  for (const auto& h : family) {
    KahanSum acc;
    for (const auto& pt : samples) acc.add(h.eval(pt[0], pt[1]));
    double mean = acc.value() / static_cast<double>(samples.size());
    worst = std::max(worst, std::fabs(mean - reference_expectation_2d(h, reference)));
  }
  return worst;
}

double bl_distance_2d(const WeightedLaw& law, const LimitLaw& reference) {
  if (law.dim() != 2) throw std::invalid_argument("bl_distance_2d: law must be 2-d");
  if (!law.normalized()) throw std::invalid_argument("bl_distance_2d: law must be normalized");
  const auto& family = bl_family_v1();
  double worst = 0.0;
  for (const auto& h : family) {
    KahanSum acc;
    for (std::size_t i = 0; i < law.size(); ++i) {
      auto pt = law.outcome(i);
      acc.add(law.probability(i) * h.eval(pt[0], pt[1]));
    }
    worst = std::max(worst, std::fabs(acc.value() - reference_expectation_2d(h, reference)));
  }
  return worst;
}

CovarianceEstimate empirical_covariance(std::span<const std::array<double, 2>> samples,
                                        std::span<const int> replicate_ids) {
  if (samples.size() != replicate_ids.size())
    throw std::invalid_argument("empirical_covariance: id/sample length mismatch");
  if (samples.size() < 2)
    throw std::invalid_argument("empirical_covariance: need at least 2 samples");
  // pooled covariance around the grand mean
  double n = static_cast<double>(samples.size());
  Vec2 mean{0.0, 0.0};
  for (const auto& s : samples) {
    mean[0] += s[0];
    mean[1] += s[1];
  }
  mean[0] /= n;
  mean[1] /= n;
  Matrix2 pooled{{{0.0, 0.0}, {0.0, 0.0}}};
  for (const auto& s : samples) {
    double d0 = s[0] - mean[0], d1 = s[1] - mean[1];
    pooled[0][0] += d0 * d0;
    pooled[0][1] += d0 * d1;
    pooled[1][1] += d1 * d1;
  }
  pooled[0][0] /= n - 1.0;
  pooled[0][1] /= n - 1.0;
  pooled[1][1] /= n - 1.0;
  pooled[1][0] = pooled[0][1];
  // per-replicate covariances for the error bars
  std::map<int, std::vector<std::array<double, 2>>> groups;
  for (std::size_t i = 0; i < samples.size(); ++i)
    groups[replicate_ids[i]].push_back(samples[i]);
  CovarianceEstimate est;
  est.cov = pooled;
  est.replicates = static_cast<int>(groups.size());
  est.se = Matrix2{{{0.0, 0.0}, {0.0, 0.0}}};
  est.has_se = groups.size() >= 2;
  if (!est.has_se) return est;
  std::vector<Matrix2> reps;
  for (const auto& [id, xs] : groups) {
    if (xs.size() < 2)
      throw std::invalid_argument("empirical_covariance: replicate with fewer than 2 samples");
    double rn = static_cast<double>(xs.size());
    Vec2 rm{0.0, 0.0};
    for (const auto& s : xs) {
      rm[0] += s[0];
      rm[1] += s[1];
    }
    rm[0] /= rn;
    rm[1] /= rn;
    Matrix2 c{{{0.0, 0.0}, {0.0, 0.0}}};
    for (const auto& s : xs) {
      double d0 = s[0] - rm[0], d1 = s[1] - rm[1];
      c[0][0] += d0 * d0;
      c[0][1] += d0 * d1;
      c[1][1] += d1 * d1;
    }
    c[0][0] /= rn - 1.0;
    c[0][1] /= rn - 1.0;
    c[1][1] /= rn - 1.0;
    c[1][0] = c[0][1];
    reps.push_back(c);
  }
  double r = static_cast<double>(reps.size());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double m = 0.0;
      for (const auto& c : reps) m += c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      m /= r;
      double v = 0.0;
      for (const auto& c : reps) {
        double d = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - m;
        v += d * d;
      }
      v /= r - 1.0;
      est.se[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::sqrt(v / r);
    }
  return est;
}

}  // namespace dcw
