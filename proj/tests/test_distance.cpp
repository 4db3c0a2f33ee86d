#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "dcw/distance.hpp"
#include "dcw/limits.hpp"
#include "dcw/model.hpp"

using namespace dcw;

TEST_SUITE("distance") {

TEST_CASE("Cdf1D queries on steps and Gaussians") {
  Cdf1D step = Cdf1D::step({{0.0, 0.25}, {1.0, 1.0}});
  CHECK(step.value(-0.5) == 0.0);
  CHECK(step.value(0.0) == 0.25);
  CHECK(step.value(0.5) == 0.25);
  CHECK(step.value(1.0) == 1.0);
  CHECK(step.value(2.0) == 1.0);
  CHECK(step.left_value(0.0) == 0.0);
  CHECK(step.left_value(1.0) == 0.25);

  Cdf1D normal = Cdf1D::gaussian(0.0, 1.0);
  CHECK(normal.value(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normal.left_value(0.0) == normal.value(0.0));

  CHECK_THROWS_AS(Cdf1D::step({{0.0, 0.5}, {-1.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Cdf1D::step({{0.0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(Cdf1D::gaussian(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("from_samples merges ties and matches the empirical CDF") {
  std::vector<double> xs{2.0, -1.0, 2.0, 0.5};
  Cdf1D cdf = Cdf1D::from_samples(xs);
  CHECK(cdf.breakpoints().size() == 3);
  CHECK(cdf.value(-1.0) == doctest::Approx(0.25));
  CHECK(cdf.value(0.5) == doctest::Approx(0.5));
  CHECK(cdf.value(2.0) == doctest::Approx(1.0));
  CHECK(cdf.left_value(2.0) == doctest::Approx(0.5));
}

TEST_CASE("distances between identical laws vanish") {
  Cdf1D normal = Cdf1D::gaussian(0.5, 2.0);
  CHECK(levy_distance_1d(normal, normal) < 1e-9);
  CHECK(ks_distance(normal, normal) == 0.0);
  Cdf1D mass = Cdf1D::point_mass(1.5);
  CHECK(levy_distance_1d(mass, mass) < 1e-9);
}

TEST_CASE("KS between unit-shifted normals is 2 Phi(1/2) - 1") {
  Cdf1D f = Cdf1D::gaussian(0.0, 1.0);
  Cdf1D g = Cdf1D::gaussian(1.0, 1.0);
  double expect = 0.3829249225480262;
  CHECK(std::abs(ks_distance(f, g) - expect) < 1e-10);
  // the Levy metric is dominated by KS
  double levy = levy_distance_1d(f, g);
  CHECK(levy <= ks_distance(f, g) + 1e-9);
  CHECK(levy > 0.1);
}

TEST_CASE("Levy distance between point masses is min(separation, 1)") {
  // For unit masses at 0 and c > 0, F(x) <= G(x + eps) + eps fails on
  // [0, c - eps) unless eps >= 1, so d_L = min(c, 1).
  Cdf1D a = Cdf1D::point_mass(0.0);
  Cdf1D b = Cdf1D::point_mass(0.4);
  CHECK(levy_distance_1d(a, b) == doctest::Approx(0.4).epsilon(1e-6));
  Cdf1D far = Cdf1D::point_mass(9.0);
  CHECK(levy_distance_1d(a, far) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(levy_distance_1d(a, b) == doctest::Approx(levy_distance_1d(b, a)).epsilon(1e-7));
}

TEST_CASE("Levy distance detects a mean shift of a Gaussian") {
  Cdf1D f = Cdf1D::gaussian(0.0, 1.0);
  for (double shift : {0.1, 0.3, 1.0}) {
    Cdf1D g = Cdf1D::gaussian(shift, 1.0);
    double d = levy_distance_1d(f, g);
    CHECK(d > 0.02 * shift);
    CHECK(d <= ks_distance(f, g) + 1e-9);
  }
}

TEST_CASE("CW magnetization CDFs approach the scaled Gaussian") {
  // beta = 0.5: s/sqrt(N) tends to N(0, 1/(1-beta)) = N(0, 2)
  Cdf1D target = Cdf1D::gaussian(0.0, 2.0);
  double last = 2.0;
  for (int n : {100, 400, 1600, 3200}) {
    ModelParams params(n, 0.5, 1.0);
    WeightedLaw law = cw_exact_magnetization_law(params);
    law.normalize();
    WeightedLaw scaled = law.scaled({1.0 / std::sqrt(static_cast<double>(n))});
    double d = levy_distance_1d(Cdf1D::from_law(scaled), target);
    CHECK(d < last);
    last = d;
  }
  CHECK(last < 0.02);
}

TEST_CASE("BL family v1 composition and bounds") {
  const auto& family = bl_family_v1();
  CHECK(family.size() == 34);
  CHECK(bl_family_version == 1);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unif(-6.0, 6.0);
  for (const auto& h : family) {
    CHECK(!h.id.empty());
    CHECK(h.bound > 0.0);
    for (int trial = 0; trial < 200; ++trial) {
      double v = h.eval(unif(rng), unif(rng));
      CHECK(std::abs(v) <= h.bound + 1e-12);
    }
  }
  // ids are unique
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j)
      CHECK(family[i].id != family[j].id);
}

TEST_CASE("reference expectations: point mixtures are exact sums") {
  const auto& family = bl_family_v1();
  LimitLaw atoms = LimitLaw::point_mixture({{0.5, {-1.0, -1.0}}, {0.5, {1.0, 1.0}}});
  for (const auto& h : family) {
    double direct = 0.5 * h.eval(-1.0, -1.0) + 0.5 * h.eval(1.0, 1.0);
    CHECK(reference_expectation_2d(h, atoms) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("reference expectations: trig members match brute quadrature") {
  Matrix2 cov{{{1.5, 0.5}, {0.5, 1.5}}};
  LimitLaw ref = LimitLaw::gaussian({0.0, 0.0}, cov);
  const auto& family = bl_family_v1();
  // the closed-form characteristic-function path vs the generic quadrature
  for (std::size_t idx : {std::size_t{0}, std::size_t{7}, std::size_t{12},
                          std::size_t{18}, std::size_t{24}}) {
    const auto& h = family[idx];
    double quad = gaussian_expectation_2d(
        [&](double x, double y) { return h.eval(x, y); }, {0.0, 0.0}, cov, 1e-10);
    CHECK(reference_expectation_2d(h, ref) == doctest::Approx(quad).epsilon(5e-6));
  }
}

namespace {

// phi and its CDF antiderivative J(z) = z Phi(z) + phi(z), so that
// integral of Phi((t - mu)/sd) dt over [a, b] = sd (J(zb) - J(za)).
double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double phi_antideriv(double z) { return z * std_normal_cdf(z) + std_normal_pdf(z); }

// E[trapezoid(y)] for y ~ N(mu, sd^2), trapezoid with feet at c +/- 1.5 and
// plateau [c-1, c+1].  Writing the trapezoid as (1/w) [ integral over the
// rising foot of 1{y > a} da - integral over the falling foot ] turns the
// expectation into explicit Phi antiderivatives.
double trapezoid_gauss_mean(double c, double mu, double sd) {
  const double w = 0.5;
  auto seg = [&](double a, double b) {
    // integral over [a, b] of P(y > t) dt
    double za = (a - mu) / sd, zb = (b - mu) / sd;
    return (b - a) - sd * (phi_antideriv(zb) - phi_antideriv(za));
  };
  return (seg(c - 1.5, c - 1.0) - seg(c + 1.0, c + 1.5)) / w;
}

}  // namespace

TEST_CASE("reference expectations: box members match a conditional-closed-form oracle") {
  Matrix2 cov{{{1.5, 0.5}, {0.5, 1.5}}};
  LimitLaw ref = LimitLaw::gaussian({0.0, 0.0}, cov);
  double s1 = std::sqrt(cov[0][0]);
  double rho = cov[0][1] / std::sqrt(cov[0][0] * cov[1][1]);
  double cond_sd = std::sqrt(cov[1][1]) * std::sqrt(1.0 - rho * rho);
  const auto& family = bl_family_v1();
  for (std::size_t idx = 25; idx < family.size(); ++idx) {
    const auto& h = family[idx];
    double cx = 0.0, cy = 0.0;
    REQUIRE(std::sscanf(h.id.c_str(), "box:%lf:%lf", &cx, &cy) == 2);
    // outer integrand is supported exactly on [cx-1.5, cx+1.5]; integrate it
    // with a fine fixed Simpson grid and the inner factor in closed form
    const int steps = 4000;  // even
    double lo = cx - 1.5, hi = cx + 1.5, dx = (hi - lo) / steps;
    double acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
      double y1 = lo + i * dx;
      double weight = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      double cmean = rho * std::sqrt(cov[1][1]) * (y1 / s1);
      // h.eval(y1, cy) is the y1 trapezoid alone: the y2 factor is 1 at its
      // own plateau center cy
      acc += weight * std_normal_pdf(y1 / s1) / s1 * h.eval(y1, cy) *
             trapezoid_gauss_mean(cy, cmean, cond_sd);
    }
    double oracle = acc * dx / 3.0;
    CHECK(reference_expectation_2d(h, ref) == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("bl_distance_2d vanishes on matched Gaussian samples") {
  // a million Box-Muller pairs correlated to cov [[1.5,.5],[.5,1.5]]
  std::mt19937_64 rng(314159);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix2 cov{{{1.5, 0.5}, {0.5, 1.5}}};
  // cov = L L^T with L = [[sqrt(1.5), 0], [0.5/sqrt(1.5), sqrt(1.5-1/6)]]
  double l11 = std::sqrt(1.5);
  double l21 = 0.5 / l11;
  double l22 = std::sqrt(1.5 - l21 * l21);
  std::vector<std::array<double, 2>> samples(1000000);
  for (auto& sample : samples) {
    double z1 = normal(rng), z2 = normal(rng);
    sample = {l11 * z1, l21 * z1 + l22 * z2};
  }
  LimitLaw ref = LimitLaw::gaussian({0.0, 0.0}, cov);
  CHECK(bl_distance_2d(samples, ref) < 3e-3);

  // an uncorrelated reference must be detected
  LimitLaw wrong = LimitLaw::gaussian({0.0, 0.0}, {{{1.0, 0.0}, {0.0, 1.0}}});
  CHECK(bl_distance_2d(samples, wrong) > 0.01);
}

TEST_CASE("bl_distance_2d on exact laws: degenerate pair mixture") {
  WeightedLaw law(2);
  law.add2(-1.0, -1.0, 0.0);
  law.add2(1.0, 1.0, 0.0);
  law.normalize();
  LimitLaw ref = LimitLaw::point_mixture({{0.5, {-1.0, -1.0}}, {0.5, {1.0, 1.0}}});
  CHECK(bl_distance_2d(law, ref) < 1e-12);
  LimitLaw shifted = LimitLaw::point_mixture({{0.5, {-2.0, -2.0}}, {0.5, {2.0, 2.0}}});
  CHECK(bl_distance_2d(law, shifted) > 0.05);
}

TEST_CASE("empirical_covariance recovers a known covariance within error bars") {
  std::mt19937_64 rng(271828);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int reps = 10, per = 10000;
  std::vector<std::array<double, 2>> samples;
  std::vector<int> ids;
  samples.reserve(reps * per);
  ids.reserve(reps * per);
  for (int r = 0; r < reps; ++r)
    for (int i = 0; i < per; ++i) {
      samples.push_back({normal(rng), normal(rng)});
      ids.push_back(r);
    }
  CovarianceEstimate est = empirical_covariance(samples, ids);
  CHECK(est.replicates == reps);
  CHECK(est.has_se);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      double target = j == k ? 1.0 : 0.0;
      CHECK(est.se[j][k] > 0.0);
      CHECK(std::abs(est.cov[j][k] - target) < 4.0 * est.se[j][k] + 1e-12);
    }
  CHECK(est.cov[0][1] == doctest::Approx(est.cov[1][0]).epsilon(1e-12));

  // single replicate: no between-replicate error bars
  std::vector<int> ones(samples.size(), 0);
  CovarianceEstimate single = empirical_covariance(samples, ones);
  CHECK(!single.has_se);
  CHECK(single.replicates == 1);

  std::vector<int> short_ids(3, 0);
  std::vector<std::array<double, 2>> short_samples(4);
  CHECK_THROWS_AS(empirical_covariance(short_samples, short_ids), std::invalid_argument);
}

}  // TEST_SUITE
