#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "dcw/law.hpp"
#include "dcw/logspace.hpp"
#include "dcw/params.hpp"
#include "dcw/spin.hpp"
#include "dcw/stats.hpp"

using namespace dcw;

TEST_SUITE("core") {

TEST_CASE("log_add basic identities") {
  CHECK(log_add(neg_inf, neg_inf) == neg_inf);
  CHECK(log_add(0.0, neg_inf) == 0.0);
  CHECK(log_add(neg_inf, 3.5) == 3.5);
  CHECK(log_add(0.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // large arguments must not overflow
  CHECK(log_add(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(log_add(1000.0, -1000.0) == doctest::Approx(1000.0).epsilon(1e-15));
}

TEST_CASE("log_sum_exp agrees with direct summation and handles edge cases") {
  std::vector<double> xs = {0.1, -2.0, 1.7, 0.0, -30.0};
  double direct = 0.0;
  for (double x : xs) direct += std::exp(x);
  CHECK(log_sum_exp(xs) == doctest::Approx(std::log(direct)).epsilon(1e-14));

  CHECK(log_sum_exp(std::vector<double>{}) == neg_inf);
  CHECK(log_sum_exp(std::vector<double>{neg_inf, neg_inf}) == neg_inf);
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{0.0, std::nan("")}), std::invalid_argument);

  // shifted inputs shift the output exactly
  std::vector<double> shifted = xs;
  for (double& x : shifted) x += 500.0;
  CHECK(log_sum_exp(shifted) == doctest::Approx(log_sum_exp(xs) + 500.0).epsilon(1e-13));
}

TEST_CASE("LogSumAccumulator matches log_sum_exp on streams") {
  std::vector<double> xs;
  double v = -3.0;
  for (int i = 0; i < 1000; ++i) {
    v = std::fmod(v * 1.7 + 0.3, 7.0);
    xs.push_back(v * 13.0 - 40.0);
  }
  LogSumAccumulator acc;
  for (double x : xs) acc.add_log(x);
  CHECK(acc.log_value() == doctest::Approx(log_sum_exp(xs)).epsilon(1e-12));

  LogSumAccumulator empty;
  CHECK(empty.log_value() == neg_inf);
}

TEST_CASE("log_binomial and log_cosh") {
  CHECK(log_binomial(4, 2) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  CHECK(log_binomial(10, 0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(log_binomial(5, 6) == neg_inf);
  CHECK(log_binomial(5, -1) == neg_inf);
  CHECK(log_cosh(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(log_cosh(2.0) == doctest::Approx(std::log(std::cosh(2.0))).epsilon(1e-14));
  // would overflow cosh directly
  CHECK(log_cosh(1000.0) == doctest::Approx(1000.0 - std::log(2.0)).epsilon(1e-15));
  CHECK(log_cosh(-7.0) == log_cosh(7.0));
}

TEST_CASE("magnetization examples") {
  CHECK(SpinConfig::all_up(4).magnetization() == 4);
  CHECK(SpinConfig::from_signs({+1, -1, +1, -1}).magnetization() == 0);
  CHECK(SpinConfig::from_signs({+1, +1, -1}).magnetization() == 1);
  CHECK(SpinConfig::all_down(6).magnetization() == -6);
}

TEST_CASE("overlap examples") {
  SpinConfig c1 = SpinConfig::from_signs({+1, -1, +1, +1, -1});
  CHECK(overlap(c1, c1) == 5);
  SpinConfig c2 = c1;
  for (int i = 0; i < 5; ++i) c2.flip(i);
  CHECK(overlap(c1, c2) == -5);
  CHECK(overlap(SpinConfig::from_signs({+1, +1}), SpinConfig::from_signs({+1, -1})) == 0);
  CHECK_THROWS_AS(overlap(SpinConfig(3), SpinConfig(4)), std::invalid_argument);
}

TEST_CASE("spin storage across word boundaries") {
  SpinConfig c(130);
  CHECK(c.magnetization() == -130);
  c.set_spin(0, +1);
  c.set_spin(64, +1);
  c.set_spin(129, +1);
  CHECK(c.spin(64) == +1);
  CHECK(c.spin(63) == -1);
  CHECK(c.magnetization() == -124);
  c.flip(64);
  CHECK(c.spin(64) == -1);
  CHECK(c.popcount() == 2);
}

TEST_CASE("group_sums examples") {
  TwoGroupPartition part = TwoGroupPartition::contiguous(5, 3, 2);
  CHECK(group_sums(SpinConfig::all_up(5), part) == std::pair<int, int>(3, 2));
  CHECK(group_sums(SpinConfig::all_down(5), part) == std::pair<int, int>(-3, -2));

  TwoGroupPartition part4 = TwoGroupPartition::contiguous(4, 2, 2);
  CHECK(group_sums(SpinConfig::from_signs({+1, -1, +1, +1}), part4) ==
        std::pair<int, int>(0, 2));
}

TEST_CASE("TwoGroupPartition validation") {
  CHECK_THROWS_AS(TwoGroupPartition(4, {0, 1}, {1, 2}), std::invalid_argument);  // overlap
  CHECK_THROWS_AS(TwoGroupPartition(4, {}, {1, 2}), std::invalid_argument);      // empty
  CHECK_THROWS_AS(TwoGroupPartition(3, {0, 1}, {2, 3}), std::invalid_argument);  // out of range
  CHECK_THROWS_AS(TwoGroupPartition::contiguous(4, 3, 2), std::invalid_argument);

  // non-covering partitions are allowed
  TwoGroupPartition part(6, {0, 1}, {2, 3});
  CHECK(part.n1() == 2);
  CHECK(part.n2() == 2);
  CHECK(!part.covering());
  CHECK(TwoGroupPartition::contiguous(4, 2, 2).covering());
}

TEST_CASE("ModelParams validation and derived quantities") {
  CHECK_THROWS_AS(ModelParams(0, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(10, -0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(10, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(10, 0.5, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(10, 0.5, 0.5, 1.0), std::invalid_argument);

  ModelParams params(100, 0.5, 0.5, 0.2);
  CHECK(params.edge_coupling() == doctest::Approx(0.5 / (2.0 * 100 * 0.5)).epsilon(1e-15));
  CHECK(params.typicality_threshold() ==
        doctest::Approx(100.0 * std::pow(50.0, 0.2)).epsilon(1e-15));
  CHECK(params.theorem_mode());

  ModelParams hot(10, 1.2, 0.5);
  CHECK(!hot.theorem_mode());
  CHECK_THROWS_WITH_AS(hot.require_theorem_mode(),
                       doctest::Contains("standing assumption"), std::domain_error);
}

TEST_CASE("WeightedLaw merge, normalize, moments") {
  WeightedLaw law(1);
  law.add1(2.0, std::log(0.5));
  law.add1(-1.0, std::log(0.25));
  law.add1(2.0, std::log(0.5));  // merges with the first entry
  CHECK(law.size() == 2);
  CHECK(law.total_log_weight() == doctest::Approx(std::log(1.25)).epsilon(1e-14));
  law.normalize();
  CHECK(law.normalized());
  // sorted support: -1 then 2
  CHECK(law.outcome(0)[0] == -1.0);
  CHECK(law.probability(0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(law.probability(1) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(law.mean(0) == doctest::Approx(-0.2 + 1.6).epsilon(1e-14));
  CHECK(law.second_moment(0, 0) == doctest::Approx(0.2 + 3.2).epsilon(1e-14));
  CHECK(law.mass_where([](double x) { return x > 0; }) == doctest::Approx(0.8).epsilon(1e-14));

  auto cdf = law.cdf_points();
  REQUIRE(cdf.size() == 2);
  CHECK(cdf[0].second == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(cdf[1].second == 1.0);
}

TEST_CASE("WeightedLaw guards") {
  WeightedLaw law(1);
  law.add1(0.0, 0.0);
  CHECK_THROWS_AS(law.probability(0), std::logic_error);
  std::vector<double> wrong_dim = {1.0, 2.0};
  CHECK_THROWS_AS(law.add(wrong_dim, 0.0), std::invalid_argument);
  WeightedLaw empty(1);
  CHECK_THROWS_AS(empty.normalize(), std::logic_error);
}

TEST_CASE("WeightedLaw marginal and scaled") {
  WeightedLaw law(2);
  law.add2(0.0, 1.0, std::log(0.5));
  law.add2(1.0, 1.0, std::log(0.25));
  law.add2(0.0, -1.0, std::log(0.25));
  law.normalize();

  WeightedLaw m0 = law.marginal({0});
  CHECK(m0.size() == 2);
  CHECK(m0.probability(0) == doctest::Approx(0.75).epsilon(1e-14));  // x = 0

  WeightedLaw m1 = law.marginal({1});
  CHECK(m1.probability(1) == doctest::Approx(0.75).epsilon(1e-14));  // y = +1

  WeightedLaw sc = law.scaled({2.0, 0.5});
  CHECK(sc.outcome(2)[0] == 2.0);
  CHECK(sc.mean(1) == doctest::Approx(0.5 * law.mean(1)).epsilon(1e-14));
  CHECK_THROWS_AS(law.scaled({1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(law.scaled({1.0}), std::invalid_argument);
}

TEST_CASE("WeightedLaw csv schema") {
  WeightedLaw law(2);
  law.add2(0.5, -0.25, 0.0);
  law.normalize();
  std::ostringstream os;
  law.write_csv(os);
  CHECK(os.str() == "outcome_1,outcome_2,probability\n0.5,-0.25,1\n");
}

TEST_CASE("wilson_interval sanity") {
  WilsonInterval iv = wilson_interval(0, 100, z_95);
  CHECK(iv.low == 0.0);
  CHECK(iv.high > 0.0);
  CHECK(iv.high < 0.06);

  WilsonInterval half = wilson_interval(50, 100, z_95);
  CHECK(half.low < 0.5);
  CHECK(half.high > 0.5);
  // interval always contains the point estimate
  for (long long k : {0LL, 1LL, 17LL, 99LL, 100LL}) {
    WilsonInterval w = wilson_interval(k, 100, z_99);
    double phat = static_cast<double>(k) / 100.0;
    CHECK(w.low <= phat + 1e-12);
    CHECK(w.high >= phat - 1e-12);
  }
  CHECK_THROWS_AS(wilson_interval(1, 0, z_95), std::invalid_argument);
  CHECK_THROWS_AS(wilson_interval(5, 4, z_95), std::invalid_argument);
}

}  // TEST_SUITE
