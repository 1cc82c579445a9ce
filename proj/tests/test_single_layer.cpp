// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "bmdf/errors.hpp"
#include "bmdf/lambert_w.hpp"
#include "bmdf/numerics.hpp"
#include "bmdf/single_layer.hpp"
#include "doctest.h"

using namespace bmdf;

namespace {

// P(x X + y Y > c) for iid unit exponentials, by direct summation over X.
double PairTailBySummation(double x, double y, double c) {
  constexpr int n = 400'000;
  const double top = 60.0;
  const double h = top / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = (i + 0.5) * h;
    const double rest = c - x * a;
    sum += std::exp(-a) * (rest <= 0.0 ? 1.0 : std::exp(-rest / y)) * h;
  }
  return sum;
}

}  // namespace

TEST_CASE("single-user success probability") {
  CHECK(success_prob_su(0.0, 3.0) == 1.0);
  CHECK(success_prob_su(std::log1p(4.0), 4.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(success_prob_su(1.0, 10.0) == doctest::Approx(std::exp(-(std::numbers::e - 1.0) / 10.0)));
}

TEST_CASE("pair tail") {
  CHECK(pair_tail(1.0, 2.0, 0.0) == 1.0);
  CHECK(pair_tail(1.0, 1.0, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)));
  CHECK(pair_tail(2.0, 1.0, 1.0) == doctest::Approx(2.0 * std::exp(-0.5) - std::exp(-1.0)));
  CHECK(pair_tail(2.0, 1.0, 1.0) == doctest::Approx(0.8452).epsilon(1e-4));
  for (auto [x, y, c] : {std::array{0.3, 5.0, 2.0}, std::array{7.0, 7.0, 4.0}, std::array{1e-3, 2.0, 0.5}}) {
    CHECK(pair_tail(x, y, c) == doctest::Approx(PairTailBySummation(x, y, c)).epsilon(1e-6));
  }
}

TEST_CASE("pair tail is continuous across equal powers") {
  for (double x : {0.1, 1.0, 10.0, 100.0}) {
    for (double rate : {0.2, 1.0, 3.0}) {
      const double eq = success_prob_pair(rate, x, x);
      CHECK(std::abs(success_prob_pair(rate, x, x + 1e-6) - eq) < 1e-5);
      CHECK(std::abs(success_prob_pair(rate, x, x - 1e-6) - eq) < 1e-5);
    }
  }
}

TEST_CASE("crossover constants") {
  const double x0 = crossover_x0();
  CHECK(x0 == doctest::Approx(2.5128).epsilon(1e-3 / 2.5128));
  CHECK(std::abs((1.0 + x0) * std::exp(-x0 / 2.0) - 1.0) < 1e-12);
  CHECK(gamma0() == doctest::Approx(x0 / 2.0));
  const double r = std::log1p(x0);
  CHECK(success_prob_su(r, 2.0) == doctest::Approx(success_prob_pair(r, 1.0, 1.0)).epsilon(1e-12));
  CHECK(success_prob_su(r, 2.0) == doctest::Approx(0.2847).epsilon(1e-3));
}

TEST_CASE("correlation region classification") {
  const ChannelParams p{1.0, 1.0, 10.0};
  const double big_p = p.total_power();
  CHECK(classify_rho_region(0.0, p).kind == RhoRegionKind::ZeroOptimal);
  CHECK(classify_rho_region(std::log1p(gamma0() * big_p) + 1e-6, p).kind == RhoRegionKind::Ambiguous);
  CHECK(classify_rho_region(std::log1p(1.5 * big_p) + 1e-6, p).kind == RhoRegionKind::MaxOptimal);
  const RhoRegion collapsed = classify_rho_region(std::log1p(gamma0() * big_p) + 1e-6, p, 1.5, true);
  CHECK(collapsed.kind == RhoRegionKind::MaxOptimal);
  CHECK_THROWS_AS(classify_rho_region(0.1, p, 1.0), DomainError);
}

TEST_CASE("correlated power allocation") {
  const CorrelatedAllocation a = correlated_allocation(std::log(3.0), {1.0, 1.0, 2.0});
  CHECK(a.p0 == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(a.p0_bar == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(a.skew_delta) < 1e-6);
  const CorrelatedAllocation far = correlated_allocation(1.0, {1.0, 1.0, 1e12});
  CHECK(far.p0 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(far.skew_delta == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(correlated_allocation(5.0, {1.0, 1.0, 1.0}), InfeasibleRate);
  CHECK(rho_max(0.0, {1.0, 1.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("throughput") {
  const ChannelParams p{2.0, 2.0, 10.0};
  CHECK(throughput(0.0, p, RhoMode::RhoZero) == 0.0);
  CHECK(throughput(0.0, p, RhoMode::RhoMax) == 0.0);
  CHECK(throughput(std::log(5.0), p, RhoMode::RhoZero) == doctest::Approx(std::log(5.0) * 3.0 * std::exp(-2.0)));
  CHECK(throughput(std::log(5.0), p, RhoMode::RhoZero) == doctest::Approx(0.6534).epsilon(1e-4));
  const ChannelParams unbounded{1.0, 1.0, 1e12};
  for (double r : {0.3, 1.0, 2.0}) {
    CHECK(throughput(r, unbounded, RhoMode::RhoMax) == doctest::Approx(r * std::exp(-std::expm1(r) / 2.0)).epsilon(1e-8));
  }
  const double cap = std::log1p(p.p_s * p.q);
  CHECK(throughput(cap + 0.1, p, RhoMode::RhoZero) == 0.0);
  CHECK_THROWS_AS(throughput(cap + 0.1, p, RhoMode::RhoMax), InfeasibleRate);
}

TEST_CASE("rate optimisation") {
  const ChannelParams p{1.0, 1.0, 1e6};
  const RateOptimum zero = maximize_throughput(p, RhoMode::RhoZero);
  const RateOptimum corr = maximize_throughput(p, RhoMode::RhoMax);
  CHECK(zero.value >= corr.value);
  CHECK(std::abs(miso_throughput_derivative(zero.rate, 1.0, 1.0)) < 1e-8);
  CHECK(oblivious_su_rate(std::numbers::e) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(oblivious_su_rate(1.0) == doctest::Approx(0.5671432904097838).epsilon(1e-14));
  CHECK(oblivious_su_rate(10.0) == doctest::Approx(lambert_w0(10.0)));
}

TEST_CASE("minimal collocation gain") {
  CHECK(q_min_single(std::numbers::e) == doctest::Approx(1.0 - 1.0 / std::numbers::e).epsilon(1e-14));
  CHECK(q_min_single(1e6) < 0.1);
  double last = 1.0;
  for (double db = 0.0; db <= 40.0; db += 1.0) {
    const double q = q_min_single(std::pow(10.0, db / 10.0));
    CHECK(q < last);
    CHECK(q > 0.0);
    last = q;
  }
}

TEST_CASE("source-power threshold for sub-unity collocation gain") {
  CHECK(p_s_star(1.0) == 0.0);
  CHECK(p_s_star(2.0) == 0.0);
  CHECK(p_s_star(0.5) == doctest::Approx(7.85).epsilon(0.01 / 7.85));
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double ps = p_s_star(q);
    CHECK(std::abs(lambert_w0(ps) - std::log1p(ps * q)) < 1e-9);
    const double oracle = bisect_root(
        [q](double x) { return std::log1p(x * q) * (1.0 + x * q) - x; }, 1e-3, 1e8, 1e-13);
    CHECK(ps == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("stationary source power starts with the golden slope") {
  const double h = 1e-7;
  const double slope = (stationary_source_power(2.0 * h) - stationary_source_power(h)) / h;
  CHECK(slope == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-4));
  CHECK(stationary_source_power(0.5) < stationary_source_power(0.6));
}

TEST_CASE("audit building blocks") {
  CHECK(ratio_bound_lhs(2.0, 2.0) == doctest::Approx(3.0));
  CHECK(ratio_bound_lhs(2.0, 2.0 + 1e-7) == doctest::Approx(3.0).epsilon(1e-5));
  const double k1 = k_alpha(1.0, 100.0);
  CHECK(std::abs(1.000001 * k_alpha(1.000001, 100.0) - k1) < 1e-4);
  std::vector<double> alphas;
  for (int i = 1; i <= 200; ++i) alphas.push_back(1.0 + 49.0 * i / 200.0);
  const Conjecture1Audit audit = audit_conjecture1({10.0, 10.0, 100.0}, alphas);
  CHECK(audit.r0_decodable);
  CHECK(audit.pass);
  CHECK(audit.alpha_checks.size() == 200);
}

TEST_CASE("rho = 0 throughput is unimodal") {
  CHECK(unimodality_check({1.0, 1.0, 1.0}));
  CHECK(unimodality_check({4.0, 1.0, 1.0}));
  CHECK(unimodality_check({0.1, 50.0, 1.0}));
  CHECK(unimodality_check({0.1337, 62.18, 1.0}));
  // Deep tail where exp(-c / y) is subnormal.
  CHECK(miso_throughput_derivative(10.75, 0.1337, 62.18) <= 0.0);
}
