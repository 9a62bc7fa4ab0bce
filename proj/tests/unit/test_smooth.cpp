#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "pa/smooth.hpp"

using namespace pa;

namespace {

// Distinct single-arm vectors {(k eps) e_i : k = 0..floor(1/eps)}.
std::size_t grid_count(std::size_t n, double eps) {
  std::set<std::vector<double>> seen;
  const int steps = static_cast<int>(std::floor(1.0 / eps + 1e-9));
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k <= steps; ++k) seen.insert(oracle::unit(n, i, k * eps));
  return seen.size();
}

// Hard-instance distribution straight from its defining cases.
std::vector<double> hard_probs(std::size_t n, std::size_t arm, std::size_t interval, double eps, double l,
                               const oracle::Vec& pi) {
  std::vector<double> p(n, 0.0);
  double rest = 1.0;
  const double lo = interval * eps, hi = lo + eps;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double x = pi[k];
    if (k == arm && x >= lo && x <= hi)
      p[k] = 1.0 / (16.0 * n * (1.0 - x)) + (l - 1.0) / 4.0 * std::min(x - lo, hi - x);
    else if (x <= 0.5)
      p[k] = 1.0 / (16.0 * n * (1.0 - x));
    else
      p[k] = 1.0 / (8.0 * n);
    rest -= p[k];
  }
  p[n - 1] = rest;
  return p;
}

}  // namespace

TEST_CASE("single-arm grid") {
  CHECK(build_single_arm_grid(2, 0.5).size() == 5);
  CHECK(build_single_arm_grid(4, 1.0).size() == 5);
  for (const auto& item : build_single_arm_grid(4, 1.0))
    for (double x : item.incentive.values()) CHECK((x == 0.0 || x == 1.0));
  CHECK(build_single_arm_grid(3, 0.1).size() == grid_count(3, 0.1));
  CHECK(build_single_arm_grid(5, 0.03).size() == grid_count(5, 0.03));
  CHECK_THROWS(build_single_arm_grid(2, 0.0));
}

TEST_CASE("resolution formulas") {
  CHECK(choose_single_resolution(1, 1.0, 27) == doctest::Approx(std::pow(3.0, -5.0 / 3.0)).epsilon(1e-14));
  const long double want = std::cbrt(4.0L) * std::pow(17.0L, -2.0L / 3.0L) * std::pow(10.0L, -5.0L / 3.0L);
  CHECK(choose_single_resolution(4, 8.0, 100000) == doctest::Approx(static_cast<double>(want)).epsilon(1e-13));
  double prev = 2.0;
  for (std::size_t t = 1; t <= 1u << 20; t *= 4) {
    const double e = choose_single_resolution(3, 2.0, t);
    CHECK(e <= 1.0);
    CHECK(e <= prev);
    prev = e;
  }

  const double g = choose_general_resolution(2, 1.0, 10000);
  CHECK(g == doctest::Approx(1.0 / (std::sqrt(3.0) * 10.0)).epsilon(1e-14));
  CHECK(build_hypercube_grid(2, g).size() == 18 * 18);
}

TEST_CASE("hypercube grid") {
  const Menu one = build_hypercube_grid(1, 0.5);
  REQUIRE(one.size() == 2);
  CHECK(one[0].incentive[0] == 0.25);
  CHECK(one[1].incentive[0] == 0.75);
  CHECK(build_hypercube_grid(2, 0.5).size() == 4);
  CHECK_THROWS(build_hypercube_grid(3, 0.001, 1000));
}

TEST_CASE("Gaussian-noise greedy probabilities") {
  const auto zero2 = IncentiveVector::zero(2, IncentiveMode::General);
  const auto half = gaussian_choice_probabilities({0.0, 0.0}, zero2);
  CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-12));

  const auto third = gaussian_choice_probabilities({0.3, 0.3, 0.3}, IncentiveVector::zero(3, IncentiveMode::General));
  for (double p : third) CHECK(std::abs(p - 1.0 / 3.0) <= 1e-9);

  RandomStream rng = StreamSplitter(8).stream("gauss");
  for (int k = 0; k < 20; ++k) {
    const std::vector<double> mu{rng.uniform(), rng.uniform()};
    const IncentiveVector pi({rng.uniform(), rng.uniform()}, IncentiveMode::General);
    const double c1 = mu[0] + pi[0], c2 = mu[1] + pi[1];
    const double closed = oracle::normal_cdf((c1 - c2) / std::sqrt(2.0));
    const double quad = oracle::simpson(
        [&](double y) {
          return std::exp(-0.5 * (y - c1) * (y - c1)) / std::sqrt(2 * M_PI) * oracle::normal_cdf(y - c2);
        },
        std::min(c1, c2) - 10, std::max(c1, c2) + 10, 4000);
    REQUIRE(std::abs(closed - quad) <= 1e-8);
    CHECK(std::abs(gaussian_choice_probabilities(mu, pi)[0] - closed) <= 1e-8);
  }

  SUBCASE("Jacobian matches central differences") {
    const std::vector<double> mu{0.2, 0.5, 0.1};
    const IncentiveVector pi({0.3, 0.1, 0.4}, IncentiveMode::General);
    const auto jac = gaussian_choice_jacobian(mu, pi);
    const double h = 1e-5;
    for (std::size_t k = 0; k < 3; ++k) {
      std::vector<double> up(pi.values().begin(), pi.values().end()), dn = up;
      up[k] += h;
      dn[k] -= h;
      const auto pu = gaussian_choice_probabilities(mu, IncentiveVector(up, IncentiveMode::General));
      const auto pd = gaussian_choice_probabilities(mu, IncentiveVector(dn, IncentiveMode::General));
      for (std::size_t i = 0; i < 3; ++i) CHECK(jac[i][k] == doctest::Approx((pu[i] - pd[i]) / (2 * h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("bonus function") {
  CHECK(bonus(0.0, 5.0, 0.1) == 0.0);
  CHECK(bonus(0.1, 5.0, 0.1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(bonus(0.05, 5.0, 0.1) == doctest::Approx(0.05));
  for (double x : {0.01, 0.02, 0.07, 0.08}) {
    const double slope = (bonus(x + 1e-4, 5.0, 0.1) - bonus(x, 5.0, 0.1)) / 1e-4;
    CHECK(std::abs(slope) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS(bonus(0.2, 5.0, 0.1));
}

TEST_CASE("smooth hard instance") {
  const std::size_t n = 4;
  const double eps = 0.05, l = 8.0;
  const SmoothHardInstanceParams params{1, 3, eps, l, n};
  const auto zero = hard_instance_probabilities(params, IncentiveVector::zero(n));
  for (std::size_t k = 0; k + 1 < n; ++k) CHECK(zero[k] == doctest::Approx(1.0 / (16.0 * n)).epsilon(1e-15));
  CHECK(zero[n - 1] == doctest::Approx(1.0 - (n - 1) / (16.0 * n)).epsilon(1e-15));

  RandomStream rng = StreamSplitter(10).stream("hard");
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t arm = rng.below(n);
    const double x = trial % 2 ? rng.uniform(0.0, 0.999) : rng.uniform(3 * eps, 4 * eps);
    const auto pi = IncentiveVector::single(n, arm, x);
    const auto got = hard_instance_probabilities(params, pi);
    const auto want = hard_probs(n, 1, 3, eps, l, oracle::unit(n, arm, x));
    for (std::size_t k = 0; k < n; ++k) REQUIRE(got[k] == doctest::Approx(want[k]).epsilon(1e-13));
  }

  const auto above = hard_instance_probabilities(params, IncentiveVector::single(n, 2, 0.7));
  CHECK(above[2] == doctest::Approx(1.0 / (8.0 * n)).epsilon(1e-15));

  const double mid = 3 * eps + eps / 2;
  const auto model = hard_instance_model(params);
  const double reward = expected_smooth_utility(model, hard_instance_rewards(n), IncentiveVector::single(n, 1, mid));
  CHECK(reward == doctest::Approx((n - 1) / (16.0 * n) + (1 - mid) * (l - 1) * eps / 8).epsilon(1e-13));
  CHECK(reward >= (n - 1) / (16.0 * n) + (l - 1) * eps / 16);

  CHECK_THROWS(validate(SmoothHardInstanceParams{0, 10, 0.05, 8.0, 4}));  // j eps + eps > 1/2
  CHECK_THROWS(validate(SmoothHardInstanceParams{0, 0, 0.05, 2.0, 4}));   // L < 3
  CHECK_THROWS(validate(SmoothHardInstanceParams{3, 0, 0.05, 8.0, 4}));   // arm must be < N-1
}

TEST_CASE("Lipschitz audits") {
  RandomStream rng = StreamSplitter(12).stream("audit");
  SmoothChoiceModel constant;
  constant.num_arms = 3;
  constant.lipschitz = 1.0;
  constant.probabilities = [](const IncentiveVector&) { return std::vector<double>{0.2, 0.3, 0.5}; };
  const auto c = lipschitz_audit(constant, 200, rng);
  CHECK(c.max_ratio == 0.0);
  CHECK(c.passed);

  const auto hard = lipschitz_audit(hard_instance_model({0, 2, 0.1, 5.0, 3}), 5000, rng);
  CHECK(hard.passed);
  CHECK(hard.max_ratio <= 5.0 * (1 + 1e-6));
  CHECK(hard.max_ratio > 1.0);  // the bonus slope is visible to the audit

  const auto gauss = gaussian_greedy_model({0.1, 0.4, 0.2});
  CHECK(std::isfinite(gauss.lipschitz));
  CHECK(gauss.lipschitz > 0.0);
  CHECK(lipschitz_audit(gauss, 300, rng).passed);

  const auto logit = logit_model({0.1, 0.9});
  CHECK(logit.lipschitz == 2.0);
  const auto la = lipschitz_audit(logit, 2000, rng);
  CHECK(la.passed);

  SmoothChoiceModel liar = logit;
  liar.lipschitz = 0.01;
  CHECK_FALSE(lipschitz_audit(liar, 200, rng).passed);
}
