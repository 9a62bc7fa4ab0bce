#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pa/instances.hpp"

using namespace pa;

namespace {

// sum_j p_j U(pi, j) with the oracle's greedy response.
double oracle_reward(const GreedyInstance& g, const IncentiveVector& pi, const std::vector<double>& p) {
  const oracle::Vec x(pi.values().begin(), pi.values().end());
  double r = 0;
  for (std::size_t j = 0; j < g.num_agents(); ++j)
    r += p[j] * oracle::utility(g.rewards(), g.preference(j), g.tie_priority()[j], x);
  return r;
}

}  // namespace

TEST_CASE("arrival processes") {
  RandomStream rng = StreamSplitter(1).stream("arrivals");
  const std::vector<RoundTrace> none;
  const auto fixed = ArrivalProcess::fixed({2, 0, 1});
  CHECK(fixed.next(0, rng, none) == 2);
  CHECK(fixed.next(4, rng, none) == 0);
  CHECK(fixed.num_agents() == 3);

  const auto blocks = ArrivalProcess::blocks({{2, 1}, {3, 0}});
  std::vector<std::size_t> seq;
  for (std::size_t t = 0; t < 7; ++t) seq.push_back(blocks.next(t, rng, none));
  CHECK(seq == std::vector<std::size_t>{1, 1, 0, 0, 0, 1, 1});

  const auto iid = ArrivalProcess::iid({0.25, 0.75});
  double ones = 0;
  for (std::size_t t = 0; t < 20000; ++t) ones += iid.next(t, rng, none) == 1;
  CHECK(ones / 20000 == doctest::Approx(0.75).epsilon(0.02));
  CHECK_THROWS(ArrivalProcess::iid({0.5, 0.6}));
  CHECK_THROWS(ArrivalProcess::iid({0.5, 0.6}).validate_for(1));
  CHECK_THROWS(ArrivalProcess::fixed({0, 3}).validate_for(2));

  // An adaptive adversary sees only the principal-visible trace.
  const auto adaptive = ArrivalProcess::adaptive(2, [](std::span<const RoundTrace> h) -> std::size_t {
    return h.empty() ? 0 : (h.back().arm == 0 ? 1 : 0);
  });
  const std::vector<RoundTrace> hist{{0, 0}};
  CHECK(adaptive.next(1, rng, hist) == 1);
}

TEST_CASE("two-type example") {
  for (double delta : {0.7, 0.705, 0.71}) {
    const Example32 ex = example_3_2(delta);
    const std::vector<double> p{0.4, 0.6};
    CHECK(ex.arrivals.probabilities() == p);
    const double at = expected_greedy_utility(ex.instance, IncentiveVector::single(3, 0, delta), p);
    CHECK(at == doctest::Approx(0.6 * 0.5 + 0.4 * (1 - delta)).epsilon(1e-14));
    CHECK(at >= 0.416 - 1e-12);
    for (double below : {0.0, delta / 2, delta - 1e-6})
      CHECK(expected_greedy_utility(ex.instance, IncentiveVector::single(3, 0, below), p) ==
            doctest::Approx(0.3).epsilon(1e-14));
    for (std::size_t arm = 0; arm < 3; ++arm)
      for (double above : {delta + 1e-6, 0.8, 1.0}) {
        const double u = expected_greedy_utility(ex.instance, IncentiveVector::single(3, arm, above), p);
        CHECK(u <= 1 - delta + 1e-12);
      }
  }
  CHECK_THROWS(example_3_2(0.69));
  CHECK_THROWS(example_3_2(0.72));
}

TEST_CASE("sqrt(KT) hard family") {
  const HardB1 k3 = hard_b1(3, 3, 100);
  CHECK(k3.beta[0] == doctest::Approx(1.0 / 15.0).epsilon(1e-14));
  REQUIRE(k3.menu.size() == 2);
  CHECK(k3.menu[1].incentive[1] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(k3.instance.reward(1) - k3.menu[1].incentive[1] == doctest::Approx(0.4).epsilon(1e-14));

  for (std::size_t k : {3u, 5u, 10u}) {
    const std::size_t km2 = k - 2;
    const std::size_t horizon = std::max(4 * km2 * km2 * km2, 10 * km2) + 1;
    const HardB1 h = hard_b1(k, 4, horizon);
    CAPTURE(k);
    CHECK(h.eps < 0.1);
    CHECK(h.eps == doctest::Approx(std::sqrt(km2 / (10.0 * horizon))));
    CHECK(h.p[0] == 0.5);
    CHECK(h.p[k - 1] == doctest::Approx(1.0 / 6.0));

    std::vector<double> oracle_r;
    for (const auto& item : h.menu) oracle_r.push_back(oracle_reward(h.instance, item.incentive, h.p));
    CHECK(std::abs(oracle_r[0] - (1.0 / 3 + h.eps / 6)) <= 1e-12);
    for (std::size_t i = 1; i < oracle_r.size(); ++i) CHECK(std::abs(oracle_r[i] - 1.0 / 3) <= 1e-12);
    const auto analytic = h.analytic_rewards();
    for (std::size_t i = 0; i < oracle_r.size(); ++i) CHECK(std::abs(analytic[i] - oracle_r[i]) <= 1e-12);

    for (std::size_t z = 2; z <= k - 1; ++z) {
      const auto& pz = h.p_prime[z - 2];
      double total = 0;
      for (double x : pz) {
        CHECK(x > 0.0);
        total += x;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
      const double rz = oracle_reward(h.instance, h.menu[z - 1].incentive, pz);
      CHECK(std::abs(rz - (oracle_r[z - 1] + 2 * h.eps / 6)) <= 1e-12);
    }
  }
  CHECK_THROWS(hard_b1(10, 3, 2000));  // T must exceed 4 (K-2)^3
  CHECK_THROWS(hard_b1(2, 3, 1000));
}

TEST_CASE("combinatorial hard family") {
  const HardB2 h = hard_b2(6, 17, 10000);
  CHECK(h.k0 == 4);
  CHECK(h.blocks == 2);
  CHECK(h.x_set.size() == 4);
  CHECK(h.n0 == 5);
  // Radix order: block 1 is the most significant digit.
  CHECK(h.x_set[0] == std::vector<int>{1, 0, 1, 0});
  CHECK(h.x_set[1] == std::vector<int>{1, 0, 0, 1});
  CHECK(h.x_set[2] == std::vector<int>{0, 1, 1, 0});
  for (std::size_t a = 0; a < h.x_set.size(); ++a) CHECK(h.f(h.x_set[a]) == a);

  const double base = 1.0 / 8 + 2.0 / (4.0 * 4);
  for (const auto& x : h.x_set) {
    const auto p = h.distribution(x);
    double total = 0;
    for (double q : p) total += q;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t a = 0; a < h.x_set.size(); ++a) {
      const auto& z = h.x_set[a];
      int overlap = 0;
      for (std::size_t j = 0; j < z.size(); ++j) overlap += z[j] && x[j];
      const double want = base + h.eps / (2.0 * h.blocks) * overlap;
      CHECK(std::abs(oracle_reward(h.instance, h.menu[a].incentive, p) - want) <= 1e-12);
      CHECK(std::abs(h.analytic_reward(x, z) - want) <= 1e-12);
    }
    CHECK(std::abs(h.analytic_reward(x, x) - (base + h.eps / 2)) <= 1e-12);
  }
  const std::vector<int> empty(4, 0);
  CHECK(std::abs(h.analytic_reward(empty, h.x_set[0]) - base) <= 1e-12);
  CHECK_THROWS(hard_b2(6, 10, 1000));
}

TEST_CASE("smooth lower-bound suite") {
  const std::size_t n = 4;
  const double l = 8.0;
  const std::size_t horizon = 100000;
  const double eps = smooth_hard_epsilon(n, l, horizon);
  CHECK(eps == doctest::Approx(std::pow(l - 1, -2.0 / 3) * std::cbrt(double(n)) * std::cbrt(1.0 / horizon)));
  const auto suite = smooth_hard_suite(n, l, horizon);
  CHECK(suite.size() == (n - 1) * static_cast<std::size_t>(std::floor(0.5 / eps)));
  const auto v = hard_instance_rewards(n);
  for (const auto& m : suite) {
    CHECK(m.params.interval * eps + eps <= 0.5 + 1e-12);
    CHECK(expected_smooth_utility(m.model, v, IncentiveVector::zero(n)) ==
          doctest::Approx((n - 1) / (16.0 * n)).epsilon(1e-14));
    const double mid = m.params.interval * eps + eps / 2;
    const double peak = expected_smooth_utility(m.model, v, IncentiveVector::single(n, m.params.arm, mid));
    CHECK(peak - (n - 1) / (16.0 * n) >= (l - 1) * eps / 16 - 1e-12);
  }
}

TEST_CASE("random instances") {
  RandomStream a = StreamSplitter(3).stream("instance"), b = StreamSplitter(3).stream("instance");
  const auto x = random_greedy_instance(4, 3, a), y = random_greedy_instance(4, 3, b);
  CHECK(x == y);
  for (const auto& row : x.preferences())
    for (double m : row) CHECK(std::abs(m * 1000 - std::round(m * 1000)) < 1e-9);
}
