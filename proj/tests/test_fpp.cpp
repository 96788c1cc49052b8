#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ocm/error.hpp"
#include "ocm/fpp.hpp"
#include "oracles.hpp"

using namespace ocm;

namespace {

const std::vector<Site> kSources{{1, 0}, {0, 1}};

void check_dp_against_paths(std::uint64_t seed, const Box& box, const std::vector<Site>& sources) {
  const EdgeWeights w = sample_weights(seed, box);
  const PassageField f = passage_times(w, sources);
  const auto best = oracle::enumerate_passage(w, sources);
  for (std::size_t i = 0; i < box.site_count(); ++i) {
    const Site s = box.site(i);
    const auto it = best.find(s);
    if (it == best.end()) {
      CHECK_FALSE(f.at(s).has_value());
    } else {
      REQUIRE(f.at(s).has_value());
      CHECK(*f.at(s) == it->second);
    }
  }
}

}  // namespace

TEST_SUITE("fpp") {
  TEST_CASE("weights are positive and reproducible") {
    const EdgeWeights a = sample_weights(3, Box::square(6));
    const EdgeWeights b = sample_weights(3, Box::square(6));
    for (std::int32_t x = 0; x < 6; ++x)
      for (std::int32_t y = 0; y <= 6; ++y) {
        if (x == 0 && y == 0) continue;
        CHECK(a.east({x, y}) > 0.0);
        CHECK(a.east({x, y}) == b.east({x, y}));
        CHECK(a.weight({{x, y}, Direction::East}) == edge_weight(3, {{x, y}, Direction::East}));
      }
  }

  TEST_CASE("weight lookups are checked") {
    const EdgeWeights w = sample_weights(3, Box::square(4));
    CHECK_THROWS_AS(w.weight({{4, 0}, Direction::East}), Error);
    CHECK_THROWS_AS(w.weight({{0, 0}, Direction::East}), Error);
  }

  TEST_CASE("mean edge weight is one") {
    const std::size_t n = 1000000;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      total += edge_weight(17, {{static_cast<std::int32_t>(1 + i % 1000), static_cast<std::int32_t>(i / 1000)},
                                Direction::North});
    CHECK(std::abs(total / n - 1.0) <= 0.01);
  }

  TEST_CASE("dynamic program equals path enumeration on 5x5") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) check_dp_against_paths(seed, Box::square(5), kSources);
  }

  TEST_CASE("dynamic program with other source sets") {
    check_dp_against_paths(4, Box{4, 6}, {{2, 1}});
    check_dp_against_paths(4, Box{6, 3}, {{0, 0}});
    check_dp_against_paths(4, Box{5, 5}, {{0, 3}, {3, 0}, {2, 2}});
  }

  TEST_CASE("frozen passage time on a fixed seed") {
    // Value from the path-enumeration oracle on seed 2024, box 4x4.
    const EdgeWeights w = sample_weights(2024, Box::square(4));
    const auto best = oracle::enumerate_passage(w, kSources);
    CHECK(*passage_times(w, kSources).at({4, 4}) == best.at({4, 4}));
    CHECK(best.at({4, 4}) == doctest::Approx(2.714250654893656).epsilon(1e-15));
  }

  TEST_CASE("sources have time zero and the axis is a plain sum") {
    const EdgeWeights w = sample_weights(8, Box::square(7));
    const PassageField f = passage_times(w, kSources);
    CHECK(*f.at({1, 0}) == 0.0);
    CHECK(*f.at({0, 1}) == 0.0);
    CHECK_FALSE(f.at({0, 0}).has_value());
    double sum = 0.0;
    for (std::int32_t y = 1; y < 6; ++y) sum += w.north({0, y});
    CHECK(*f.at({0, 6}) == doctest::Approx(sum).epsilon(1e-14));
  }

  TEST_CASE("raising one weight never lowers passage times") {
    EdgeWeights w = sample_weights(12, Box::square(6));
    const PassageField before = passage_times(w, kSources);
    w.set_weight({{2, 2}, Direction::East}, 50.0);
    const PassageField after = passage_times(w, kSources);
    for (std::size_t i = 0; i < before.times.size(); ++i)
      if (before.times[i]) CHECK(*after.times[i] >= *before.times[i]);
  }

  TEST_CASE("passage CSV marks unreachable sites") {
    const EdgeWeights w = sample_weights(1, Box::square(1));
    std::ostringstream out;
    write_passage_csv(out, passage_times(w, kSources));
    CHECK(out.str().rfind("x,y,T\n0,0,inf\n", 0) == 0);
  }

  TEST_CASE("mu along the axis is one") {
    const MuEstimate m = mu_estimate(1, {1.0, 0.0}, 1000, 20);
    CHECK(m.target == Site{1000, 0});
    CHECK(std::abs(m.summary.mean - 1.0) <= 0.05);
  }

  TEST_CASE("mu is symmetric under exchanging the axes") {
    const MuEstimate a = mu_estimate(2, {1.0, 0.0}, 200, 30);
    const MuEstimate b = mu_estimate(2, {0.0, 1.0}, 200, 30);
    const double se = std::hypot(a.summary.stderr_mean, b.summary.stderr_mean);
    CHECK(std::abs(a.summary.mean - b.summary.mean) <= 3 * se);
  }

  TEST_CASE("mu on the diagonal is strictly below one") {
    const MuEstimate m = mu_estimate(3, {1.0, 1.0}, 500, 50);
    CHECK(m.summary.mean < 0.97);
    CHECK(m.summary.ci_high() < 1.0);
  }

  TEST_CASE("mu_estimate argument errors") {
    CHECK_THROWS_AS(mu_estimate(1, {0.0, 0.0}, 10, 2), Error);
    CHECK_THROWS_AS(mu_estimate(1, {1.0, 0.0}, 0, 2), Error);
    CHECK_THROWS_AS(mu_estimate(1, {1.0, 0.0}, 10, 0), Error);
    try {
      mu_estimate(1, {1.0, 1.0}, 30000, 1);
      FAIL("expected a sizing error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Sizing);
    }
  }

  TEST_CASE("fastest two-step path on a hand-made block") {
    const TwoStepBlock w{1, 2, 3, 4, 5, 6};
    const TwoStepChoice c = fastest_two_step(w);
    CHECK(c.displacement == Site{2, 0});
    CHECK(c.time == 4.0);
    CHECK(greedy_two_step_time(w) == 4.0);
    const TwoStepBlock v{5, 1, 9, 1, 9, 9};
    CHECK(fastest_two_step(v).displacement == Site{1, 1});
    CHECK(fastest_two_step(v).time == 6.0);
    CHECK(greedy_two_step_time(v) == 10.0);
  }

  TEST_CASE("greedy time is never below the fastest time") {
    for (std::uint64_t k = 0; k < 10000; ++k) {
      const TwoStepBlock b = two_step_block(9, k);
      const double g = greedy_two_step_time(b);
      CHECK(g > 0.0);
      CHECK(g >= fastest_two_step(b).time);
    }
  }

  TEST_CASE("first walk step frequencies are 1/4, 1/2, 1/4") {
    const std::size_t n = 100000;
    const DiagonalWalkStats w = diagonal_walk(5, n);
    double f20 = 0, f11 = 0, f02 = 0;
    for (Site d : w.displacements) {
      f20 += d == Site{2, 0};
      f11 += d == Site{1, 1};
      f02 += d == Site{0, 2};
    }
    CHECK(f20 + f11 + f02 == static_cast<double>(n));
    const auto near = [&](double count, double p) {
      return std::abs(count / n - p) <= 3 * std::sqrt(p * (1 - p) / n);
    };
    CHECK(near(f20, 0.25));
    CHECK(near(f11, 0.5));
    CHECK(near(f02, 0.25));
  }

  TEST_CASE("mean fastest two-step time is below one") {
    const DiagonalWalkStats w = diagonal_walk(6, 100000);
    const stats::Summary s = stats::summarize(w.step_times);
    CHECK(s.ci_high() < 1.0);
    CHECK(w.partial_sums.back() / 100000 < 1.0);
    CHECK(w.positions.back().x + w.positions.back().y == 200000);
  }

  TEST_CASE("greedy two-step mean is one") {
    const GreedyStats g = greedy_two_step(7, 100000);
    CHECK(std::abs(g.summary.mean - 1.0) <= 3 * g.summary.stderr_mean);
  }

  TEST_CASE("walk CSV header") {
    std::ostringstream out;
    write_walk_csv(out, diagonal_walk(1, 2));
    CHECK(out.str().rfind("k,Xx,Xy,Tk,Sk\n1,", 0) == 0);
  }

  TEST_CASE("source probe (1,0) has time zero in both engines") {
    const std::vector<Site> probes{{1, 0}, {0, 5}};
    const auto cmp = richardson_equivalence(4, 20, 30.0, probes);
    REQUIRE(cmp.size() == 2);
    for (double v : cmp[0].forward) CHECK(v == 0.0);
    for (double v : cmp[0].fpp) CHECK(v == 0.0);
    CHECK(cmp[1].forward.size() == 20);
  }

  TEST_CASE("axis probe times follow Gamma(k-1,1) in both engines") {
    const std::vector<Site> probes{{0, 10}};
    const auto cmp = richardson_equivalence(10, 400, 60.0, probes);
    const auto cdf = [](double x) { return stats::gamma_cdf(9.0, x); };
    CHECK(stats::ks_pvalue(stats::ks_statistic(cmp[0].forward, cdf), 400) > 0.01);
    CHECK(stats::ks_pvalue(stats::ks_statistic(cmp[0].fpp, cdf), 400) > 0.01);
    CHECK(cmp[0].p_value > 0.01);
  }
}
