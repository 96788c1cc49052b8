#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "ocm/dual.hpp"
#include "ocm/error.hpp"
#include "ocm/rng.hpp"
#include "oracles.hpp"

using namespace ocm;

namespace {

struct Query {
  Site z;
  double t;
};

std::vector<Query> sample_queries(std::uint64_t seed, std::int32_t side, double horizon, std::size_t count) {
  rng::SplitMix g(seed);
  std::vector<Query> qs;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = horizon * g.uniform();
    qs.push_back({Site{static_cast<std::int32_t>(g.below(side + 1)), static_cast<std::int32_t>(g.below(side + 1))}, t});
  }
  std::sort(qs.begin(), qs.end(), [](const Query& a, const Query& b) { return a.t < b.t; });
  return qs;
}

}  // namespace

TEST_SUITE("dual") {
  TEST_CASE("voter and competition colors equal the replay oracle") {
    const std::int32_t side = 10;
    const double horizon = 8.0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      DualEngine dual(EventWindow{seed, side, horizon});
      const auto qs = sample_queries(seed * 31, side, horizon, 60);
      for (ModelKind k : kAllModelKinds) {
        const LatticeState init = init_default(k, Box::square(side));
        for (const Query& q : qs) {
          const CellState want = oracle::replay_at(seed, k, side, horizon, q.z, {q.t})[0];
          const CellState got = is_hostile(k) ? dual.voter_color(q.z, q.t, init) : dual.competition_color(q.z, q.t, init);
          CHECK(got == want);
        }
      }
    }
  }

  TEST_CASE("potential ancestors equal the brute-force reachability search") {
    const std::int32_t side = 8;
    const double horizon = 6.0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      const EventWindow w{seed, side, horizon};
      const auto events = window_events(w);
      // A random initial occupancy, not only the default pair.
      LatticeState init(ModelKind::Richardson, Box::square(side));
      rng::SplitMix g(seed);
      std::vector<Site> occ;
      for (int i = 0; i < 6; ++i) {
        const Site s{static_cast<std::int32_t>(g.below(side)), static_cast<std::int32_t>(g.below(side))};
        if (s == kOrigin || std::find(occ.begin(), occ.end(), s) != occ.end()) continue;
        init.set(s, CellState::Red);
        occ.push_back(s);
      }
      DualEngine dual(w);
      for (const Query& q : sample_queries(seed + 1000, side, horizon, 25)) {
        const AncestorSet a = dual.potential_ancestors(q.z, q.t, init);
        CHECK(a.members == oracle::ancestors(events, occ, q.z, q.t));
      }
    }
  }

  TEST_CASE("voter path is a chain of segments down to time zero") {
    const EventWindow w{4, 15, 12.0};
    const VoterPathTrace tr = trace_voter_path(w, {9, 7}, 12.0);
    REQUIRE_FALSE(tr.segments.empty());
    CHECK(tr.segments.front().site == Site{9, 7});
    CHECK(tr.segments.front().exit == 12.0);
    CHECK(tr.segments.back().enter == 0.0);
    CHECK(tr.segments.back().site == tr.terminus);
    for (std::size_t i = 1; i < tr.segments.size(); ++i) {
      CHECK(tr.segments[i].exit == tr.segments[i - 1].enter);
      const Site a = tr.segments[i].site;
      const Site b = tr.segments[i - 1].site;
      CHECK((b.x - a.x) + (b.y - a.y) == 1);
    }
  }

  TEST_CASE("no inbound arrows gives a single segment ending at z") {
    const VoterPathTrace tr = trace_voter_path(EventWindow{2, 10, 5.0}, {7, 3}, 1e-9);
    CHECK(tr.segments.size() == 1);
    CHECK(tr.terminus == Site{7, 3});
    const LatticeState init = init_default(ModelKind::HostileCompetition, Box::square(10));
    CHECK(voter_color(EventWindow{2, 10, 5.0}, {7, 3}, 1e-9, init) == CellState::White);
  }

  TEST_CASE("axis sites trace down the axis") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const VoterPathTrace tr = trace_voter_path(EventWindow{seed, 10, 8.0}, {0, 6}, 8.0);
      CHECK(tr.terminus.x == 0);
      CHECK(tr.terminus.y <= 6);
      CHECK(tr.terminus.y >= 1);
    }
  }

  TEST_CASE("time zero returns the initial color") {
    const EventWindow w{3, 10, 5.0};
    const LatticeState hc = init_default(ModelKind::HostileCompetition, Box::square(10));
    CHECK(voter_color(w, {1, 0}, 0.0, hc) == CellState::Red);
    CHECK(voter_color(w, {4, 4}, 0.0, hc) == CellState::White);
    const LatticeState c = init_default(ModelKind::Competition, Box::square(10));
    CHECK(competition_color(w, {0, 1}, 0.0, c) == CellState::Blue);
    CHECK(competition_color(w, {4, 4}, 0.0, c) == CellState::Vacant);
  }

  TEST_CASE("protected sites keep their color") {
    const LatticeState c = init_default(ModelKind::Competition, Box::square(30));
    const LatticeState hc = init_default(ModelKind::HostileCompetition, Box::square(30));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const EventWindow w{seed, 30, 20.0};
      CHECK(competition_color(w, {1, 0}, 19.0, c) == CellState::Red);
      CHECK(voter_color(w, {1, 0}, 19.0, hc) == CellState::Red);
      CHECK(trace_voter_path(w, {1, 0}, 19.0).terminus == Site{1, 0});
      CHECK(voter_color(w, {0, 1}, 19.0, hc) == CellState::Blue);
    }
  }

  TEST_CASE("ancestor corner cases") {
    const EventWindow w{5, 10, 10.0};
    const LatticeState r = init_default(ModelKind::Richardson, Box::square(10));
    CHECK(potential_ancestors(w, {0, 1}, 9.0, r).members == std::vector<Site>{{0, 1}});
    CHECK(potential_ancestors(w, {1, 0}, 0.0, r).members == std::vector<Site>{{1, 0}});
    CHECK(potential_ancestors(w, {3, 3}, 0.0, r).members.empty());
  }

  TEST_CASE("queries outside the window are rejected") {
    const EventWindow w{5, 10, 10.0};
    const LatticeState r = init_default(ModelKind::Competition, Box::square(10));
    CHECK_THROWS_AS(trace_voter_path(w, {11, 0}, 1.0), Error);
    CHECK_THROWS_AS(competition_color(w, {1, 1}, 10.5, r), Error);
    CHECK_THROWS_AS(competition_color(w, {1, 1}, -1.0, r), Error);
  }

  TEST_CASE("depth cap raises an explicit error") {
    DualEngine dual(EventWindow{6, 40, 30.0});
    dual.set_depth_limit(3);
    const LatticeState init = init_default(ModelKind::Competition, Box::square(40));
    try {
      dual.competition_color({20, 20}, 30.0, init);
      FAIL("expected a depth error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DepthExceeded);
    }
  }

  TEST_CASE("memo survives repeated queries and resets on a new init") {
    DualEngine dual(EventWindow{6, 20, 10.0});
    const LatticeState a = init_default(ModelKind::Competition, Box::square(20));
    const CellState first = dual.competition_color({8, 8}, 10.0, a);
    const std::size_t size = dual.memo_size();
    CHECK(dual.competition_color({8, 8}, 10.0, a) == first);
    CHECK(dual.memo_size() == size);
    LatticeState b(ModelKind::Competition, Box::square(20));
    b.set({1, 0}, CellState::Blue);
    b.set({0, 1}, CellState::Blue);
    const CellState other = dual.competition_color({8, 8}, 10.0, b);
    CHECK((other == CellState::Blue || other == CellState::Vacant));
  }

  TEST_CASE("trace CSV lists segments in forward time") {
    std::ostringstream out;
    write_trace_csv(out, trace_voter_path(EventWindow{1, 5, 4.0}, {3, 3}, 4.0));
    const std::string s = out.str();
    CHECK(s.rfind("site_x,site_y,t_enter,t_exit\n", 0) == 0);
    CHECK(s.find("3,3,") != std::string::npos);
  }
}
