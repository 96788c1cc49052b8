#pragma once

// Independent reference implementations used by the tests. They share only
// the random environment with the library (arrow times, edge weights) and
// recompute everything else by brute force.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "ocm/fpp.hpp"
#include "ocm/models.hpp"
#include "ocm/percolation.hpp"

namespace oracle {

using ocm::ArrowEvent;
using ocm::Box;
using ocm::CellState;
using ocm::DirectedEdge;
using ocm::Direction;
using ocm::ModelKind;
using ocm::Site;

inline bool occupied(CellState s) { return s == CellState::Red || s == CellState::Blue; }

inline bool hostile(ModelKind k) { return k == ModelKind::HostileGrowth || k == ModelKind::HostileCompetition; }

/// Dense grid indexed by (x, y) with the model's default everywhere.
struct Grid {
  Box box;
  ModelKind kind;
  std::vector<CellState> cells;

  Grid(ModelKind k, Box b) : box(b), kind(k), cells(b.site_count(), hostile(k) ? CellState::White : CellState::Vacant) {
    cells[idx({0, 0})] = CellState::Vacant;
  }
  std::size_t idx(Site s) const { return static_cast<std::size_t>(s.x) * (box.max_y + 1) + s.y; }
  CellState& operator[](Site s) { return cells[idx(s)]; }
  CellState operator[](Site s) const { return cells[idx(s)]; }
};

/// Default initial configuration written out by hand.
inline Grid initial(ModelKind kind, Box box) {
  Grid g(kind, box);
  switch (kind) {
    case ModelKind::Richardson:
      g[{1, 0}] = CellState::Red;
      g[{0, 1}] = CellState::Red;
      break;
    case ModelKind::HostileGrowth:
      g[{1, 0}] = CellState::Black;
      g[{0, 1}] = CellState::Black;
      break;
    default:
      g[{1, 0}] = CellState::Red;
      g[{0, 1}] = CellState::Blue;
  }
  return g;
}

inline Site target(const DirectedEdge& e) {
  return e.direction == Direction::East ? Site{e.source.x + 1, e.source.y} : Site{e.source.x, e.source.y + 1};
}

/// Applies one arrow with the copy rule of the model.
inline void fire(Grid& g, const ArrowEvent& ev) {
  const CellState from = g[ev.edge.source];
  if (hostile(g.kind) || occupied(from)) g[target(ev.edge)] = from;
}

/// Replays the full event stream of [0,side]^2 x [0,t] in processing order.
inline Grid replay(std::uint64_t seed, ModelKind kind, std::int32_t side, double t) {
  Grid g = initial(kind, Box::square(side));
  for (const ArrowEvent& ev : ocm::window_events(ocm::EventWindow{seed, side, t})) fire(g, ev);
  return g;
}

/// Replays the stream and records the state of `site` at each of the sorted `times`.
inline std::vector<CellState> replay_at(std::uint64_t seed, ModelKind kind, std::int32_t side, double horizon,
                                        Site site, const std::vector<double>& times) {
  Grid g = initial(kind, Box::square(side));
  std::vector<CellState> out;
  std::size_t k = 0;
  for (const ArrowEvent& ev : ocm::window_events(ocm::EventWindow{seed, side, horizon})) {
    while (k < times.size() && times[k] < ev.time) {
      out.push_back(g[site]);
      ++k;
    }
    fire(g, ev);
  }
  while (k < times.size()) {
    out.push_back(g[site]);
    ++k;
  }
  return out;
}

/// Sites reachable from `start` at time 0 by directed space-time paths ending by time t.
inline std::set<Site> forward_reach(const std::vector<ArrowEvent>& events, Site start, double t) {
  std::set<Site> reached{start};
  for (const ArrowEvent& ev : events) {
    if (ev.time > t) break;
    if (reached.count(ev.edge.source)) reached.insert(target(ev.edge));
  }
  return reached;
}

/// Initially occupied sites whose forward reach contains z at time t.
inline std::vector<Site> ancestors(const std::vector<ArrowEvent>& events, const std::vector<Site>& occupied_sites,
                                   Site z, double t) {
  std::vector<Site> out;
  for (Site a : occupied_sites)
    if (forward_reach(events, a, t).count(z)) out.push_back(a);
  std::sort(out.begin(), out.end());
  return out;
}

/// Minimum weight over every oriented path from any source to every site,
/// found by explicit depth-first enumeration of the paths.
inline std::map<Site, double> enumerate_passage(const ocm::EdgeWeights& w, const std::vector<Site>& sources) {
  std::map<Site, double> best;
  const Box box = w.box();
  std::vector<std::pair<Site, double>> stack;
  for (Site s : sources)
    if (box.contains(s)) stack.push_back({s, 0.0});
  while (!stack.empty()) {
    const auto [s, cost] = stack.back();
    stack.pop_back();
    auto it = best.find(s);
    if (it == best.end() || cost < it->second) best[s] = cost;
    if (s == Site{0, 0}) continue;
    if (s.x < box.max_x) stack.push_back({{s.x + 1, s.y}, cost + w.weight({s, Direction::East})});
    if (s.y < box.max_y) stack.push_back({{s.x, s.y + 1}, cost + w.weight({s, Direction::North})});
  }
  return best;
}

}  // namespace oracle
