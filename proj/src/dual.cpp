#include "ocm/dual.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <queue>
#include <string>

#include "ocm/error.hpp"
#include "ocm/format.hpp"
#include "ocm/rng.hpp"

namespace ocm {

std::size_t DualEngine::MemoHash::operator()(const MemoKey& k) const noexcept {
  return static_cast<std::size_t>(rng::mix64(
      rng::mix64((static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.site.x)) << 32) ^
                 static_cast<std::uint32_t>(k.site.y)) ^
      std::bit_cast<std::uint64_t>(k.time) ^ static_cast<std::uint64_t>(k.direction)));
}

DualEngine::DualEngine(const EventWindow& window) : window_(window), field_(window.seed) { window_.validate(); }

void DualEngine::check_query(Site z, double t) const {
  require(window_.box().contains(z), ErrorCode::OutOfBox, "query site outside the event window");
  require(t >= 0.0 && t <= window_.horizon, ErrorCode::InvalidArgument, "query time outside [0, horizon]");
}

std::optional<ArrowEvent> DualEngine::last_on_edge(const DirectedEdge& e, const Bound& b) const {
  const bool inclusive = !b.edge || e < *b.edge;
  if (auto s = field_.last_before(e, b.time, inclusive)) return ArrowEvent{*s, e};
  return std::nullopt;
}

std::optional<ArrowEvent> DualEngine::last_inbound(Site v, const Bound& b) const {
  std::optional<ArrowEvent> best;
  for (const DirectedEdge& e : in_edges(v)) {
    auto a = last_on_edge(e, b);
    if (a && (!best || *best < *a)) best = a;
  }
  return best;
}

VoterPathTrace DualEngine::trace_voter_path(Site z, double t) const {
  check_query(z, t);
  VoterPathTrace trace{z, t, {}, z};
  Site at = z;
  double top = t;
  Bound bound{t, std::nullopt};
  for (;;) {
    const auto arrow = last_inbound(at, bound);
    if (!arrow) {
      trace.segments.push_back(PathSegment{at, 0.0, top});
      trace.terminus = at;
      return trace;
    }
    trace.segments.push_back(PathSegment{at, arrow->time, top});
    at = arrow->edge.source;
    top = arrow->time;
    bound = Bound{arrow->time, arrow->edge};
  }
}

CellState DualEngine::voter_color(Site z, double t, const LatticeState& init) const {
  require(is_hostile(init.kind()), ErrorCode::InvalidArgument, "voter_color needs a hostile-model initial state");
  return init.at(trace_voter_path(z, t).terminus);
}

CellState DualEngine::competition_color(Site z, double t, const LatticeState& init) {
  require(!is_hostile(init.kind()), ErrorCode::InvalidArgument,
          "competition_color needs an occupancy-model initial state");
  check_query(z, t);
  if (!memo_init_ || !(*memo_init_ == init)) {
    memo_.clear();
    memo_init_ = init;
  }

  // C(v, b): color of v after every inbound arrow before bound b.
  // Let a = (s, w->v) be the last such arrow. Then
  //   C(v, b) = C(w, a)  if that is occupied,
  //           = C(v, a)  otherwise,
  // and C(v, b) = init(v) when there is no such arrow.
  struct Frame {
    Site site;
    ArrowEvent arrow;  // last inbound arrow into `site` under the caller's bound
    int stage;         // 0: need source color, 1: need own earlier color
  };
  auto key_of = [](const Frame& f) { return MemoKey{f.site, f.arrow.time, f.arrow.edge.direction}; };

  // Resolves C(v, b) immediately if possible; otherwise returns the frame to evaluate.
  auto start = [&](Site v, const Bound& b, CellState& out) -> std::optional<Frame> {
    const auto a = last_inbound(v, b);
    if (!a) {
      out = init.at(v);
      return std::nullopt;
    }
    const Frame f{v, *a, 0};
    if (auto it = memo_.find(key_of(f)); it != memo_.end()) {
      out = it->second;
      return std::nullopt;
    }
    return f;
  };

  CellState immediate = CellState::Vacant;
  auto first = start(z, Bound{t, std::nullopt}, immediate);
  if (!first) return immediate;

  std::vector<Frame> stack{*first};
  std::optional<CellState> ret;  // answer of the frame popped last
  auto finish = [&](CellState color) {
    memo_.emplace(key_of(stack.back()), color);
    stack.pop_back();
    ret = color;
  };
  while (!stack.empty()) {
    if (stack.size() > depth_limit_)
      fail(ErrorCode::DepthExceeded, "competition_color recursion exceeded " + std::to_string(depth_limit_) + " frames");
    Frame& f = stack.back();
    const Bound before_arrow{f.arrow.time, f.arrow.edge};
    const Site own = f.site;
    if (f.stage == 0) {
      if (!ret) {
        CellState c;
        if (auto sub = start(f.arrow.edge.source, before_arrow, c)) {
          stack.push_back(*sub);
          continue;
        }
        ret = c;
      }
      const CellState source_color = *ret;
      ret.reset();
      if (is_occupied(source_color)) {
        finish(source_color);
        continue;
      }
      f.stage = 1;
      CellState c;
      if (auto sub = start(own, before_arrow, c)) {
        stack.push_back(*sub);
        continue;
      }
      ret = c;
    }
    const CellState own_color = *ret;
    ret.reset();
    finish(own_color);
  }
  return *ret;
}

AncestorSet DualEngine::potential_ancestors(Site z, double t, const LatticeState& init) const {
  check_query(z, t);
  require(init.box().contains(z), ErrorCode::OutOfBox, "initial state does not cover the query site");

  // Latest reachable position on each timeline of the south-west cone,
  // found by a max-first search over arrow bounds.
  const Box cone{z.x, z.y};
  std::vector<std::optional<Bound>> latest(cone.site_count());
  std::vector<std::uint8_t> done(cone.site_count(), 0);
  auto later = [](const Bound& a, const Bound& b) {
    if (a.time != b.time) return a.time > b.time;
    if (!a.edge || !b.edge) return !a.edge && b.edge.has_value();
    return *b.edge < *a.edge;
  };
  struct Item {
    Bound bound;
    Site site;
  };
  auto cmp = [&](const Item& a, const Item& b) { return later(b.bound, a.bound); };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> queue(cmp);

  latest[cone.index(z)] = Bound{t, std::nullopt};
  queue.push(Item{Bound{t, std::nullopt}, z});
  AncestorSet out{z, t, {}};
  while (!queue.empty()) {
    const Item item = queue.top();
    queue.pop();
    const std::size_t i = cone.index(item.site);
    if (done[i]) continue;
    done[i] = 1;
    if (is_occupied(init.at(item.site))) out.members.push_back(item.site);
    for (const DirectedEdge& e : in_edges(item.site)) {
      const auto a = last_on_edge(e, item.bound);
      if (!a) continue;
      const Bound nb{a->time, a->edge};
      const std::size_t j = cone.index(e.source);
      if (done[j]) continue;
      if (!latest[j] || later(nb, *latest[j])) {
        latest[j] = nb;
        queue.push(Item{nb, e.source});
      }
    }
  }
  std::sort(out.members.begin(), out.members.end());
  return out;
}

VoterPathTrace trace_voter_path(const EventWindow& window, Site z, double t) {
  return DualEngine(window).trace_voter_path(z, t);
}

CellState voter_color(const EventWindow& window, Site z, double t, const LatticeState& init) {
  return DualEngine(window).voter_color(z, t, init);
}

CellState competition_color(const EventWindow& window, Site z, double t, const LatticeState& init) {
  DualEngine dual(window);
  return dual.competition_color(z, t, init);
}

AncestorSet potential_ancestors(const EventWindow& window, Site z, double t, const LatticeState& init) {
  return DualEngine(window).potential_ancestors(z, t, init);
}

void write_trace_csv(std::ostream& out, const VoterPathTrace& trace) {
  out << "site_x,site_y,t_enter,t_exit\n";
  for (const PathSegment& s : trace.segments)
    out << s.site.x << ',' << s.site.y << ',' << format_real(s.enter) << ',' << format_real(s.exit) << '\n';
}

}  // namespace ocm
