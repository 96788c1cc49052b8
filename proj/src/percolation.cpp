#include "ocm/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ocm/error.hpp"
#include "ocm/format.hpp"
#include "ocm/rng.hpp"

namespace ocm {

namespace {

std::uint64_t edge_word(const DirectedEdge& e) noexcept {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.source.x)) << 33) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.source.y)) << 1) |
         static_cast<std::uint64_t>(e.direction);
}

// Poisson(1) by inversion of a single uniform.
std::size_t poisson_one(double u) noexcept {
  double p = std::exp(-1.0);
  double cdf = p;
  std::size_t n = 0;
  while (u > cdf && n + 1 < BlockArrows::kCapacity) {
    ++n;
    p /= static_cast<double>(n);
    cdf += p;
  }
  return n;
}

}  // namespace

char direction_letter(Direction d) { return d == Direction::East ? 'E' : 'N'; }

bool is_structure_edge(const DirectedEdge& e) noexcept {
  return e.source.x >= 0 && e.source.y >= 0 && e.source != kOrigin;
}

InEdges in_edges(Site site) noexcept {
  InEdges out;
  if (site.x >= 1) {
    DirectedEdge e{{site.x - 1, site.y}, Direction::East};
    if (is_structure_edge(e)) out.edges[out.count++] = e;
  }
  if (site.y >= 1) {
    DirectedEdge e{{site.x, site.y - 1}, Direction::North};
    if (is_structure_edge(e)) out.edges[out.count++] = e;
  }
  // East edge from (x-1,y) sorts before North edge from (x,y-1) since x-1 < x.
  return out;
}

void EventWindow::validate() const {
  require(side >= 1, ErrorCode::InvalidArgument, "event window side must be >= 1");
  require(horizon >= 0.0 && std::isfinite(horizon), ErrorCode::InvalidArgument,
          "event window horizon must be finite and >= 0");
}

bool EventWindow::contains(const DirectedEdge& e) const noexcept {
  return is_structure_edge(e) && box().contains(e.source) && box().contains(e.target());
}

BlockArrows ArrowField::block(const DirectedEdge& e, std::int64_t k) const noexcept {
  BlockArrows out;
  const std::uint64_t ew = edge_word(e);
  const auto kw = static_cast<std::uint64_t>(k);
  out.count = poisson_one(rng::uniform_open(rng::hash(seed_, rng::Stream::Arrows, ew, kw, 0u)));
  const auto base = static_cast<double>(k);
  for (std::size_t j = 0; j < out.count; ++j)
    out.times[j] = base + rng::uniform_open(rng::hash(seed_, rng::Stream::Arrows, ew, kw, j + 1));
  std::sort(out.times.begin(), out.times.begin() + static_cast<std::ptrdiff_t>(out.count));
  return out;
}

std::vector<double> ArrowField::times(const DirectedEdge& e, double horizon) const {
  std::vector<double> out;
  if (!(horizon > 0.0)) return out;
  const auto last = static_cast<std::int64_t>(std::floor(horizon));
  for (std::int64_t k = 0; k <= last; ++k) {
    for (double t : block(e, k).view()) {
      if (t > horizon) return out;
      out.push_back(t);
    }
  }
  return out;
}

double ArrowField::first_from(const DirectedEdge& e, double t, bool strict) const noexcept {
  auto k = static_cast<std::int64_t>(std::floor(std::max(t, 0.0)));
  for (;; ++k) {
    for (double s : block(e, k).view())
      if (strict ? s > t : s >= t) return s;
  }
}

std::optional<double> ArrowField::last_before(const DirectedEdge& e, double t, bool inclusive) const noexcept {
  if (!(t > 0.0)) return std::nullopt;
  for (auto k = static_cast<std::int64_t>(std::floor(t)); k >= 0; --k) {
    const BlockArrows b = block(e, k);
    for (std::size_t j = b.count; j-- > 0;) {
      const double s = b.times[j];
      if (inclusive ? s <= t : s < t) return s;
    }
  }
  return std::nullopt;
}

std::vector<double> edge_events(std::uint64_t seed, const DirectedEdge& edge, double horizon) {
  require(horizon >= 0.0, ErrorCode::InvalidArgument, "horizon must be >= 0");
  require(is_structure_edge(edge), ErrorCode::InvalidArgument, "not an edge of the percolation structure");
  return ArrowField(seed).times(edge, horizon);
}

EventStream::EventStream(const EventWindow& window) : window_(window), field_(window.seed) {
  window_.validate();
  for (std::int32_t x = 0; x <= window_.side; ++x) {
    for (std::int32_t y = 0; y <= window_.side; ++y) {
      for (Direction d : {Direction::East, Direction::North}) {
        DirectedEdge e{{x, y}, d};
        if (!window_.contains(e)) continue;
        Cursor c;
        c.edge = e;
        c.block = 0;
        c.arrows = field_.block(e, 0);
        cursors_.push_back(c);
        push_next(cursors_.size() - 1);
      }
    }
  }
}

void EventStream::push_next(std::size_t index) {
  Cursor& c = cursors_[index];
  while (c.position >= c.arrows.count) {
    ++c.block;
    if (static_cast<double>(c.block) > window_.horizon) return;
    c.arrows = field_.block(c.edge, c.block);
    c.position = 0;
  }
  const double t = c.arrows.times[c.position++];
  if (t > window_.horizon) return;
  heap_.push(Head{ArrowEvent{t, c.edge}, index});
}

std::optional<ArrowEvent> EventStream::next() {
  if (heap_.empty()) return std::nullopt;
  const Head h = heap_.top();
  heap_.pop();
  push_next(h.cursor);
  return h.event;
}

std::vector<ArrowEvent> window_events(const EventWindow& window) {
  EventStream stream(window);
  std::vector<ArrowEvent> out;
  while (auto e = stream.next()) out.push_back(*e);
  return out;
}

std::vector<ArrowEvent> inbound_events(const EventWindow& window, Site site) {
  window.validate();
  require(window.box().contains(site), ErrorCode::OutOfBox, "site outside the event window");
  std::vector<ArrowEvent> out;
  const ArrowField field(window.seed);
  for (const DirectedEdge& e : in_edges(site))
    for (double t : field.times(e, window.horizon)) out.push_back(ArrowEvent{t, e});
  std::sort(out.begin(), out.end());
  return out;
}

void write_events_csv(std::ostream& out, std::span<const ArrowEvent> events) {
  out << "time,source_x,source_y,direction\n";
  for (const ArrowEvent& e : events) {
    out << format_real(e.time) << ',' << e.edge.source.x << ',' << e.edge.source.y << ','
        << direction_letter(e.edge.direction) << '\n';
  }
}

}  // namespace ocm
