#pragma once

// The percolation structure: an independent rate-1 Poisson arrow process on
// every directed edge x -> x+(1,0) and x -> x+(0,1) of the first quadrant,
// with the origin excluded as a source.
//
// Arrow times of one edge are generated in unit-length time blocks. Block k of
// edge e holds a Poisson(1) number of uniform points in [k, k+1), all derived
// from hash(seed, e, k, j). Any block of any edge is therefore computable in
// O(1) without touching the rest of the structure, which is what lets the
// forward engines seek "next arrow after t" and the dual engines seek "last
// arrow before t" directly.

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <span>
#include <vector>

namespace ocm {

struct Site {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend constexpr auto operator<=>(const Site&, const Site&) = default;
};

inline constexpr Site kOrigin{0, 0};

enum class Direction : std::uint8_t { East = 0, North = 1 };

char direction_letter(Direction d);

struct DirectedEdge {
  Site source;
  Direction direction = Direction::East;

  constexpr Site target() const noexcept {
    return direction == Direction::East ? Site{source.x + 1, source.y} : Site{source.x, source.y + 1};
  }

  /// Lexicographic on (source.x, source.y, direction); this is the tiebreak
  /// order for simultaneous arrows.
  friend constexpr auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
};

/// True for edges of the structure: non-negative source that is not the origin.
bool is_structure_edge(const DirectedEdge& e) noexcept;

/// The (at most two) structure edges pointing into `site`, in edge order.
struct InEdges {
  std::array<DirectedEdge, 2> edges{};
  std::size_t count = 0;

  const DirectedEdge* begin() const noexcept { return edges.data(); }
  const DirectedEdge* end() const noexcept { return edges.data() + count; }
};
InEdges in_edges(Site site) noexcept;

struct ArrowEvent {
  double time = 0.0;
  DirectedEdge edge;

  /// Processing order: by time, ties broken by edge.
  friend constexpr auto operator<=>(const ArrowEvent&, const ArrowEvent&) = default;
};

/// Inclusive rectangle [0,max_x] x [0,max_y].
struct Box {
  std::int32_t max_x = 0;
  std::int32_t max_y = 0;

  static constexpr Box square(std::int32_t side) noexcept { return Box{side, side}; }

  constexpr bool contains(Site s) const noexcept {
    return s.x >= 0 && s.y >= 0 && s.x <= max_x && s.y <= max_y;
  }
  constexpr bool on_outer_boundary(Site s) const noexcept { return s.x == max_x || s.y == max_y; }
  constexpr std::size_t site_count() const noexcept {
    return static_cast<std::size_t>(max_x + 1) * static_cast<std::size_t>(max_y + 1);
  }
  constexpr std::size_t index(Site s) const noexcept {
    return static_cast<std::size_t>(s.x) * static_cast<std::size_t>(max_y + 1) + static_cast<std::size_t>(s.y);
  }
  constexpr Site site(std::size_t index) const noexcept {
    const auto stride = static_cast<std::size_t>(max_y + 1);
    return Site{static_cast<std::int32_t>(index / stride), static_cast<std::int32_t>(index % stride)};
  }
  friend constexpr bool operator==(const Box&, const Box&) = default;
};

/// Finite truncation of the structure: square box [0,side]^2 up to `horizon`.
struct EventWindow {
  std::uint64_t seed = 0;
  std::int32_t side = 1;
  double horizon = 0.0;

  Box box() const noexcept { return Box::square(side); }
  /// Throws InvalidArgument unless side >= 1 and horizon >= 0.
  void validate() const;
  /// Structure edge with both endpoints in the box.
  bool contains(const DirectedEdge& e) const noexcept;
};

/// Arrow times of one edge within a single unit block [k, k+1), ascending.
struct BlockArrows {
  static constexpr std::size_t kCapacity = 24;
  std::array<double, kCapacity> times{};
  std::size_t count = 0;

  std::span<const double> view() const noexcept { return {times.data(), count}; }
};

/// Pure view of the arrow processes for one master seed.
class ArrowField {
 public:
  explicit ArrowField(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  BlockArrows block(const DirectedEdge& e, std::int64_t k) const noexcept;

  /// All arrow times in (0, horizon], ascending.
  std::vector<double> times(const DirectedEdge& e, double horizon) const;

  /// First arrow time >= t (or > t when `strict`); never empty for t >= 0.
  double first_from(const DirectedEdge& e, double t, bool strict) const noexcept;

  /// Last arrow time < t (or <= t when `inclusive`), if any.
  std::optional<double> last_before(const DirectedEdge& e, double t, bool inclusive) const noexcept;

 private:
  std::uint64_t seed_;
};

/// Arrow times of one edge in (0, horizon]. Horizon must be >= 0.
std::vector<double> edge_events(std::uint64_t seed, const DirectedEdge& edge, double horizon);

/// Replayable merged stream of every arrow of the window, in processing order.
class EventStream {
 public:
  explicit EventStream(const EventWindow& window);

  std::optional<ArrowEvent> next();

 private:
  struct Cursor {
    DirectedEdge edge;
    BlockArrows arrows;
    std::int64_t block = 0;
    std::size_t position = 0;
  };
  struct Head {
    ArrowEvent event;
    std::size_t cursor;
  };
  struct Later {
    bool operator()(const Head& a, const Head& b) const noexcept { return b.event < a.event; }
  };

  void push_next(std::size_t index);

  EventWindow window_;
  ArrowField field_;
  std::vector<Cursor> cursors_;
  std::priority_queue<Head, std::vector<Head>, Later> heap_;
};

std::vector<ArrowEvent> window_events(const EventWindow& window);

/// Arrows of the window whose target is `site`, in processing order.
std::vector<ArrowEvent> inbound_events(const EventWindow& window, Site site);

/// Debug dump: time,source_x,source_y,direction with direction in {E,N}.
void write_events_csv(std::ostream& out, std::span<const ArrowEvent> events);

}  // namespace ocm
