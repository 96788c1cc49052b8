#pragma once

// Reverse-time queries on the percolation structure. A reverse path from
// (z,t) moves down the timeline of z and may jump across arrows pointing into
// its current site; the voter-admissible one jumps across every such arrow.
//
// Arrow order matters only for exact replays: "before (s, e)" means every
// arrow that the forward engines process before arrow e at time s.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ocm/models.hpp"
#include "ocm/percolation.hpp"

namespace ocm {

/// A directed path occupies `site` on the time interval [enter, exit].
struct PathSegment {
  Site site;
  double enter = 0.0;
  double exit = 0.0;
};

struct VoterPathTrace {
  Site origin;
  double time = 0.0;
  std::vector<PathSegment> segments;  // from (origin, time) down to time 0
  Site terminus;
};

struct AncestorSet {
  Site origin;
  double time = 0.0;
  std::vector<Site> members;  // sorted
};

class DualEngine {
 public:
  explicit DualEngine(const EventWindow& window);

  const EventWindow& window() const noexcept { return window_; }

  VoterPathTrace trace_voter_path(Site z, double t) const;

  /// Color of (z,t) in a hostile model: the initial color of the voter path's terminus.
  CellState voter_color(Site z, double t, const LatticeState& init) const;

  /// Color of (z,t) in the competition (or Richardson) model started from
  /// `init`, by backward recursion over inbound arrows. Results are memoized
  /// per (site, arrow) for the current `init`; a different `init` resets the cache.
  CellState competition_color(Site z, double t, const LatticeState& init);

  /// Initially occupied sites from which a directed path reaches (z,t).
  AncestorSet potential_ancestors(Site z, double t, const LatticeState& init) const;

  void set_depth_limit(std::size_t frames) noexcept { depth_limit_ = frames; }
  std::size_t memo_size() const noexcept { return memo_.size(); }

 private:
  // Upper bound on arrow order: arrows strictly before (time, edge); a missing
  // edge admits every arrow at `time` itself.
  struct Bound {
    double time;
    std::optional<DirectedEdge> edge;
  };
  struct MemoKey {
    Site site;
    double time;
    Direction direction;
    bool operator==(const MemoKey&) const = default;
  };
  struct MemoHash {
    std::size_t operator()(const MemoKey& k) const noexcept;
  };

  void check_query(Site z, double t) const;
  std::optional<ArrowEvent> last_on_edge(const DirectedEdge& e, const Bound& b) const;
  std::optional<ArrowEvent> last_inbound(Site v, const Bound& b) const;

  EventWindow window_;
  ArrowField field_;
  std::unordered_map<MemoKey, CellState, MemoHash> memo_;
  std::optional<LatticeState> memo_init_;
  std::size_t depth_limit_ = 50'000'000;
};

VoterPathTrace trace_voter_path(const EventWindow& window, Site z, double t);
CellState voter_color(const EventWindow& window, Site z, double t, const LatticeState& init);
CellState competition_color(const EventWindow& window, Site z, double t, const LatticeState& init);
AncestorSet potential_ancestors(const EventWindow& window, Site z, double t, const LatticeState& init);

/// site_x,site_y,t_enter,t_exit in forward time, one row per segment.
void write_trace_csv(std::ostream& out, const VoterPathTrace& trace);

}  // namespace ocm
