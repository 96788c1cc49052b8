#pragma once

// Forward engines for the four models built on one percolation structure:
//   Richardson          Z(t)            occupancy, no colors
//   Competition         R(t), B(t)      occupancy with Red/Blue colors
//   HostileGrowth       Q(t)            every site carries White or Black
//   HostileCompetition  R1(t), B1(t)    every site carries White, Red or Blue
//
// All four obey one arrow rule. When an arrow fires from s to y:
//   occupancy models copy the color of s onto y if s is occupied,
//   hostile models copy the color of s onto y unconditionally.
// Running several kinds against the same arrows gives the exact couplings
// Z = R u B, Q c Z, R1 c R, B1 c B, Q = R1 u B1.

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <queue>
#include <span>
#include <string_view>
#include <vector>

#include "ocm/percolation.hpp"

namespace ocm {

enum class CellState : std::uint8_t { Vacant = 0, Red = 1, Blue = 2, White = 3, Black = 4 };

enum class ModelKind : std::uint8_t { Richardson = 0, Competition = 1, HostileGrowth = 2, HostileCompetition = 3 };

inline constexpr ModelKind kAllModelKinds[] = {ModelKind::Richardson, ModelKind::Competition,
                                               ModelKind::HostileGrowth, ModelKind::HostileCompetition};

std::string_view to_string(ModelKind kind);
std::string_view to_string(CellState state);
/// Accepts the hyphenated CLI names: richardson, competition, hostile-growth, hostile-competition.
ModelKind parse_model_kind(std::string_view name);
CellState parse_cell_state(std::string_view name);

constexpr bool is_hostile(ModelKind kind) noexcept {
  return kind == ModelKind::HostileGrowth || kind == ModelKind::HostileCompetition;
}

/// Richardson stores its occupied sites as Red; it never produces Blue.
constexpr bool is_occupied(CellState s) noexcept { return s == CellState::Red || s == CellState::Blue; }

/// State of a site that the model has never touched. The origin carries no
/// particle in any model and reports Vacant.
constexpr CellState default_state(ModelKind kind, Site site) noexcept {
  if (site == kOrigin) return CellState::Vacant;
  return is_hostile(kind) ? CellState::White : CellState::Vacant;
}

bool is_allowed(ModelKind kind, CellState state) noexcept;

/// CSV token for a state under a given model; Richardson writes "occupied".
std::string_view state_token(ModelKind kind, CellState state);
CellState parse_state_token(ModelKind kind, std::string_view token);

/// Small set of colors used for fattened-set and containment queries.
class ColorSet {
 public:
  constexpr ColorSet() = default;
  constexpr ColorSet(CellState s) : bits_(bit(s)) {}  // NOLINT(google-explicit-constructor)
  constexpr ColorSet(std::initializer_list<CellState> states) {
    for (CellState s : states) bits_ |= bit(s);
  }
  static constexpr ColorSet occupied() { return ColorSet{CellState::Red, CellState::Blue}; }

  constexpr bool contains(CellState s) const noexcept { return (bits_ & bit(s)) != 0; }

 private:
  static constexpr std::uint8_t bit(CellState s) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s)); }
  std::uint8_t bits_ = 0;
};

struct Cell {
  Site site;
  CellState state = CellState::Vacant;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Dense copy of a configuration for scan-heavy analysis.
struct DenseGrid {
  Box box;
  std::vector<CellState> cells;

  CellState at(Site s) const { return cells[box.index(s)]; }
};

/// Configuration of one model at one time. Only sites that differ from the
/// kind's default state are stored, sorted by site.
class LatticeState {
 public:
  LatticeState(ModelKind kind, Box box, double time = 0.0);

  ModelKind kind() const noexcept { return kind_; }
  const Box& box() const noexcept { return box_; }
  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }

  /// Throws OutOfBox for sites outside the box.
  CellState at(Site s) const;
  /// Throws OutOfBox / InvalidArgument for foreign states.
  void set(Site s, CellState state);

  std::span<const Cell> cells() const noexcept { return cells_; }
  std::size_t count(ColorSet colors) const;
  std::vector<Site> sites(ColorSet colors) const;
  DenseGrid dense() const;

  /// Builds from a dense grid; non-default cells only.
  static LatticeState from_grid(ModelKind kind, double time, const Box& box, std::span<const CellState> grid);

  friend bool operator==(const LatticeState&, const LatticeState&) = default;

 private:
  ModelKind kind_;
  Box box_;
  double time_;
  std::vector<Cell> cells_;
};

/// Default configuration: (1,0) Red and (0,1) Blue (Richardson: both
/// occupied; HostileGrowth: both Black); everything else Vacant or White.
LatticeState init_default(ModelKind kind, const Box& box);

/// One arrow applied to a copy of `state`.
LatticeState apply_event(const LatticeState& state, const ArrowEvent& event);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Membership of `point` in the fattened set of sites whose state is in `colors`:
/// some such site lies at L-infinity distance strictly below half_width.
bool fattened_contains(const LatticeState& state, Point point, ColorSet colors, double half_width = 0.5);

/// Box side ceil(3 t_max) + 32 unless overridden.
struct BoxPolicy {
  std::optional<std::int32_t> side;

  std::int32_t side_for(double t_max) const;
};

struct Checkpoint {
  double time = 0.0;
  std::vector<LatticeState> states;  // one per kind, in SnapshotSeries::kinds order
};

struct SnapshotSeries {
  std::uint64_t seed = 0;
  std::vector<ModelKind> kinds;
  Box box;
  double t_max = 0.0;
  std::vector<Checkpoint> checkpoints;
  bool truncated = false;

  /// Index of `kind` in `kinds`; throws InvalidArgument when absent.
  std::size_t kind_index(ModelKind kind) const;
  const LatticeState& state(std::size_t checkpoint, ModelKind kind) const;
};

/// Event-driven forward engine for one or several coupled models.
///
/// Only "live" arrows are scheduled: an edge whose firing would change at
/// least one model. Skipped arrows are no-ops in every model, so the result
/// equals a full replay of the window stream in processing order.
class Engine {
 public:
  using Observer = std::function<void(std::size_t model, Site site, CellState before, CellState after, double time)>;

  /// Initial states must share one box; their times are ignored (start at 0).
  Engine(std::uint64_t seed, std::span<const LatticeState> initial);

  void set_observer(Observer observer) { observer_ = std::move(observer); }

  /// Applies every arrow with time <= t.
  void advance_to(double t);

  double time() const noexcept { return time_; }
  const Box& box() const noexcept { return box_; }
  std::size_t model_count() const noexcept { return kinds_.size(); }
  ModelKind kind(std::size_t model) const { return kinds_.at(model); }
  CellState at(std::size_t model, Site s) const { return grids_[model][box_.index(s)]; }
  LatticeState state(std::size_t model) const;
  /// A non-default state has appeared on the outer box boundary.
  bool truncated() const noexcept { return truncated_; }
  std::uint64_t applied_events() const noexcept { return applied_; }

 private:
  struct Pending {
    double time;
    std::uint32_t edge;
  };
  struct Later {
    bool operator()(const Pending& a, const Pending& b) const noexcept {
      return a.time != b.time ? a.time > b.time : a.edge > b.edge;
    }
  };

  bool live(std::size_t source, std::size_t target) const noexcept;
  void schedule(std::size_t source_index, Direction d);
  void touch(Site s);

  ArrowField field_;
  Box box_;
  std::vector<ModelKind> kinds_;
  std::vector<bool> hostile_;
  std::vector<std::vector<CellState>> grids_;
  std::vector<std::uint8_t> scheduled_;
  std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
  Observer observer_;
  double time_ = 0.0;
  double current_time_ = 0.0;
  std::int64_t current_edge_ = -1;
  bool truncated_ = false;
  std::uint64_t applied_ = 0;
};

/// Single-model run from the default configuration.
SnapshotSeries run(std::uint64_t seed, ModelKind kind, double t_max, std::span<const double> checkpoint_times,
                   const BoxPolicy& policy = {});

/// Several models advanced by the identical arrow stream.
SnapshotSeries coupled_run(std::uint64_t seed, std::span<const ModelKind> kinds, double t_max,
                           std::span<const double> checkpoint_times, const BoxPolicy& policy = {});

}  // namespace ocm
