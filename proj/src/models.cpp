#include "ocm/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ocm/error.hpp"

namespace ocm {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Richardson: return "richardson";
    case ModelKind::Competition: return "competition";
    case ModelKind::HostileGrowth: return "hostile-growth";
    case ModelKind::HostileCompetition: return "hostile-competition";
  }
  return "unknown";
}

std::string_view to_string(CellState state) {
  switch (state) {
    case CellState::Vacant: return "vacant";
    case CellState::Red: return "red";
    case CellState::Blue: return "blue";
    case CellState::White: return "white";
    case CellState::Black: return "black";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : kAllModelKinds)
    if (to_string(k) == name) return k;
  fail(ErrorCode::InvalidArgument, "unknown model '" + std::string(name) + "'");
}

CellState parse_cell_state(std::string_view name) {
  for (CellState s : {CellState::Vacant, CellState::Red, CellState::Blue, CellState::White, CellState::Black})
    if (to_string(s) == name) return s;
  fail(ErrorCode::Parse, "unknown cell state '" + std::string(name) + "'");
}

bool is_allowed(ModelKind kind, CellState state) noexcept {
  switch (kind) {
    case ModelKind::Richardson: return state == CellState::Vacant || state == CellState::Red;
    case ModelKind::Competition: return state == CellState::Vacant || is_occupied(state);
    case ModelKind::HostileGrowth: return state == CellState::White || state == CellState::Black;
    case ModelKind::HostileCompetition: return state == CellState::White || is_occupied(state);
  }
  return false;
}

std::string_view state_token(ModelKind kind, CellState state) {
  if (kind == ModelKind::Richardson && state == CellState::Red) return "occupied";
  return to_string(state);
}

CellState parse_state_token(ModelKind kind, std::string_view token) {
  if (kind == ModelKind::Richardson && token == "occupied") return CellState::Red;
  const CellState s = parse_cell_state(token);
  require(is_allowed(kind, s) || s == CellState::Vacant, ErrorCode::Parse,
          "state '" + std::string(token) + "' is not valid for model " + std::string(to_string(kind)));
  return s;
}

// ---------------------------------------------------------------------------

LatticeState::LatticeState(ModelKind kind, Box box, double time) : kind_(kind), box_(box), time_(time) {
  require(box.max_x >= 0 && box.max_y >= 0, ErrorCode::Sizing, "box must be non-empty");
}

CellState LatticeState::at(Site s) const {
  require(box_.contains(s), ErrorCode::OutOfBox, "site outside the lattice box");
  auto it = std::lower_bound(cells_.begin(), cells_.end(), s, [](const Cell& c, Site v) { return c.site < v; });
  if (it != cells_.end() && it->site == s) return it->state;
  return default_state(kind_, s);
}

void LatticeState::set(Site s, CellState state) {
  require(box_.contains(s), ErrorCode::OutOfBox, "site outside the lattice box");
  require(s != kOrigin || state == CellState::Vacant, ErrorCode::InvalidArgument, "the origin never holds a particle");
  require(s == kOrigin || is_allowed(kind_, state), ErrorCode::InvalidArgument,
          "state " + std::string(to_string(state)) + " is not used by model " + std::string(to_string(kind_)));
  auto it = std::lower_bound(cells_.begin(), cells_.end(), s, [](const Cell& c, Site v) { return c.site < v; });
  const bool present = it != cells_.end() && it->site == s;
  if (state == default_state(kind_, s)) {
    if (present) cells_.erase(it);
  } else if (present) {
    it->state = state;
  } else {
    cells_.insert(it, Cell{s, state});
  }
}

std::size_t LatticeState::count(ColorSet colors) const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [&](const Cell& c) { return colors.contains(c.state); }));
}

std::vector<Site> LatticeState::sites(ColorSet colors) const {
  std::vector<Site> out;
  for (const Cell& c : cells_)
    if (colors.contains(c.state)) out.push_back(c.site);
  return out;
}

DenseGrid LatticeState::dense() const {
  DenseGrid g{box_, std::vector<CellState>(box_.site_count())};
  for (std::size_t i = 0; i < g.cells.size(); ++i) g.cells[i] = default_state(kind_, box_.site(i));
  for (const Cell& c : cells_) g.cells[box_.index(c.site)] = c.state;
  return g;
}

LatticeState LatticeState::from_grid(ModelKind kind, double time, const Box& box, std::span<const CellState> grid) {
  LatticeState out(kind, box, time);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Site s = box.site(i);
    if (grid[i] != default_state(kind, s)) out.cells_.push_back(Cell{s, grid[i]});
  }
  return out;
}

LatticeState init_default(ModelKind kind, const Box& box) {
  require(box.contains(Site{1, 0}) && box.contains(Site{0, 1}), ErrorCode::Sizing,
          "box must contain (1,0) and (0,1)");
  LatticeState s(kind, box, 0.0);
  switch (kind) {
    case ModelKind::Richardson:
      s.set({1, 0}, CellState::Red);
      s.set({0, 1}, CellState::Red);
      break;
    case ModelKind::HostileGrowth:
      s.set({1, 0}, CellState::Black);
      s.set({0, 1}, CellState::Black);
      break;
    case ModelKind::Competition:
    case ModelKind::HostileCompetition:
      s.set({1, 0}, CellState::Red);
      s.set({0, 1}, CellState::Blue);
      break;
  }
  return s;
}

namespace {

// The arrow rule shared by every engine. Returns true when `target` changed.
inline bool copy_along_arrow(bool hostile, CellState source, CellState& target) noexcept {
  if (source == target) return false;
  if (!hostile && source == CellState::Vacant) return false;
  target = source;
  return true;
}

}  // namespace

LatticeState apply_event(const LatticeState& state, const ArrowEvent& event) {
  require(event.time >= state.time(), ErrorCode::InvalidArgument, "event precedes the state time");
  require(is_structure_edge(event.edge), ErrorCode::InvalidArgument, "not an edge of the percolation structure");
  const Site from = event.edge.source;
  const Site to = event.edge.target();
  require(state.box().contains(from) && state.box().contains(to), ErrorCode::OutOfBox, "event outside the box");
  LatticeState out = state;
  CellState target = state.at(to);
  if (copy_along_arrow(is_hostile(state.kind()), state.at(from), target)) out.set(to, target);
  out.set_time(event.time);
  return out;
}

bool fattened_contains(const LatticeState& state, Point p, ColorSet colors, double half_width) {
  // Open squares: a site counts when its L-infinity distance is strictly below half_width.
  const auto lo_x = static_cast<std::int32_t>(std::max(0.0, std::floor(p.x - half_width) + 1));
  const auto hi_x = static_cast<std::int32_t>(std::min<double>(state.box().max_x, std::ceil(p.x + half_width) - 1));
  const auto lo_y = static_cast<std::int32_t>(std::max(0.0, std::floor(p.y - half_width) + 1));
  const auto hi_y = static_cast<std::int32_t>(std::min<double>(state.box().max_y, std::ceil(p.y + half_width) - 1));
  for (std::int32_t x = lo_x; x <= hi_x; ++x)
    for (std::int32_t y = lo_y; y <= hi_y; ++y)
      if (colors.contains(state.at({x, y}))) return true;
  return false;
}

std::int32_t BoxPolicy::side_for(double t_max) const {
  if (side) {
    require(*side >= 1, ErrorCode::Sizing, "box side must be >= 1");
    return *side;
  }
  return static_cast<std::int32_t>(std::ceil(3.0 * t_max)) + 32;
}

std::size_t SnapshotSeries::kind_index(ModelKind kind) const {
  auto it = std::find(kinds.begin(), kinds.end(), kind);
  require(it != kinds.end(), ErrorCode::InvalidArgument,
          "series does not contain model " + std::string(to_string(kind)));
  return static_cast<std::size_t>(it - kinds.begin());
}

const LatticeState& SnapshotSeries::state(std::size_t checkpoint, ModelKind kind) const {
  return checkpoints.at(checkpoint).states.at(kind_index(kind));
}

// ---------------------------------------------------------------------------

Engine::Engine(std::uint64_t seed, std::span<const LatticeState> initial) : field_(seed) {
  require(!initial.empty(), ErrorCode::InvalidArgument, "engine needs at least one model");
  box_ = initial.front().box();
  require(box_.site_count() < (std::size_t{1} << 31), ErrorCode::Sizing, "box too large for the engine");
  for (const LatticeState& s : initial) {
    require(s.box() == box_, ErrorCode::InvalidArgument, "coupled models must share one box");
    kinds_.push_back(s.kind());
    hostile_.push_back(is_hostile(s.kind()));
    std::vector<CellState> grid(box_.site_count());
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = default_state(s.kind(), box_.site(i));
    for (const Cell& c : s.cells()) grid[box_.index(c.site)] = c.state;
    grids_.push_back(std::move(grid));
  }
  scheduled_.assign(2 * box_.site_count(), 0);
  for (const LatticeState& s : initial) {
    for (const Cell& c : s.cells()) {
      if (box_.on_outer_boundary(c.site)) truncated_ = true;
      touch(c.site);
    }
  }
}

bool Engine::live(std::size_t source, std::size_t target) const noexcept {
  for (std::size_t m = 0; m < grids_.size(); ++m) {
    const CellState s = grids_[m][source];
    const CellState d = grids_[m][target];
    if (s == d) continue;
    if (hostile_[m] || s != CellState::Vacant) return true;
  }
  return false;
}

void Engine::schedule(std::size_t source_index, Direction d) {
  const DirectedEdge e{box_.site(source_index), d};
  if (e.source == kOrigin) return;
  const Site to = e.target();
  if (!box_.contains(to)) return;
  const std::size_t id = 2 * source_index + static_cast<std::size_t>(d);
  if (scheduled_[id] || !live(source_index, box_.index(to))) return;
  double next = field_.first_from(e, current_time_, false);
  if (next == current_time_ && static_cast<std::int64_t>(id) <= current_edge_)
    next = field_.first_from(e, current_time_, true);
  scheduled_[id] = 1;
  queue_.push(Pending{next, static_cast<std::uint32_t>(id)});
}

void Engine::touch(Site s) {
  const std::size_t i = box_.index(s);
  schedule(i, Direction::East);
  schedule(i, Direction::North);
  if (s.x >= 1) schedule(box_.index({s.x - 1, s.y}), Direction::East);
  if (s.y >= 1) schedule(box_.index({s.x, s.y - 1}), Direction::North);
}

void Engine::advance_to(double t) {
  while (!queue_.empty() && queue_.top().time <= t) {
    const Pending p = queue_.top();
    queue_.pop();
    scheduled_[p.edge] = 0;
    current_time_ = p.time;
    current_edge_ = p.edge;

    const std::size_t source = p.edge / 2;
    const auto dir = static_cast<Direction>(p.edge % 2);
    const Site from = box_.site(source);
    const Site to = DirectedEdge{from, dir}.target();
    const std::size_t target = box_.index(to);

    bool changed = false;
    for (std::size_t m = 0; m < grids_.size(); ++m) {
      const CellState before = grids_[m][target];
      if (!copy_along_arrow(hostile_[m], grids_[m][source], grids_[m][target])) continue;
      changed = true;
      if (box_.on_outer_boundary(to)) truncated_ = true;
      if (observer_) observer_(m, to, before, grids_[m][target], p.time);
    }
    if (changed) {
      ++applied_;
      touch(to);
    }
  }
  time_ = std::max(time_, t);
}

LatticeState Engine::state(std::size_t model) const {
  return LatticeState::from_grid(kinds_.at(model), time_, box_, grids_[model]);
}

namespace {

void validate_checkpoints(double t_max, std::span<const double> times) {
  require(t_max >= 0.0 && std::isfinite(t_max), ErrorCode::InvalidArgument, "t_max must be finite and >= 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(times[i] >= 0.0 && times[i] <= t_max, ErrorCode::InvalidArgument, "checkpoint outside [0, t_max]");
    require(i == 0 || times[i] > times[i - 1], ErrorCode::InvalidArgument,
            "checkpoint times must be strictly increasing");
  }
}

}  // namespace

SnapshotSeries coupled_run(std::uint64_t seed, std::span<const ModelKind> kinds, double t_max,
                           std::span<const double> checkpoint_times, const BoxPolicy& policy) {
  require(!kinds.empty(), ErrorCode::InvalidArgument, "at least one model kind is required");
  validate_checkpoints(t_max, checkpoint_times);

  SnapshotSeries series;
  series.seed = seed;
  series.kinds.assign(kinds.begin(), kinds.end());
  series.box = Box::square(policy.side_for(t_max));
  series.t_max = t_max;

  std::vector<LatticeState> initial;
  for (ModelKind k : kinds) initial.push_back(init_default(k, series.box));
  Engine engine(seed, initial);
  for (double c : checkpoint_times) {
    engine.advance_to(c);
    Checkpoint cp{c, {}};
    for (std::size_t m = 0; m < kinds.size(); ++m) cp.states.push_back(engine.state(m));
    series.checkpoints.push_back(std::move(cp));
  }
  engine.advance_to(t_max);
  series.truncated = engine.truncated();
  return series;
}

SnapshotSeries run(std::uint64_t seed, ModelKind kind, double t_max, std::span<const double> checkpoint_times,
                   const BoxPolicy& policy) {
  const ModelKind kinds[] = {kind};
  return coupled_run(seed, kinds, t_max, checkpoint_times, policy);
}

}  // namespace ocm
