#include "ocm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ocm/error.hpp"
#include "ocm/format.hpp"
#include "ocm/fpp.hpp"
#include "ocm/rng.hpp"

namespace ocm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double square_boundary_distance(Point p) {
  const bool inside = p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
  if (inside) return std::min({p.x, 1.0 - p.x, p.y, 1.0 - p.y});
  const double dx = std::max({0.0, -p.x, p.x - 1.0});
  const double dy = std::max({0.0, -p.y, p.y - 1.0});
  return std::max(dx, dy);
}

bool in_open_square(Point p) { return p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0; }

}  // namespace

double root_angle(Point p, double scale) { return std::atan2(p.y - scale, p.x - scale); }

double linf_distance_to_ray(Point p, Point root, double angle) {
  const double ax = p.x - root.x;
  const double ay = p.y - root.y;
  const double ux = std::cos(angle);
  const double uy = std::sin(angle);
  auto at = [&](double s) { return std::max(std::abs(ax - s * ux), std::abs(ay - s * uy)); };
  // The objective is convex and piecewise linear in s; its minimum sits at a breakpoint.
  double best = at(0.0);
  auto consider = [&](double num, double den) {
    if (std::abs(den) < 1e-15) return;
    const double s = num / den;
    if (s >= 0.0) best = std::min(best, at(s));
  };
  consider(ax, ux);
  consider(ay, uy);
  consider(ax - ay, ux - uy);
  consider(ax + ay, ux + uy);
  return best;
}

Region Region::unit_square() { return Region(Kind::UnitSquare, 0.0, 0.0); }
Region Region::above_diagonal() { return Region(Kind::AboveDiagonal, 0.0, 0.0); }
Region Region::below_diagonal() { return Region(Kind::BelowDiagonal, 0.0, 0.0); }
Region Region::band_k1(double c) { return Region(Kind::BandBelow, c, 0.0); }
Region Region::band_k2(double c) { return Region(Kind::BandAbove, c, 0.0); }

Region Region::cone(double eps) {
  require(eps > 0.0 && eps < kPi / 4, ErrorCode::InvalidArgument, "cone eps must lie in (0, pi/4)");
  return Region(Kind::Cone, eps, 0.0);
}

Region Region::sector(double center_angle, double measure) {
  require(measure > 0.0 && measure <= 2 * kPi, ErrorCode::InvalidArgument, "sector measure must lie in (0, 2pi]");
  return Region(Kind::Sector, center_angle, measure);
}

Region Region::scaled(const Region& inner, double factor) {
  require(factor > 0.0 && std::isfinite(factor), ErrorCode::InvalidArgument, "scale factor must be positive");
  Region r(Kind::Scaled, factor, 0.0);
  r.left_ = std::make_shared<const Region>(inner);
  return r;
}

Region Region::intersection(const Region& a, const Region& b) {
  Region r(Kind::Intersection, 0.0, 0.0);
  r.left_ = std::make_shared<const Region>(a);
  r.right_ = std::make_shared<const Region>(b);
  return r;
}

bool Region::contains(Point p) const {
  switch (kind_) {
    case Kind::UnitSquare:
      return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
    case Kind::AboveDiagonal:
      return unit_square().contains(p) && p.y > p.x;
    case Kind::BelowDiagonal:
      return unit_square().contains(p) && p.x > p.y;
    case Kind::BandBelow:
      return p.x - p.y > a_;
    case Kind::BandAbove:
      return p.y - p.x > a_;
    case Kind::Cone: {
      if (p.x == 1.0 && p.y == 1.0) return false;
      const double th = root_angle(p);
      return th > -kPi / 2 + a_ && th < kPi - a_;
    }
    case Kind::Sector: {
      if (in_open_square(p) || (p.x == 1.0 && p.y == 1.0)) return false;
      return std::abs(std::remainder(root_angle(p) - a_, 2 * kPi)) <= b_ / 2;
    }
    case Kind::Scaled:
      return left_->contains(Point{p.x / a_, p.y / a_});
    case Kind::Intersection:
      return left_->contains(p) && right_->contains(p);
  }
  return false;
}

double Region::boundary_distance(Point p) const {
  const Point root{1.0, 1.0};
  switch (kind_) {
    case Kind::UnitSquare:
      return square_boundary_distance(p);
    case Kind::AboveDiagonal:
    case Kind::BelowDiagonal:
      return std::min(square_boundary_distance(p), std::abs(p.x - p.y) / 2);
    case Kind::BandBelow:
      return std::abs(p.x - p.y - a_) / 2;
    case Kind::BandAbove:
      return std::abs(p.y - p.x - a_) / 2;
    case Kind::Cone:
      return std::min(linf_distance_to_ray(p, root, -kPi / 2 + a_), linf_distance_to_ray(p, root, kPi - a_));
    case Kind::Sector:
      return std::min({linf_distance_to_ray(p, root, a_ - b_ / 2), linf_distance_to_ray(p, root, a_ + b_ / 2),
                       square_boundary_distance(p)});
    case Kind::Scaled:
      return a_ * left_->boundary_distance(Point{p.x / a_, p.y / a_});
    case Kind::Intersection:
      return std::min(left_->boundary_distance(p), right_->boundary_distance(p));
  }
  return 0.0;
}

std::string Region::describe() const {
  switch (kind_) {
    case Kind::UnitSquare:
      return "Q";
    case Kind::AboveDiagonal:
      return "Q1";
    case Kind::BelowDiagonal:
      return "Q2";
    case Kind::BandBelow:
      return "K1(" + format_real(a_) + ")";
    case Kind::BandAbove:
      return "K2(" + format_real(a_) + ")";
    case Kind::Cone:
      return "cone(" + format_real(a_) + ")";
    case Kind::Sector:
      return "sector(" + format_real(a_) + "," + format_real(b_) + ")";
    case Kind::Scaled:
      return "scaled(" + left_->describe() + "," + format_real(a_) + ")";
    case Kind::Intersection:
      return "intersection(" + left_->describe() + "," + right_->describe() + ")";
  }
  return "?";
}

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

ContainmentReport check_containment(const LatticeState& state, ColorSet colors, const Region& region, double t,
                                    double delta) {
  require(t > 0.0 && std::isfinite(t), ErrorCode::InvalidArgument, "containment scale t must be positive");
  require(delta > 0.0, ErrorCode::InvalidArgument, "margin delta must be positive");
  ContainmentReport report{region.describe(), t, delta, 0, {}, CheckStatus::Inconclusive};
  if (t * delta < 2.0) return report;
  const DenseGrid grid = state.dense();
  const Box& box = grid.box;
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const Site v = box.site(i);
    const Point p{v.x / t, v.y / t};
    if (!region.contains(p) || region.boundary_distance(p) < delta) continue;
    ++report.tested;
    if (!colors.contains(grid.cells[i])) report.violations.push_back(v);
  }
  if (report.tested > 0) report.status = report.violations.empty() ? CheckStatus::Pass : CheckStatus::Fail;
  return report;
}

double outside_fraction(const LatticeState& state, ColorSet colors, const Region& region, double t) {
  require(t > 0.0, ErrorCode::InvalidArgument, "scale t must be positive");
  const DenseGrid grid = state.dense();
  std::size_t total = 0;
  std::size_t outside = 0;
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    if (!colors.contains(grid.cells[i])) continue;
    ++total;
    const Site v = grid.box.site(i);
    if (!region.contains(Point{v.x / t, v.y / t})) ++outside;
  }
  return total == 0 ? 0.0 : static_cast<double>(outside) / static_cast<double>(total);
}

ColorSet shape_colors(ModelKind kind) {
  switch (kind) {
    case ModelKind::HostileGrowth:
      return ColorSet{CellState::Black};
    default:
      return ColorSet::occupied();
  }
}

double square_radius(double angle) { return 1.0 / std::max(std::cos(angle), std::sin(angle)); }

std::vector<double> quadrant_angles(std::size_t count) {
  require(count >= 2, ErrorCode::InvalidArgument, "need at least two angles");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = (kPi / 2) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

namespace {

double grid_boundary_radius(const DenseGrid& grid, ColorSet colors, double angle, double t) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double reach = std::hypot(grid.box.max_x, grid.box.max_y) + 1.0;
  double best = 0.0;
  for (double r = 0.0; r <= reach; r += 0.25) {
    const Site v{static_cast<std::int32_t>(std::lround(r * c)), static_cast<std::int32_t>(std::lround(r * s))};
    if (!grid.box.contains(v)) continue;
    if (colors.contains(grid.at(v))) best = r;
  }
  return best / t;
}

}  // namespace

double boundary_radius(const LatticeState& state, ColorSet colors, double angle, double t) {
  require(t > 0.0, ErrorCode::InvalidArgument, "scale t must be positive");
  return grid_boundary_radius(state.dense(), colors, angle, t);
}

ShapeEstimate shape_from_snapshots(std::span<const SnapshotSeries> series, ModelKind kind,
                                   std::span<const double> angles) {
  require(!series.empty(), ErrorCode::InvalidArgument, "no snapshot series given");
  require(!angles.empty(), ErrorCode::InvalidArgument, "no angles given");
  std::vector<std::vector<double>> radii(angles.size());
  for (const SnapshotSeries& s : series) {
    require(!s.truncated, ErrorCode::Sizing, "truncated run rejected for shape estimation");
    require(!s.checkpoints.empty(), ErrorCode::InvalidArgument, "series has no checkpoints");
    const Checkpoint& cp = s.checkpoints.back();
    require(cp.time > 0.0, ErrorCode::InvalidArgument, "shape needs a checkpoint at positive time");
    const DenseGrid grid = cp.states.at(s.kind_index(kind)).dense();
    for (std::size_t a = 0; a < angles.size(); ++a)
      radii[a].push_back(grid_boundary_radius(grid, shape_colors(kind), angles[a], cp.time));
  }
  ShapeEstimate out{{angles.begin(), angles.end()}, {}, {}, series.size()};
  for (const auto& r : radii) {
    const stats::Summary sum = stats::summarize(r);
    out.radius.push_back(sum.mean);
    out.stddev.push_back(sum.stddev);
  }
  return out;
}

ShapeEstimate shape_from_mu(std::uint64_t seed, std::int64_t n, std::span<const double> angles,
                            std::size_t replicates, std::size_t jobs) {
  ShapeEstimate out{{angles.begin(), angles.end()}, {}, {}, replicates};
  for (std::size_t a = 0; a < angles.size(); ++a) {
    const Point dir{std::max(0.0, std::cos(angles[a])), std::max(0.0, std::sin(angles[a]))};
    const MuEstimate mu = mu_estimate(rng::hash(seed, rng::Stream::Sampling, a), dir, n, replicates, jobs);
    out.radius.push_back(1.0 / mu.summary.mean);
    out.stddev.push_back(mu.summary.stddev / (mu.summary.mean * mu.summary.mean));
  }
  return out;
}

void write_profile_csv(std::ostream& out, const ShapeEstimate& shape) {
  out << "theta,radius,stddev\n";
  for (std::size_t i = 0; i < shape.angles.size(); ++i)
    out << format_real(shape.angles[i]) << ',' << format_real(shape.radius[i]) << ',' << format_real(shape.stddev[i])
        << '\n';
}

CurvatureReport curvature_diagnostic(const ShapeEstimate& shape, double eps, double flat_cap) {
  require(shape.angles.size() == shape.radius.size(), ErrorCode::InvalidArgument, "malformed shape profile");
  require(flat_cap > 0.0, ErrorCode::InvalidArgument, "flat cap must be positive");
  const Region cone = Region::cone(eps);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < shape.angles.size(); ++i)
    pts.push_back(Point{shape.radius[i] * std::cos(shape.angles[i]), shape.radius[i] * std::sin(shape.angles[i])});
  const auto in_cone = std::count_if(pts.begin(), pts.end(), [&](Point p) { return cone.contains(p); });
  require(in_cone >= 32, ErrorCode::InvalidArgument, "curvature needs at least 32 profile samples inside the cone");

  CurvatureReport report{eps, flat_cap, {}};
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    if (!cone.contains(pts[i])) continue;
    const Point a = pts[i - 1];
    const Point b = pts[i];
    const Point c = pts[i + 1];
    const double ab = std::hypot(b.x - a.x, b.y - a.y);
    const double bc = std::hypot(c.x - b.x, c.y - b.y);
    const double ca = std::hypot(a.x - c.x, a.y - c.y);
    const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    const double scale = std::max({ab, bc, ca});
    CurvatureSample s{shape.angles[i], b, std::nullopt, true};
    if (std::abs(cross) > 1e-12 * scale * scale) {
      s.radius = ab * bc * ca / (2.0 * std::abs(cross));
      s.flat = *s.radius > flat_cap;
    }
    report.samples.push_back(s);
  }
  return report;
}

SectorReport sector_arcs(const LatticeState& state, double t, const SectorParams& params) {
  require(state.kind() == ModelKind::Competition || state.kind() == ModelKind::Richardson,
          ErrorCode::InvalidArgument, "sector arcs need an occupancy snapshot");
  require(t > 0.0, ErrorCode::InvalidArgument, "sector scale t must be positive");
  require(params.bins >= 1, ErrorCode::InvalidArgument, "need at least one bin");
  require(params.r_min >= 0.0 && params.r_max > params.r_min, ErrorCode::InvalidArgument, "invalid annulus");
  require(params.purity > 0.5 && params.purity <= 1.0, ErrorCode::InvalidArgument, "purity must lie in (1/2, 1]");
  require(params.min_measure >= 0.0, ErrorCode::InvalidArgument, "min_measure must be non-negative");
  const Box& box = state.box();
  require((1.0 + params.r_max) * t <= std::min(box.max_x, box.max_y), ErrorCode::Sizing,
          "annulus extends beyond the snapshot box");

  SectorReport report;
  report.t = t;
  report.bins = params.bins;
  const double width = report.bin_width();
  std::vector<std::size_t> red(params.bins, 0);
  std::vector<std::size_t> blue(params.bins, 0);
  for (const Cell& c : state.cells()) {
    if (!is_occupied(c.state)) continue;
    if (c.site.x <= t && c.site.y <= t) continue;
    const double dx = c.site.x - t;
    const double dy = c.site.y - t;
    const double r = std::hypot(dx, dy) / t;
    if (r < params.r_min || r > params.r_max) continue;
    const double th = std::atan2(dy, dx);
    auto b = static_cast<std::size_t>(std::max(0.0, std::floor((th - report.range_start) / width)));
    b = std::min(b, params.bins - 1);
    (c.state == CellState::Red ? red : blue)[b]++;
    ++report.sites;
  }

  std::vector<std::optional<CellState>> color(params.bins);
  for (std::size_t b = 0; b < params.bins; ++b) {
    const std::size_t total = red[b] + blue[b];
    if (total == 0) continue;
    const std::size_t top = std::max(red[b], blue[b]);
    if (static_cast<double>(top) >= params.purity * static_cast<double>(total))
      color[b] = red[b] >= blue[b] ? CellState::Red : CellState::Blue;
  }

  std::size_t covered = 0;
  for (std::size_t b = 0; b < params.bins;) {
    if (!color[b]) {
      ++b;
      continue;
    }
    std::size_t e = b;
    while (e + 1 < params.bins && color[e + 1] == color[b]) ++e;
    const std::size_t count = e - b + 1;
    const double measure = static_cast<double>(count) * width;
    if (measure >= params.min_measure - 1e-12) {
      report.arcs.push_back(Arc{report.range_start + static_cast<double>(b) * width,
                                report.range_start + static_cast<double>(e + 1) * width, *color[b], b, count});
      covered += count;
    }
    b = e + 1;
  }
  report.uncovered = static_cast<double>(params.bins - covered) * width;
  return report;
}

std::size_t StabilityReport::surviving() const noexcept {
  return static_cast<std::size_t>(std::count_if(matches.begin(), matches.end(), [](const ArcMatch& m) { return m.survived; }));
}

StabilityReport sector_stability(const SectorReport& from, const SectorReport& to, double min_overlap) {
  StabilityReport report{from.t, to.t, {}};
  for (const Arc& a : from.arcs) {
    ArcMatch m{a, std::nullopt, 0.0, 0.0, 0.0, false};
    double best = 0.0;
    for (const Arc& b : to.arcs) {
      if (b.color != a.color) continue;
      const double len = std::min(a.end, b.end) - std::max(a.start, b.start);
      if (len > best) {
        best = len;
        m.to = b;
      }
    }
    if (m.to) {
      m.overlap = best / a.measure();
      m.start_drift = m.to->start - a.start;
      m.end_drift = m.to->end - a.end;
      m.survived = m.overlap >= min_overlap;
    }
    report.matches.push_back(m);
  }
  return report;
}

StabilityReport sector_stability(const SnapshotSeries& series, double t_from, double t_to,
                                 const SectorParams& params) {
  auto find = [&](double t) -> const LatticeState& {
    for (const Checkpoint& cp : series.checkpoints)
      if (cp.time == t) return cp.states.at(series.kind_index(ModelKind::Competition));
    fail(ErrorCode::InvalidArgument, "checkpoint " + format_real(t) + " not in series");
  };
  return sector_stability(sector_arcs(find(t_from), t_from, params), sector_arcs(find(t_to), t_to, params));
}

}  // namespace ocm
