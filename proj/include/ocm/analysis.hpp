#pragma once

// Geometric checks on snapshots: region containment with a margin, radial
// shape profiles, angular arcs around the corner (1,1)t and their stability,
// and a three-point curvature diagnostic for shape profiles.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ocm/models.hpp"
#include "ocm/stats.hpp"

namespace ocm {

inline constexpr double kPi = 3.14159265358979323846;

/// Immutable region of the plane in scaled coordinates.
class Region {
 public:
  enum class Kind { UnitSquare, AboveDiagonal, BelowDiagonal, BandBelow, BandAbove, Cone, Sector, Scaled, Intersection };

  /// Q = [0,1]^2.
  static Region unit_square();
  /// Q1: points of Q strictly above the diagonal (y > x).
  static Region above_diagonal();
  /// Q2: points of Q strictly below the diagonal (x > y).
  static Region below_diagonal();
  /// K1(c) = {x - y > c}.
  static Region band_k1(double c);
  /// K2(c) = {y - x > c}.
  static Region band_k2(double c);
  /// K_eps: arg(p - (1,1)) in (-pi/2 + eps, pi - eps).
  static Region cone(double eps);
  /// A(center; measure): |arg(p - (1,1)) - center| <= measure/2, outside the open unit square.
  static Region sector(double center_angle, double measure);
  static Region scaled(const Region& inner, double factor);
  static Region intersection(const Region& a, const Region& b);

  Kind kind() const noexcept { return kind_; }
  bool contains(Point p) const;
  /// L-infinity distance from p to the boundary of the region. For
  /// intersections and sectors this is a lower bound.
  double boundary_distance(Point p) const;
  /// Stable text form, e.g. "scaled(Q,0.90000000000000002)".
  std::string describe() const;

 private:
  Region(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_ = 0.0;  // c, eps, center angle or factor
  double b_ = 0.0;  // sector measure
  std::shared_ptr<const Region> left_;
  std::shared_ptr<const Region> right_;
};

/// Angle of p around the root (1,1)*scale, in (-pi, pi].
double root_angle(Point p, double scale = 1.0);

/// L-infinity distance from p to the ray root + s*(cos a, sin a), s >= 0.
double linf_distance_to_ray(Point p, Point root, double angle);

enum class CheckStatus { Pass, Fail, Inconclusive };
std::string_view to_string(CheckStatus status);

struct ContainmentReport {
  std::string region;
  double t = 0.0;
  double delta = 0.0;
  std::size_t tested = 0;
  std::vector<Site> violations;
  CheckStatus status = CheckStatus::Inconclusive;

  bool pass() const noexcept { return status == CheckStatus::Pass; }
  double violation_rate() const noexcept {
    return tested == 0 ? 0.0 : static_cast<double>(violations.size()) / static_cast<double>(tested);
  }
};

/// Every site v with v/t in `region` and boundary distance >= delta must carry
/// a state in `colors`. Inconclusive when t*delta < 2 or nothing is testable.
ContainmentReport check_containment(const LatticeState& state, ColorSet colors, const Region& region, double t,
                                    double delta);

/// Share of sites with a state in `colors` whose scaled position v/t lies outside `region`.
double outside_fraction(const LatticeState& state, ColorSet colors, const Region& region, double t);

/// Colors that make up the growing set of a model: occupied sites, or Black for hostile growth.
ColorSet shape_colors(ModelKind kind);

struct ShapeEstimate {
  std::vector<double> angles;  // polar angle from the origin, ascending
  std::vector<double> radius;  // mean scaled boundary radius
  std::vector<double> stddev;  // across replicates (0 for one replicate)
  std::size_t replicates = 0;
};

/// Radial function of the unit square: 1 / max(cos, sin).
double square_radius(double angle);

/// Evenly spaced angles over [0, pi/2], both ends included.
std::vector<double> quadrant_angles(std::size_t count);

/// Scaled distance from the origin to the farthest site of `colors` met when
/// marching along the ray at `angle` in steps of 1/4.
double boundary_radius(const LatticeState& state, ColorSet colors, double angle, double t);

/// Profile of the last checkpoint of each series; truncated series are rejected.
ShapeEstimate shape_from_snapshots(std::span<const SnapshotSeries> series, ModelKind kind,
                                   std::span<const double> angles);

/// r(theta) = 1 / mu(cos theta, sin theta), from mu_estimate at scale n.
ShapeEstimate shape_from_mu(std::uint64_t seed, std::int64_t n, std::span<const double> angles,
                            std::size_t replicates, std::size_t jobs = 1);

/// theta,radius,stddev
void write_profile_csv(std::ostream& out, const ShapeEstimate& shape);

struct CurvatureSample {
  double angle = 0.0;
  Point point;
  std::optional<double> radius;  // empty for collinear triples
  bool flat = false;
};

struct CurvatureReport {
  double eps = 0.0;
  double flat_cap = 0.0;
  std::vector<CurvatureSample> samples;
};

/// Circle through each in-cone boundary sample and its two profile neighbours.
/// Needs at least 32 samples inside K_eps.
CurvatureReport curvature_diagnostic(const ShapeEstimate& shape, double eps, double flat_cap = 25.0);

struct Arc {
  double start = 0.0;  // angles around (1,1)t
  double end = 0.0;
  CellState color = CellState::Red;
  std::size_t first_bin = 0;
  std::size_t bin_count = 0;

  double measure() const noexcept { return end - start; }
};

struct SectorParams {
  double r_min = 0.05;  // annulus around (1,1)t, Euclidean, scaled by t
  double r_max = 2.0;
  double min_measure = 0.2;
  std::size_t bins = 1024;
  double purity = 0.75;  // share of the majority color for a bin to count as monochromatic
};

struct SectorReport {
  double t = 0.0;
  double range_start = -kPi / 2;
  double range_end = kPi;
  std::size_t bins = 0;
  std::vector<Arc> arcs;
  double uncovered = 0.0;
  std::size_t sites = 0;

  double bin_width() const noexcept { return (range_end - range_start) / static_cast<double>(bins); }
};

/// Bins the occupied sites outside Q*t by angle around (1,1)t and extracts maximal
/// monochromatic runs of at least min_measure. Empty and mixed bins break runs.
SectorReport sector_arcs(const LatticeState& state, double t, const SectorParams& params = {});

struct ArcMatch {
  Arc from;
  std::optional<Arc> to;  // same-color arc of the later report with the largest overlap
  double overlap = 0.0;   // |from n to| / |from|
  double start_drift = 0.0;
  double end_drift = 0.0;
  bool survived = false;
};

struct StabilityReport {
  double t_from = 0.0;
  double t_to = 0.0;
  std::vector<ArcMatch> matches;

  std::size_t surviving() const noexcept;
};

StabilityReport sector_stability(const SectorReport& from, const SectorReport& to, double min_overlap = 0.8);

/// Stability between two checkpoints of one series (competition kind).
StabilityReport sector_stability(const SnapshotSeries& series, double t_from, double t_to,
                                 const SectorParams& params = {});

}  // namespace ocm
