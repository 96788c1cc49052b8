#pragma once

// First-passage percolation on the oriented quadrant. Each structure edge
// carries an independent mean-one exponential passage time; T(a, z) is the
// least total weight over North-East paths from a to z. Started from
// {(1,0),(0,1)} this has the law of the Richardson occupation times.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ocm/models.hpp"
#include "ocm/percolation.hpp"
#include "ocm/stats.hpp"

namespace ocm {

/// Maps a 64-bit hash to a positive weight. Default: mean-one exponential.
using WeightSampler = std::function<double(std::uint64_t)>;

/// Deterministic weight of one edge under `seed`, independent of any box.
double edge_weight(std::uint64_t seed, const DirectedEdge& e);

class EdgeWeights {
 public:
  EdgeWeights(std::uint64_t seed, const Box& box, const WeightSampler& sampler = {});

  std::uint64_t seed() const noexcept { return seed_; }
  const Box& box() const noexcept { return box_; }

  /// Weight of a structure edge inside the box; throws otherwise.
  double weight(const DirectedEdge& e) const;
  /// Overrides one weight (test hook for monotonicity checks).
  void set_weight(const DirectedEdge& e, double w);

  /// Unchecked access for edges known to be in the box.
  double east(Site s) const noexcept { return east_[box_.index(s)]; }
  double north(Site s) const noexcept { return north_[box_.index(s)]; }

 private:
  void check(const DirectedEdge& e) const;

  std::uint64_t seed_;
  Box box_;
  std::vector<double> east_;   // weight of s -> s+(1,0); unused on the last column
  std::vector<double> north_;  // weight of s -> s+(0,1); unused on the last row
};

EdgeWeights sample_weights(std::uint64_t seed, const Box& box, const WeightSampler& sampler = {});

struct PassageField {
  Box box;
  std::vector<Site> sources;
  std::vector<std::optional<double>> times;  // empty optional: not reachable

  std::optional<double> at(Site s) const { return times.at(box.index(s)); }
};

/// Exact dynamic program in topological order of the oriented edge set.
PassageField passage_times(const EdgeWeights& weights, std::span<const Site> sources);

/// PassageField export: x,y,T with "inf" for unreachable sites.
void write_passage_csv(std::ostream& out, const PassageField& field);

struct MuEstimate {
  Point direction;
  std::int64_t n = 0;
  Site target;
  stats::Summary summary;  // of T(target)/n over replicates
};

/// Monte Carlo estimate of the time constant in `direction` from the
/// Richardson sources {(1,0),(0,1)}. Replicate i uses seed hash(seed, i).
MuEstimate mu_estimate(std::uint64_t seed, Point direction, std::int64_t n, std::size_t replicates,
                       std::size_t jobs = 1, std::int32_t max_side = 20000);

/// Weights of the six edges used by one step of the embedded diagonal walk,
/// relative to the current position W:
///   0: W->W+(1,0)      1: W->W+(0,1)
///   2: W+(1,0)->+(1,0) 3: W+(1,0)->+(0,1)
///   4: W+(0,1)->+(1,0) 5: W+(0,1)->+(0,1)
using TwoStepBlock = std::array<double, 6>;
TwoStepBlock two_step_block(std::uint64_t seed, std::uint64_t step);

struct TwoStepChoice {
  Site displacement;  // (2,0), (1,1) or (0,2)
  double time = 0.0;
};

/// Fastest of the four two-edge oriented paths.
TwoStepChoice fastest_two_step(const TwoStepBlock& w);
/// Greedy path: two steps, each along the cheaper outgoing edge.
double greedy_two_step_time(const TwoStepBlock& w);

struct DiagonalWalkStats {
  std::vector<Site> displacements;    // X_k
  std::vector<double> step_times;     // T_k
  std::vector<double> partial_sums;   // S_k
  std::vector<Site> positions;        // W_k
  std::size_t diagonal_visits = 0;    // k with W_k on the main diagonal
};

/// Renewal walk: at step k the four two-edge paths are evaluated on the
/// fresh weights two_step_block(seed, k).
DiagonalWalkStats diagonal_walk(std::uint64_t seed, std::size_t k_max);

/// walk statistics export: k,Xx,Xy,Tk,Sk.
void write_walk_csv(std::ostream& out, const DiagonalWalkStats& walk);

struct GreedyStats {
  std::vector<double> samples;
  stats::Summary summary;
};

/// Trial k uses two_step_block(seed, k), the same weights as step k of diagonal_walk(seed, .).
GreedyStats greedy_two_step(std::uint64_t seed, std::size_t trials);

struct ProbeComparison {
  Site probe;
  std::vector<double> forward;  // occupation times from the arrow engine (+inf: not by t)
  std::vector<double> fpp;      // min(T((1,0),z), T((0,1),z)) from independent weights
  double ks = 0.0;
  double p_value = 1.0;
};

/// Occupation time of each probe in one Richardson run on the arrows of `seed`,
/// or +inf if the probe is still vacant at `t`.
std::vector<double> richardson_occupation_times(std::uint64_t seed, std::span<const Site> probes, double t);

std::vector<ProbeComparison> richardson_equivalence(std::uint64_t seed, std::size_t replicates, double t,
                                                    std::span<const Site> probes, std::size_t jobs = 1);

}  // namespace ocm
