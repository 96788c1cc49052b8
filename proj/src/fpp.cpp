#include "ocm/fpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ocm/error.hpp"
#include "ocm/format.hpp"
#include "ocm/parallel.hpp"
#include "ocm/rng.hpp"

namespace ocm {

namespace {

std::uint64_t edge_hash(std::uint64_t seed, const DirectedEdge& e) {
  return rng::hash(seed, rng::Stream::EdgeWeights, static_cast<std::uint32_t>(e.source.x),
                   static_cast<std::uint32_t>(e.source.y), static_cast<std::uint64_t>(e.direction));
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double edge_weight(std::uint64_t seed, const DirectedEdge& e) { return rng::exponential(edge_hash(seed, e)); }

EdgeWeights::EdgeWeights(std::uint64_t seed, const Box& box, const WeightSampler& sampler)
    : seed_(seed), box_(box) {
  require(box.max_x >= 0 && box.max_y >= 0, ErrorCode::InvalidArgument, "invalid weight box");
  east_.assign(box.site_count(), 0.0);
  north_.assign(box.site_count(), 0.0);
  for (std::int32_t x = 0; x <= box.max_x; ++x) {
    for (std::int32_t y = 0; y <= box.max_y; ++y) {
      const Site s{x, y};
      if (s == kOrigin) continue;
      const std::size_t i = box.index(s);
      for (Direction d : {Direction::East, Direction::North}) {
        const DirectedEdge e{s, d};
        if (!box.contains(e.target())) continue;
        const std::uint64_t h = edge_hash(seed, e);
        double w = sampler ? sampler(h) : rng::exponential(h);
        require(w > 0.0 && std::isfinite(w), ErrorCode::InvalidArgument, "weight sampler must return positive values");
        (d == Direction::East ? east_ : north_)[i] = w;
      }
    }
  }
}

void EdgeWeights::check(const DirectedEdge& e) const {
  require(is_structure_edge(e) && box_.contains(e.source) && box_.contains(e.target()), ErrorCode::OutOfBox,
          "edge outside the weight box");
}

double EdgeWeights::weight(const DirectedEdge& e) const {
  check(e);
  return e.direction == Direction::East ? east(e.source) : north(e.source);
}

void EdgeWeights::set_weight(const DirectedEdge& e, double w) {
  check(e);
  require(w > 0.0, ErrorCode::InvalidArgument, "weights must be positive");
  (e.direction == Direction::East ? east_ : north_)[box_.index(e.source)] = w;
}

EdgeWeights sample_weights(std::uint64_t seed, const Box& box, const WeightSampler& sampler) {
  return EdgeWeights(seed, box, sampler);
}

PassageField passage_times(const EdgeWeights& weights, std::span<const Site> sources) {
  const Box& box = weights.box();
  require(!sources.empty(), ErrorCode::InvalidArgument, "passage_times needs at least one source");
  PassageField field{box, {sources.begin(), sources.end()}, {}};
  std::vector<std::uint8_t> is_source(box.site_count(), 0);
  for (Site s : sources) {
    require(box.contains(s), ErrorCode::OutOfBox, "source outside the weight box");
    is_source[box.index(s)] = 1;
  }
  std::vector<double> t(box.site_count(), kInf);
  const auto stride = static_cast<std::size_t>(box.max_y + 1);
  for (std::int32_t x = 0; x <= box.max_x; ++x) {
    for (std::int32_t y = 0; y <= box.max_y; ++y) {
      const std::size_t i = static_cast<std::size_t>(x) * stride + static_cast<std::size_t>(y);
      if (is_source[i]) {
        t[i] = 0.0;
        continue;
      }
      double best = kInf;
      // The origin has no outgoing edges.
      if (x > 0 && !(x == 1 && y == 0)) best = std::min(best, t[i - stride] + weights.east(Site{x - 1, y}));
      if (y > 0 && !(x == 0 && y == 1)) best = std::min(best, t[i - 1] + weights.north(Site{x, y - 1}));
      t[i] = best;
    }
  }
  field.times.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::isfinite(t[i])) field.times[i] = t[i];
  return field;
}

void write_passage_csv(std::ostream& out, const PassageField& field) {
  out << "x,y,T\n";
  for (std::size_t i = 0; i < field.times.size(); ++i) {
    const Site s = field.box.site(i);
    out << s.x << ',' << s.y << ',' << (field.times[i] ? format_real(*field.times[i]) : std::string("inf")) << '\n';
  }
}

MuEstimate mu_estimate(std::uint64_t seed, Point direction, std::int64_t n, std::size_t replicates, std::size_t jobs,
                       std::int32_t max_side) {
  require(direction.x >= 0.0 && direction.y >= 0.0 && (direction.x > 0.0 || direction.y > 0.0) &&
              std::isfinite(direction.x) && std::isfinite(direction.y),
          ErrorCode::InvalidArgument, "direction must be a non-zero vector in the closed first quadrant");
  require(n >= 1, ErrorCode::InvalidArgument, "n must be at least 1");
  require(replicates >= 1, ErrorCode::InvalidArgument, "replicates must be at least 1");
  const double fx = std::round(static_cast<double>(n) * direction.x);
  const double fy = std::round(static_cast<double>(n) * direction.y);
  require(fx <= max_side && fy <= max_side, ErrorCode::Sizing, "target n*direction lies outside the maximal box");
  const Site target{static_cast<std::int32_t>(fx), static_cast<std::int32_t>(fy)};
  require(target != kOrigin, ErrorCode::InvalidArgument, "n*direction rounds to the origin");

  const Box box{std::max(target.x, 1), std::max(target.y, 1)};
  const Site sources[] = {Site{1, 0}, Site{0, 1}};
  std::vector<double> samples(replicates);
  parallel_for(replicates, jobs, [&](std::size_t i) {
    const EdgeWeights w(rng::hash(seed, rng::Stream::Sampling, i), box);
    samples[i] = *passage_times(w, sources).at(target) / static_cast<double>(n);
  });
  return MuEstimate{direction, n, target, stats::summarize(samples)};
}

TwoStepBlock two_step_block(std::uint64_t seed, std::uint64_t step) {
  TwoStepBlock w{};
  for (std::size_t e = 0; e < w.size(); ++e) w[e] = rng::exponential(rng::hash(seed, rng::Stream::WalkWeights, step, e));
  return w;
}

TwoStepChoice fastest_two_step(const TwoStepBlock& w) {
  const TwoStepChoice paths[] = {
      {Site{2, 0}, w[0] + w[2]},
      {Site{1, 1}, w[0] + w[3]},
      {Site{1, 1}, w[1] + w[4]},
      {Site{0, 2}, w[1] + w[5]},
  };
  const TwoStepChoice* best = &paths[0];
  for (const auto& p : paths)
    if (p.time < best->time) best = &p;
  return *best;
}

double greedy_two_step_time(const TwoStepBlock& w) {
  if (w[0] < w[1]) return w[0] + std::min(w[2], w[3]);
  return w[1] + std::min(w[4], w[5]);
}

DiagonalWalkStats diagonal_walk(std::uint64_t seed, std::size_t k_max) {
  require(k_max >= 1, ErrorCode::InvalidArgument, "k_max must be at least 1");
  DiagonalWalkStats out;
  out.displacements.reserve(k_max);
  out.step_times.reserve(k_max);
  out.partial_sums.reserve(k_max);
  out.positions.reserve(k_max);
  Site at = kOrigin;
  double sum = 0.0;
  for (std::size_t k = 0; k < k_max; ++k) {
    const TwoStepChoice c = fastest_two_step(two_step_block(seed, k));
    at = Site{at.x + c.displacement.x, at.y + c.displacement.y};
    sum += c.time;
    out.displacements.push_back(c.displacement);
    out.step_times.push_back(c.time);
    out.partial_sums.push_back(sum);
    out.positions.push_back(at);
    if (at.x == at.y) ++out.diagonal_visits;
  }
  return out;
}

void write_walk_csv(std::ostream& out, const DiagonalWalkStats& walk) {
  out << "k,Xx,Xy,Tk,Sk\n";
  for (std::size_t k = 0; k < walk.step_times.size(); ++k)
    out << (k + 1) << ',' << walk.displacements[k].x << ',' << walk.displacements[k].y << ','
        << format_real(walk.step_times[k]) << ',' << format_real(walk.partial_sums[k]) << '\n';
}

GreedyStats greedy_two_step(std::uint64_t seed, std::size_t trials) {
  require(trials >= 1, ErrorCode::InvalidArgument, "trials must be at least 1");
  GreedyStats out;
  out.samples.reserve(trials);
  for (std::size_t k = 0; k < trials; ++k) out.samples.push_back(greedy_two_step_time(two_step_block(seed, k)));
  out.summary = stats::summarize(out.samples);
  return out;
}

std::vector<double> richardson_occupation_times(std::uint64_t seed, std::span<const Site> probes, double t) {
  require(t >= 0.0, ErrorCode::InvalidArgument, "t must be non-negative");
  // Occupation of z depends only on arrows inside [0,z.x] x [0,z.y].
  Box box{1, 1};
  for (Site p : probes) {
    require(p.x >= 0 && p.y >= 0, ErrorCode::OutOfBox, "probe outside the quadrant");
    box.max_x = std::max(box.max_x, p.x);
    box.max_y = std::max(box.max_y, p.y);
  }
  const LatticeState init = init_default(ModelKind::Richardson, box);
  std::vector<double> times(box.site_count(), kInf);
  for (const Cell& c : init.cells()) times[box.index(c.site)] = 0.0;
  Engine engine(seed, std::span<const LatticeState>(&init, 1));
  engine.set_observer([&](std::size_t, Site s, CellState before, CellState after, double time) {
    if (!is_occupied(before) && is_occupied(after)) times[box.index(s)] = time;
  });
  engine.advance_to(t);
  std::vector<double> out;
  out.reserve(probes.size());
  for (Site p : probes) out.push_back(times[box.index(p)]);
  return out;
}

std::vector<ProbeComparison> richardson_equivalence(std::uint64_t seed, std::size_t replicates, double t,
                                                    std::span<const Site> probes, std::size_t jobs) {
  require(replicates >= 1, ErrorCode::InvalidArgument, "replicates must be at least 1");
  require(!probes.empty(), ErrorCode::InvalidArgument, "at least one probe is required");
  Box box{1, 1};
  for (Site p : probes) {
    require(p.x >= 0 && p.y >= 0, ErrorCode::OutOfBox, "probe outside the quadrant");
    box.max_x = std::max(box.max_x, p.x);
    box.max_y = std::max(box.max_y, p.y);
  }
  const Site sources[] = {Site{1, 0}, Site{0, 1}};
  std::vector<std::vector<double>> forward(replicates);
  std::vector<std::vector<double>> fpp(replicates);
  parallel_for(replicates, jobs, [&](std::size_t i) {
    forward[i] = richardson_occupation_times(rng::hash(seed, rng::Stream::Sampling, i, 0), probes, t);
    const PassageField field = passage_times(EdgeWeights(rng::hash(seed, rng::Stream::Sampling, i, 1), box), sources);
    fpp[i].reserve(probes.size());
    for (Site p : probes) {
      const auto v = field.at(p);
      fpp[i].push_back(v && *v <= t ? *v : kInf);
    }
  });

  std::vector<ProbeComparison> out;
  for (std::size_t j = 0; j < probes.size(); ++j) {
    ProbeComparison c{probes[j], {}, {}, 0.0, 1.0};
    for (std::size_t i = 0; i < replicates; ++i) {
      c.forward.push_back(forward[i][j]);
      c.fpp.push_back(fpp[i][j]);
    }
    c.ks = stats::ks_statistic(c.forward, c.fpp);
    c.p_value = stats::ks_pvalue(c.ks, stats::ks_effective_size(replicates, replicates));
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace ocm
