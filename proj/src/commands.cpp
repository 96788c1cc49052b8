#include "ocm/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "ocm/analysis.hpp"
#include "ocm/dual.hpp"
#include "ocm/error.hpp"
#include "ocm/fpp.hpp"
#include "ocm/parallel.hpp"
#include "ocm/rng.hpp"
#include "ocm/stats.hpp"

namespace ocm {

void RunConfig::validate() const {
  require(alpha > 0.5 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must lie in (1/2, 1)");
  require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  require(eps > 0.0 && eps < kPi / 4, ErrorCode::InvalidArgument, "eps must lie in (0, pi/4)");
  require(rho > 0.0, ErrorCode::InvalidArgument, "rho must be positive");
  require(!t_max || (*t_max >= 0.0 && std::isfinite(*t_max)), ErrorCode::InvalidArgument, "t must be finite and >= 0");
  require(!replicates || *replicates >= 1, ErrorCode::InvalidArgument, "replicates must be >= 1");
  require(!samples || *samples >= 1, ErrorCode::InvalidArgument, "samples must be >= 1");
  require(!n || *n >= 1, ErrorCode::InvalidArgument, "n must be >= 1");
  require(!box_side || *box_side >= 1, ErrorCode::Sizing, "box side must be >= 1");
  require(trials >= 1 && k_max >= 1 && walk_runs >= 1, ErrorCode::InvalidArgument,
          "trials, k-max and walk runs must be >= 1");
  require(angles >= 2, ErrorCode::InvalidArgument, "angles must be >= 2");
  require(jobs >= 1, ErrorCode::InvalidArgument, "jobs must be >= 1");
}

namespace {

Json summary_json(const stats::Summary& s) {
  Json j;
  j["count"] = s.count;
  j["mean"] = s.mean;
  j["stddev"] = s.stddev;
  j["stderr"] = s.stderr_mean;
  j["ci99_low"] = s.ci_low();
  j["ci99_high"] = s.ci_high();
  return j;
}

Json make_check(std::string_view name, std::string_view kind) {
  Json j;
  j["name"] = name;
  j["kind"] = kind;
  j["pass"] = false;
  return j;
}

Json site_json(Site s) { return Json::array({s.x, s.y}); }

std::vector<double> default_checkpoints(const RunConfig& c, double t) {
  if (!c.checkpoints.empty()) return c.checkpoints;
  return {t};
}

struct SuiteResult {
  Json report;
  bool hard_failure = false;
};

SuiteResult finish_suite(std::string_view name, Json config, Json checks, bool gating) {
  bool all_pass = true;
  bool hard = false;
  for (const Json& c : checks) {
    if (c["kind"] == "report") continue;
    if (!c["pass"].get<bool>()) {
      all_pass = false;
      if (gating && c["kind"] == "exact") hard = true;
    }
  }
  Json r;
  r["suite"] = name;
  r["config"] = std::move(config);
  r["checks"] = std::move(checks);
  r["hard_failure"] = hard;
  r["verdict"] = all_pass ? "pass" : "fail";
  return {std::move(r), hard};
}

// ---------------------------------------------------------------------------

SuiteResult suite_coupling(const RunConfig& c) {
  const double t = c.t_max.value_or(100.0);
  const std::size_t seeds = c.replicates.value_or(20);
  std::vector<double> cps = c.checkpoints;
  if (cps.empty()) cps = {t / 4, t / 2, 3 * t / 4, t};
  if (t == 0.0) cps = {0.0};

  constexpr std::array<std::string_view, 6> names = {"Z = R u B",   "R n B = empty", "Q c Z",
                                                     "R1 c R",      "B1 c B",        "Q = R1 u B1"};
  std::vector<std::array<std::size_t, 6>> violations(seeds);
  std::vector<std::uint8_t> truncated(seeds, 0);
  parallel_for(seeds, c.jobs, [&](std::size_t i) {
    const auto series = coupled_run(c.seed + i, kAllModelKinds, t, cps, c.box_policy());
    truncated[i] = series.truncated;
    auto& v = violations[i];
    v.fill(0);
    for (const Checkpoint& cp : series.checkpoints) {
      const DenseGrid z = cp.states[0].dense();
      const DenseGrid rb = cp.states[1].dense();
      const DenseGrid q = cp.states[2].dense();
      const DenseGrid h = cp.states[3].dense();
      for (std::size_t k = 0; k < z.cells.size(); ++k) {
        const bool in_z = is_occupied(z.cells[k]);
        const bool in_r = rb.cells[k] == CellState::Red;
        const bool in_b = rb.cells[k] == CellState::Blue;
        const bool in_q = q.cells[k] == CellState::Black;
        const bool in_r1 = h.cells[k] == CellState::Red;
        const bool in_b1 = h.cells[k] == CellState::Blue;
        v[0] += in_z != (in_r || in_b);
        v[1] += in_r && in_b;
        v[2] += in_q && !in_z;
        v[3] += in_r1 && !in_r;
        v[4] += in_b1 && !in_b;
        v[5] += in_q != (in_r1 || in_b1);
      }
    }
  });

  Json checks = Json::array();
  for (std::size_t k = 0; k < names.size(); ++k) {
    std::size_t total = 0;
    for (const auto& v : violations) total += v[k];
    Json j = make_check(names[k], "exact");
    j["violations"] = total;
    j["pass"] = total == 0;
    checks.push_back(std::move(j));
  }
  Json tr = make_check("no truncation", "report");
  tr["truncated_runs"] = static_cast<std::size_t>(std::count(truncated.begin(), truncated.end(), 1));
  tr["pass"] = tr["truncated_runs"] == 0;
  checks.push_back(std::move(tr));

  Json config;
  config["seed"] = c.seed;
  config["seeds"] = seeds;
  config["t"] = t;
  config["checkpoints"] = cps;
  return finish_suite("coupling", std::move(config), std::move(checks), true);
}

// ---------------------------------------------------------------------------

struct DualSample {
  Site z;
  double t;
};

SuiteResult suite_dual(const RunConfig& c) {
  const double t_max = c.t_max.value_or(40.0);
  require(t_max > 0.0, ErrorCode::InvalidArgument, "dual suite needs t > 0");
  const std::size_t seeds = c.replicates.value_or(10);
  const std::size_t samples = c.samples.value_or(1000);
  const std::int32_t side = c.box_policy().side_for(t_max);

  struct Tally {
    std::size_t voter = 0, competition = 0, ancestors = 0, total = 0;
    std::vector<Json> mismatches;
  };
  std::vector<Tally> tallies(seeds);
  parallel_for(seeds, c.jobs, [&](std::size_t i) {
    const std::uint64_t seed = c.seed + i;
    const std::size_t count = samples / seeds + (i < samples % seeds ? 1 : 0);
    rng::SplitMix draw(rng::hash(seed, rng::Stream::Sampling, 0xD1));
    std::vector<DualSample> qs;
    for (std::size_t k = 0; k < count; ++k) {
      const double t = t_max * draw.uniform();
      const auto reach = static_cast<std::uint64_t>(std::min<double>(std::ceil(1.5 * t), side));
      qs.push_back(DualSample{Site{static_cast<std::int32_t>(draw.below(reach + 1)),
                                   static_cast<std::int32_t>(draw.below(reach + 1))},
                              t});
    }
    std::stable_sort(qs.begin(), qs.end(), [](const DualSample& a, const DualSample& b) { return a.t < b.t; });

    const Box box = Box::square(side);
    std::vector<LatticeState> inits;
    for (ModelKind k : kAllModelKinds) inits.push_back(init_default(k, box));
    Engine forward(seed, inits);
    DualEngine dual(EventWindow{seed, side, t_max});
    Tally& tally = tallies[i];
    for (const DualSample& q : qs) {
      forward.advance_to(q.t);
      const CellState f_comp = forward.at(1, q.z);
      const CellState f_hg = forward.at(2, q.z);
      const CellState f_hc = forward.at(3, q.z);
      const bool f_occ = is_occupied(forward.at(0, q.z));
      const CellState d_comp = dual.competition_color(q.z, q.t, inits[1]);
      const CellState d_hc = dual.voter_color(q.z, q.t, inits[3]);
      const CellState d_hg = dual.voter_color(q.z, q.t, inits[2]);
      const bool d_occ = !dual.potential_ancestors(q.z, q.t, inits[0]).members.empty();
      const bool ok_v = d_hc == f_hc && d_hg == f_hg;
      const bool ok_c = d_comp == f_comp;
      const bool ok_a = d_occ == f_occ;
      tally.voter += ok_v;
      tally.competition += ok_c;
      tally.ancestors += ok_a;
      ++tally.total;
      if ((!ok_v || !ok_c || !ok_a) && tally.mismatches.size() < 5) {
        Json m;
        m["seed"] = seed;
        m["site"] = site_json(q.z);
        m["t"] = q.t;
        tally.mismatches.push_back(std::move(m));
      }
    }
  });

  Tally sum;
  Json mismatches = Json::array();
  for (const Tally& t : tallies) {
    sum.voter += t.voter;
    sum.competition += t.competition;
    sum.ancestors += t.ancestors;
    sum.total += t.total;
    for (const Json& m : t.mismatches) mismatches.push_back(m);
  }
  Json checks = Json::array();
  auto add = [&](std::string_view name, std::size_t agree) {
    Json j = make_check(name, "exact");
    j["agree"] = agree;
    j["total"] = sum.total;
    j["pass"] = agree == sum.total;
    checks.push_back(std::move(j));
  };
  add("voter_color = hostile forward", sum.voter);
  add("competition_color = competition forward", sum.competition);
  add("ancestors nonempty <=> richardson occupied", sum.ancestors);

  Json config;
  config["seed"] = c.seed;
  config["seeds"] = seeds;
  config["samples"] = samples;
  config["t_max"] = t_max;
  config["box_side"] = side;
  SuiteResult r = finish_suite("dual", std::move(config), std::move(checks), true);
  r.report["mismatches"] = std::move(mismatches);
  return r;
}

// ---------------------------------------------------------------------------

double gamma_ks_pvalue(const std::vector<double>& xs, double shape) {
  const double d = stats::ks_statistic(xs, [shape](double x) { return stats::gamma_cdf(shape, x); });
  return stats::ks_pvalue(d, static_cast<double>(xs.size()));
}

SuiteResult suite_lemma1(const RunConfig& c) {
  const std::int64_t n = c.n.value_or(500);
  const std::size_t reps = c.replicates.value_or(50);
  const std::size_t probe_reps = c.samples.value_or(400);
  Json checks = Json::array();

  // One embedded-walk run of `trials` steps gives i.i.d. copies of (X1, T1).
  const DiagonalWalkStats walk = diagonal_walk(c.seed, c.trials);
  const double trials = static_cast<double>(c.trials);
  {
    std::array<std::size_t, 3> counts{};
    for (Site d : walk.displacements) ++counts[static_cast<std::size_t>(d.y)];
    const std::array<double, 3> expected = {0.25, 0.5, 0.25};
    bool ok = true;
    Json freq = Json::array();
    for (std::size_t k = 0; k < 3; ++k) {
      const double p = static_cast<double>(counts[k]) / trials;
      const double se = std::sqrt(expected[k] * (1 - expected[k]) / trials);
      ok = ok && std::abs(p - expected[k]) <= 3 * se;
      Json f;
      f["displacement"] = site_json(Site{2 - static_cast<std::int32_t>(k), static_cast<std::int32_t>(k)});
      f["frequency"] = p;
      f["expected"] = expected[k];
      f["se"] = se;
      freq.push_back(std::move(f));
    }
    Json j = make_check("X1 frequencies within 3 SE of (1/4, 1/2, 1/4)", "statistical");
    j["trials"] = c.trials;
    j["frequencies"] = std::move(freq);
    j["pass"] = ok;
    checks.push_back(std::move(j));
  }
  const stats::Summary t1 = stats::summarize(walk.step_times);
  {
    const GreedyStats g = greedy_two_step(c.seed, c.trials);
    Json j = make_check("E tau(gamma0) within 3 SE of 1", "statistical");
    j["summary"] = summary_json(g.summary);
    j["pass"] = std::abs(g.summary.mean - 1.0) <= 3 * g.summary.stderr_mean;
    checks.push_back(std::move(j));
  }
  {
    Json j = make_check("99% CI of E T1 below 1", "statistical");
    j["summary"] = summary_json(t1);
    j["pass"] = t1.ci_high() < 1.0;
    checks.push_back(std::move(j));
  }
  {
    const double eps = (1.0 - t1.mean) / 2;
    std::vector<double> ratios(c.walk_runs);
    std::vector<std::size_t> visits(c.walk_runs);
    parallel_for(c.walk_runs, c.jobs, [&](std::size_t r) {
      const DiagonalWalkStats w = diagonal_walk(rng::hash(c.seed, rng::Stream::Sampling, 0x51, r), c.k_max);
      ratios[r] = w.partial_sums.back() / static_cast<double>(c.k_max);
      visits[r] = w.diagonal_visits;
    });
    const double worst = *std::max_element(ratios.begin(), ratios.end());
    std::size_t visit_total = 0;
    for (std::size_t v : visits) visit_total += v;
    Json j = make_check("S_k/k below 1 - eps in every run", "statistical");
    j["k"] = c.k_max;
    j["runs"] = c.walk_runs;
    j["eps"] = eps;
    j["max_ratio"] = worst;
    j["diagonal_visit_frequency"] = static_cast<double>(visit_total) / static_cast<double>(c.walk_runs * c.k_max);
    j["pass"] = eps > 0.0 && worst < 1.0 - eps;
    checks.push_back(std::move(j));
  }
  {
    const MuEstimate m = mu_estimate(rng::hash(c.seed, rng::Stream::Sampling, 0x11), Point{1, 1}, n, reps, c.jobs);
    Json j = make_check("mu(1,1) 99% CI upper bound below 1", "statistical");
    j["n"] = n;
    j["replicates"] = reps;
    j["summary"] = summary_json(m.summary);
    j["pass"] = m.summary.ci_high() < 1.0;
    checks.push_back(std::move(j));
  }
  {
    const MuEstimate ex = mu_estimate(rng::hash(c.seed, rng::Stream::Sampling, 0x10), Point{1, 0}, n, reps, c.jobs);
    const MuEstimate ey = mu_estimate(rng::hash(c.seed, rng::Stream::Sampling, 0x01), Point{0, 1}, n, reps, c.jobs);
    Json j = make_check("mu(1,0) within 1 +- 0.05", "statistical");
    j["summary"] = summary_json(ex.summary);
    j["mirror_summary"] = summary_json(ey.summary);
    j["pass"] = std::abs(ex.summary.mean - 1.0) <= 0.05;
    checks.push_back(std::move(j));
  }
  {
    const Site probes[] = {Site{20, 20}, Site{0, 20}, Site{1, 0}};
    const auto cmp =
        richardson_equivalence(rng::hash(c.seed, rng::Stream::Sampling, 0x7), probe_reps, 60.0, probes, c.jobs);
    Json j = make_check("Richardson vs FPP two-sample KS at (20,20)", "statistical");
    j["replicates"] = probe_reps;
    j["ks"] = cmp[0].ks;
    j["p_value"] = cmp[0].p_value;
    j["critical_1pct"] = stats::ks_critical(0.01, stats::ks_effective_size(probe_reps, probe_reps));
    j["pass"] = cmp[0].p_value >= 0.01;
    checks.push_back(std::move(j));

    const double p_forward = gamma_ks_pvalue(cmp[1].forward, 19.0);
    const double p_fpp = gamma_ks_pvalue(cmp[1].fpp, 19.0);
    Json a = make_check("axis probe (0,20) matches Gamma(19,1)", "statistical");
    a["two_sample_p_value"] = cmp[1].p_value;
    a["forward_p_value"] = p_forward;
    a["fpp_p_value"] = p_fpp;
    a["pass"] = cmp[1].p_value >= 0.01 && p_forward >= 0.01 && p_fpp >= 0.01;
    checks.push_back(std::move(a));

    const bool zero = std::all_of(cmp[2].forward.begin(), cmp[2].forward.end(), [](double v) { return v == 0.0; }) &&
                      std::all_of(cmp[2].fpp.begin(), cmp[2].fpp.end(), [](double v) { return v == 0.0; });
    Json s = make_check("source probe (1,0) has time 0 in both engines", "statistical");
    s["pass"] = zero;
    checks.push_back(std::move(s));
  }

  Json config;
  config["seed"] = c.seed;
  config["trials"] = c.trials;
  config["n"] = n;
  config["replicates"] = reps;
  config["k"] = c.k_max;
  config["walk_runs"] = c.walk_runs;
  config["probe_replicates"] = probe_reps;
  return finish_suite("lemma1", std::move(config), std::move(checks), false);
}

// ---------------------------------------------------------------------------

SuiteResult suite_shape(const RunConfig& c) {
  const double t = c.t_max.value_or(150.0);
  require(t > 0.0, ErrorCode::InvalidArgument, "shape suite needs t > 0");
  const std::size_t seeds = c.replicates.value_or(20);
  const double d = c.delta;
  const Region inner = Region::scaled(Region::unit_square(), 1 - d);
  const Region outer = Region::scaled(Region::unit_square(), 1 + d);
  const std::vector<double> angles = quadrant_angles(c.angles);
  const ModelKind kinds[] = {ModelKind::HostileGrowth, ModelKind::Richardson};
  const double cps[] = {t};

  std::vector<SnapshotSeries> series(seeds);
  std::vector<std::uint8_t> passed(seeds, 0);
  std::vector<double> outside(seeds, 0.0);
  std::vector<std::size_t> dominance(seeds, 0);
  parallel_for(seeds, c.jobs, [&](std::size_t i) {
    series[i] = coupled_run(c.seed + i, kinds, t, cps, c.box_policy());
    const LatticeState& q = series[i].checkpoints[0].states[0];
    passed[i] = check_containment(q, CellState::Black, inner, t, d).pass();
    outside[i] = outside_fraction(q, CellState::Black, outer, t);
    if (series[i].truncated) return;
    const std::span<const SnapshotSeries> one(&series[i], 1);
    const ShapeEstimate hq = shape_from_snapshots(one, ModelKind::HostileGrowth, angles);
    const ShapeEstimate hz = shape_from_snapshots(one, ModelKind::Richardson, angles);
    for (std::size_t a = 0; a < angles.size(); ++a) dominance[i] += hq.radius[a] > hz.radius[a];
  });

  Json checks = Json::array();
  const double pass_fraction =
      static_cast<double>(std::count(passed.begin(), passed.end(), 1)) / static_cast<double>(seeds);
  {
    Json j = make_check("Black covers scaled(Q,1-delta) at margin delta in >= 95% of runs", "statistical");
    j["region"] = inner.describe();
    j["pass_fraction"] = pass_fraction;
    j["pass"] = pass_fraction >= 0.95;
    checks.push_back(std::move(j));
  }
  {
    const double worst = *std::max_element(outside.begin(), outside.end());
    double mean = 0.0;
    for (double v : outside) mean += v;
    mean /= static_cast<double>(seeds);
    Json j = make_check("Black share outside scaled(Q,1+delta) <= 1% in every run", "statistical");
    j["per_run"] = outside;
    j["max"] = worst;
    j["mean"] = mean;
    j["runs_over_1pct"] = static_cast<std::size_t>(std::count_if(outside.begin(), outside.end(), [](double v) { return v > 0.01; }));
    j["pass"] = worst <= 0.01;
    checks.push_back(std::move(j));
  }
  bool truncated = false;
  for (const auto& s : series) truncated = truncated || s.truncated;
  if (!truncated) {
    const ShapeEstimate hg = shape_from_snapshots(series, ModelKind::HostileGrowth, angles);
    const ShapeEstimate rz = shape_from_snapshots(series, ModelKind::Richardson, angles);
    double dev = 0.0;
    double min_excess = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < angles.size(); ++a) {
      dev = std::max(dev, std::abs(hg.radius[a] - square_radius(angles[a])));
      min_excess = std::min(min_excess, rz.radius[a] - square_radius(angles[a]));
    }
    Json j = make_check("hostile-growth profile within 0.1 of the unit square", "report");
    j["max_deviation"] = dev;
    j["axis_radius"] = Json::array({hg.radius.front(), hg.radius.back()});
    j["pass"] = dev <= 0.1;
    checks.push_back(std::move(j));
    const std::size_t mid = angles.size() / 2;
    Json r = make_check("richardson profile exceeds the square near the diagonal", "report");
    r["diagonal_radius"] = rz.radius[mid];
    r["square_diagonal_radius"] = square_radius(angles[mid]);
    r["min_excess_over_square"] = min_excess;
    r["axis_radius"] = Json::array({rz.radius.front(), rz.radius.back()});
    r["pass"] = rz.radius[mid] > square_radius(angles[mid]);
    checks.push_back(std::move(r));
  }
  {
    std::size_t total = 0;
    for (std::size_t v : dominance) total += v;
    Json j = make_check("hostile-growth radius <= richardson radius per angle", "report");
    j["violations"] = total;
    j["pass"] = total == 0;
    checks.push_back(std::move(j));
  }

  Json config;
  config["seed"] = c.seed;
  config["seeds"] = seeds;
  config["t"] = t;
  config["delta"] = d;
  config["angles"] = c.angles;
  return finish_suite("shape", std::move(config), std::move(checks), false);
}

// ---------------------------------------------------------------------------

SuiteResult suite_halfcolor(const RunConfig& c) {
  const double t = c.t_max.value_or(150.0);
  require(t > 0.0, ErrorCode::InvalidArgument, "halfcolor suite needs t > 0");
  const std::size_t seeds = c.replicates.value_or(20);
  const double d = c.delta;
  const Region square = Region::scaled(Region::unit_square(), 1 - d);
  const Region red_zone = Region::intersection(square, Region::band_k1(d));
  const Region blue_zone = Region::intersection(square, Region::band_k2(d));
  const ModelKind kinds[] = {ModelKind::Competition, ModelKind::HostileCompetition};
  const double cps[] = {t};

  struct Outcome {
    std::array<bool, 2> pass{};
    std::array<double, 2> rate{};
  };
  std::vector<Outcome> out(seeds);
  parallel_for(seeds, c.jobs, [&](std::size_t i) {
    const SnapshotSeries s = coupled_run(c.seed + i, kinds, t, cps, c.box_policy());
    for (std::size_t m = 0; m < 2; ++m) {
      const LatticeState& st = s.checkpoints[0].states[m];
      const auto r = check_containment(st, CellState::Red, red_zone, t, d);
      const auto b = check_containment(st, CellState::Blue, blue_zone, t, d);
      out[i].pass[m] = r.pass() && b.pass();
      const std::size_t tested = r.tested + b.tested;
      out[i].rate[m] = tested == 0 ? 1.0
                                   : static_cast<double>(r.violations.size() + b.violations.size()) /
                                         static_cast<double>(tested);
    }
  });

  Json checks = Json::array();
  for (std::size_t m = 0; m < 2; ++m) {
    std::size_t full = 0;
    double worst = 0.0;
    for (const Outcome& o : out) {
      full += o.pass[m];
      worst = std::max(worst, o.rate[m]);
    }
    const double frac = static_cast<double>(full) / static_cast<double>(seeds);
    const std::string model(to_string(kinds[m]));
    Json j = make_check(model + ": Red on Q2 band and Blue on Q1 band", "statistical");
    j["red_region"] = red_zone.describe();
    j["blue_region"] = blue_zone.describe();
    j["full_pass_fraction"] = frac;
    j["max_violation_rate"] = worst;
    j["pass"] = frac >= 0.95 && worst <= 0.01;
    checks.push_back(std::move(j));
  }
  Json config;
  config["seed"] = c.seed;
  config["seeds"] = seeds;
  config["t"] = t;
  config["delta"] = d;
  return finish_suite("halfcolor", std::move(config), std::move(checks), false);
}

// ---------------------------------------------------------------------------

Json arc_json(const Arc& a) {
  Json j;
  j["start"] = a.start;
  j["end"] = a.end;
  j["color"] = to_string(a.color);
  j["measure"] = a.measure();
  return j;
}

SuiteResult suite_sectors(const RunConfig& c) {
  const double t_to = c.t_max.value_or(400.0);
  require(t_to > 0.0, ErrorCode::InvalidArgument, "sectors suite needs t > 0");
  const double t_from = t_to / 2;
  const std::size_t seeds = c.replicates.value_or(50);
  SectorParams params;
  params.min_measure = c.rho;
  const double cps[] = {t_from, t_to};

  std::vector<StabilityReport> reports(seeds);
  std::vector<std::size_t> arcs_at_end(seeds, 0);
  parallel_for(seeds, c.jobs, [&](std::size_t i) {
    const SnapshotSeries s = run(c.seed + i, ModelKind::Competition, t_to, cps, c.box_policy());
    const SectorReport a = sector_arcs(s.checkpoints[0].states[0], t_from, params);
    const SectorReport b = sector_arcs(s.checkpoints[1].states[0], t_to, params);
    arcs_at_end[i] = b.arcs.size();
    reports[i] = sector_stability(a, b);
  });

  std::size_t with_survivor = 0;
  std::size_t with_arc = 0;
  Json runs = Json::array();
  for (std::size_t i = 0; i < seeds; ++i) {
    with_survivor += reports[i].surviving() > 0;
    with_arc += arcs_at_end[i] > 0;
    Json r;
    r["seed"] = c.seed + i;
    r["arcs_at_t"] = arcs_at_end[i];
    r["surviving"] = reports[i].surviving();
    Json matches = Json::array();
    for (const ArcMatch& m : reports[i].matches) {
      Json mj;
      mj["from"] = arc_json(m.from);
      mj["to"] = m.to ? arc_json(*m.to) : Json();
      mj["overlap"] = m.overlap;
      mj["start_drift"] = m.start_drift;
      mj["end_drift"] = m.end_drift;
      mj["survived"] = m.survived;
      matches.push_back(std::move(mj));
    }
    r["matches"] = std::move(matches);
    runs.push_back(std::move(r));
  }
  Json checks = Json::array();
  Json j = make_check("fraction of runs with a surviving monochromatic arc is positive", "statistical");
  j["fraction_with_arc_at_t"] = static_cast<double>(with_arc) / static_cast<double>(seeds);
  j["fraction_surviving"] = static_cast<double>(with_survivor) / static_cast<double>(seeds);
  j["pass"] = with_survivor > 0;
  checks.push_back(std::move(j));

  Json config;
  config["seed"] = c.seed;
  config["seeds"] = seeds;
  config["t_from"] = t_from;
  config["t_to"] = t_to;
  config["min_measure"] = params.min_measure;
  config["bins"] = params.bins;
  config["purity"] = params.purity;
  config["annulus"] = Json::array({params.r_min, params.r_max});
  SuiteResult r = finish_suite("sectors", std::move(config), std::move(checks), false);
  r.report["runs"] = std::move(runs);
  return r;
}

SuiteResult run_suite(const RunConfig& c, std::string_view name) {
  if (name == "coupling") return suite_coupling(c);
  if (name == "dual") return suite_dual(c);
  if (name == "shape") return suite_shape(c);
  if (name == "halfcolor") return suite_halfcolor(c);
  if (name == "lemma1") return suite_lemma1(c);
  if (name == "sectors") return suite_sectors(c);
  fail(ErrorCode::UnknownSuite, "unknown suite '" + std::string(name) + "'");
}

}  // namespace

// ---------------------------------------------------------------------------

SimulateOutcome cmd_simulate(const RunConfig& config) {
  config.validate();
  const double t = config.t_max.value_or(50.0);
  std::vector<ModelKind> kinds = config.models;
  if (kinds.empty()) kinds = {ModelKind::Competition};
  const std::vector<double> cps = default_checkpoints(config, t);
  SimulateOutcome out;
  out.series = coupled_run(config.seed, kinds, t, cps, config.box_policy());
  out.files = write_series(config.out_dir, out.series, config.ppm);
  return out;
}

VerifyOutcome cmd_verify(const RunConfig& config, std::string_view suite) {
  config.validate();
  if (suite != "all") {
    SuiteResult r = run_suite(config, suite);
    return {std::move(r.report), r.hard_failure};
  }
  Json suites = Json::array();
  bool hard = false;
  bool all_pass = true;
  for (std::string_view name : kSuiteNames) {
    if (name == "all") continue;
    SuiteResult r = run_suite(config, name);
    hard = hard || r.hard_failure;
    all_pass = all_pass && r.report["verdict"] == "pass";
    suites.push_back(std::move(r.report));
  }
  Json report;
  report["suite"] = "all";
  report["suites"] = std::move(suites);
  report["hard_failure"] = hard;
  report["verdict"] = all_pass ? "pass" : "fail";
  return {std::move(report), hard};
}

std::vector<std::filesystem::path> cmd_shape(const RunConfig& config) {
  config.validate();
  const ModelKind kind = config.models.empty() ? ModelKind::HostileGrowth : config.models.front();
  const std::vector<double> angles = quadrant_angles(config.angles);
  ShapeEstimate shape;
  Json meta;
  meta["seed"] = config.seed;
  if (config.shape_from_mu) {
    const std::int64_t n = config.n.value_or(200);
    const std::size_t reps = config.replicates.value_or(20);
    shape = shape_from_mu(config.seed, n, angles, reps, config.jobs);
    meta["source"] = "mu";
    meta["n"] = n;
  } else {
    const double t = config.t_max.value_or(150.0);
    require(t > 0.0, ErrorCode::InvalidArgument, "shape needs t > 0");
    const std::size_t reps = config.replicates.value_or(20);
    std::vector<SnapshotSeries> series(reps);
    const double cps[] = {t};
    parallel_for(reps, config.jobs, [&](std::size_t i) {
      series[i] = run(config.seed + i, kind, t, cps, config.box_policy());
    });
    shape = shape_from_snapshots(series, kind, angles);
    meta["source"] = "snapshots";
    meta["model"] = to_string(kind);
    meta["t"] = t;
  }
  meta["replicates"] = shape.replicates;
  double dev = 0.0;
  for (std::size_t a = 0; a < angles.size(); ++a) dev = std::max(dev, std::abs(shape.radius[a] - square_radius(angles[a])));
  meta["max_deviation_from_square"] = dev;

  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  require(!ec, ErrorCode::Io, "cannot create output directory " + config.out_dir.string());
  std::vector<std::filesystem::path> files;
  std::ostringstream csv;
  write_profile_csv(csv, shape);
  files.push_back(config.out_dir / "profile.csv");
  write_text_file(files.back(), csv.str());
  files.push_back(config.out_dir / "shape.json");
  write_text_file(files.back(), dump_json(meta));

  Json curv;
  curv["eps"] = config.eps;
  try {
    const CurvatureReport rep = curvature_diagnostic(shape, config.eps);
    curv["status"] = "ok";
    curv["flat_cap"] = rep.flat_cap;
    Json rows = Json::array();
    for (const CurvatureSample& s : rep.samples) {
      Json r;
      r["theta"] = s.angle;
      r["x"] = s.point.x;
      r["y"] = s.point.y;
      r["radius"] = s.radius ? Json(*s.radius) : Json();
      r["flat"] = s.flat;
      rows.push_back(std::move(r));
    }
    curv["samples"] = std::move(rows);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidArgument) throw;
    curv["status"] = "insufficient";
    curv["message"] = e.what();
  }
  files.push_back(config.out_dir / "curvature.json");
  write_text_file(files.back(), dump_json(curv));
  return files;
}

std::vector<std::filesystem::path> cmd_walk(const RunConfig& config) {
  config.validate();
  const DiagonalWalkStats walk = diagonal_walk(config.seed, config.k_max);
  const DiagonalWalkStats trials = diagonal_walk(rng::hash(config.seed, rng::Stream::Sampling, 0x57), config.trials);
  const GreedyStats greedy = greedy_two_step(rng::hash(config.seed, rng::Stream::Sampling, 0x57), config.trials);

  std::array<std::size_t, 3> counts{};
  for (Site d : trials.displacements) ++counts[static_cast<std::size_t>(d.y)];
  Json summary;
  summary["seed"] = config.seed;
  summary["k_max"] = config.k_max;
  summary["trials"] = config.trials;
  Json freq;
  const char* labels[] = {"(2,0)", "(1,1)", "(0,2)"};
  for (std::size_t k = 0; k < 3; ++k)
    freq[labels[k]] = static_cast<double>(counts[k]) / static_cast<double>(config.trials);
  summary["x1_frequencies"] = std::move(freq);
  summary["t1"] = summary_json(stats::summarize(trials.step_times));
  summary["greedy_tau"] = summary_json(greedy.summary);
  summary["s_k_over_k"] = walk.partial_sums.back() / static_cast<double>(config.k_max);
  summary["diagonal_visits"] = walk.diagonal_visits;

  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  require(!ec, ErrorCode::Io, "cannot create output directory " + config.out_dir.string());
  std::vector<std::filesystem::path> files;
  std::ostringstream csv;
  write_walk_csv(csv, walk);
  files.push_back(config.out_dir / "walk.csv");
  write_text_file(files.back(), csv.str());
  files.push_back(config.out_dir / "walk_summary.json");
  write_text_file(files.back(), dump_json(summary));
  return files;
}

void cmd_render(const std::filesystem::path& csv, const std::filesystem::path& out, std::optional<ModelKind> kind,
                std::optional<Box> box) {
  require(std::filesystem::exists(csv), ErrorCode::Io, "missing input file " + csv.string());
  double time = 0.0;
  if (!kind || !box) {
    const auto manifest_path = csv.parent_path() / "manifest.json";
    require(std::filesystem::exists(manifest_path), ErrorCode::InvalidArgument,
            "render needs --kind and --box when no manifest.json sits next to the CSV");
    const Manifest m = read_manifest(manifest_path);
    if (!box) box = m.box;
    if (!kind) {
      const std::string file = csv.filename().string();
      for (ModelKind k : m.kinds)
        for (std::size_t i = 0; i < m.checkpoints.size(); ++i)
          if (snapshot_file_name(k, i, "csv") == file) {
            kind = k;
            time = m.checkpoints[i];
          }
      require(kind.has_value(), ErrorCode::InvalidArgument, "CSV is not listed in manifest.json; pass --kind");
    }
  }
  std::istringstream in(read_text_file(csv));
  const LatticeState state = read_snapshot_csv(in, *kind, *box, time);
  std::ostringstream img;
  write_ppm(img, state);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  write_text_file(out, img.str());
}

Json cmd_mu(const RunConfig& config, Point direction) {
  config.validate();
  const std::int64_t n = config.n.value_or(500);
  const std::size_t reps = config.replicates.value_or(50);
  const MuEstimate m = mu_estimate(config.seed, direction, n, reps, config.jobs);
  Json j;
  j["seed"] = config.seed;
  j["direction"] = Json::array({direction.x, direction.y});
  j["n"] = n;
  j["target"] = site_json(m.target);
  j["replicates"] = reps;
  j["mu"] = summary_json(m.summary);
  return j;
}

void cmd_events(const RunConfig& config, const std::filesystem::path& out) {
  config.validate();
  const double t = config.t_max.value_or(10.0);
  const EventWindow window{config.seed, config.box_policy().side_for(t), t};
  const auto events = window_events(window);
  std::ostringstream csv;
  write_events_csv(csv, events);
  write_text_file(out, csv.str());
}

void cmd_trace(const RunConfig& config, Site z, double t, const std::filesystem::path& out) {
  config.validate();
  const double horizon = config.t_max.value_or(t);
  const EventWindow window{config.seed, config.box_policy().side_for(horizon), horizon};
  std::ostringstream csv;
  write_trace_csv(csv, trace_voter_path(window, z, t));
  write_text_file(out, csv.str());
}

}  // namespace ocm
