#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "idp/generators.hpp"
#include "idp/gp.hpp"
#include "idp/hull.hpp"
#include "idp/pareto.hpp"

namespace idp {

/// Path loss on a grid of measurement points (cell centers), row-major from
/// the lower-left corner.
struct HeatMap {
  Point origin;
  double cell = 1.0;
  int width = 0;
  int height = 0;
  std::vector<double> values;  // dB

  Point center(int i, int j) const { return {origin.x + (i + 0.5) * cell, origin.y + (j + 0.5) * cell}; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * width + i]; }
};

enum class Algo { Gp, Exact, Pareto };

inline Algo parse_algo(const std::string& s) {
  if (s == "gp") return Algo::Gp;
  if (s == "exact") return Algo::Exact;
  if (s == "pareto") return Algo::Pareto;
  throw ValidationError("unknown algorithm '" + s + "' (expected gp, exact or pareto)");
}

struct HeatMapOptions {
  double spacing = 1.0;
  Algo algo = Algo::Gp;
  GPConfig gp;
  bool prune = true;
  double epsilon = 0.1;  // pareto
  /// Refuse the pareto heat map when the socket graph would have more intra
  /// edges than this.
  std::uint64_t pareto_edge_limit = 2'000'000;
};

struct HeatMapRun {
  HeatMap map;
  std::optional<GPStats> gp_stats;
  std::vector<Extremes> extremes;  // gp only
};

/// Grid of measurement points; a point coinciding with the source is dropped
/// and reported as PL of the reference distance.
inline HeatMapRun compute_heatmap(std::shared_ptr<const CornerVisibility> cv, Point source, const HeatMapOptions& opt,
                                  std::shared_ptr<const DestLinks> links = nullptr) {
  const Floorplan& plan = cv->plan();
  HeatMapRun run;
  const auto [lo, hi] = plan.bounding_box();
  HeatMap& hm = run.map;
  hm.origin = lo;
  hm.cell = opt.spacing;
  hm.width = static_cast<int>(std::floor((hi.x - lo.x) / opt.spacing + 1e-9));
  hm.height = static_cast<int>(std::floor((hi.y - lo.y) / opt.spacing + 1e-9));
  std::vector<Point> pts;
  for (int j = 0; j < hm.height; ++j)
    for (int i = 0; i < hm.width; ++i) pts.push_back(hm.center(i, j));
  // A measurement point on the source or on a corner is moved toward the
  // interior of its cell.
  std::vector<Point> dests = pts;
  for (Point& p : dests) {
    for (int k = 0; k < 4 && (plan.corner_near(p) || distance(p, source) <= kGeomEps); ++k)
      p = p + 10.0 * kGeomEps * Point{1.0, 0.5};
  }
  if (!links) links = std::make_shared<const DestLinks>(cv, dests);
  G1 g(links, source);
  hm.values.assign(pts.size(), 0.0);
  const RadioConstants& rc = plan.constants();

  switch (opt.algo) {
    case Algo::Gp: {
      GPSession session(g);
      GPResult r = session.run(opt.gp, opt.prune);
      for (std::size_t k = 0; k < pts.size(); ++k) hm.values[k] = r.dests[k].pl_db;
      run.gp_stats = std::move(r.stats);
      run.extremes = session.extremes();
      break;
    }
    case Algo::Exact: {
      ImplicitEngine engine(g);
      SPResult r0 = engine.run(Lambda::of(0.0));
      for (std::uint32_t t = 0; t < g.num_dests(); ++t) {
        PairHullSolver solver(g, t, &engine);
        solver.set_sp0(*r0.paths[t]);
        const DominantPath dp = dominant_path(solver.solve(), rc);
        hm.values[t] = dp.pl_db;
      }
      break;
    }
    case Algo::Pareto: {
      std::uint64_t intra = 0;
      for (std::uint32_t c = 0; c < g.num_corners(); ++c)
        intra += static_cast<std::uint64_t>(g.corner_in_edges(c).size()) * g.out_edges(g.corner_node(c)).size();
      if (intra > opt.pareto_edge_limit)
        throw ValidationError("pareto heat map: socket graph would have " + std::to_string(intra) +
                              " intra-corner edges (limit " + std::to_string(opt.pareto_edge_limit) +
                              "); use --algo gp or exact");
      G2Explicit g2(g);
      for (std::uint32_t t = 0; t < g.num_dests(); ++t) hm.values[t] = run_pareto(g, g2, t, opt.epsilon).pl_db;
      break;
    }
  }
  return run;
}

inline void write_heatmap_csv(const HeatMap& hm, std::ostream& os, double tx_dbm = 0.0) {
  os << "x,y,pl_db\n" << std::setprecision(10);
  for (int j = 0; j < hm.height; ++j)
    for (int i = 0; i < hm.width; ++i) {
      const Point c = hm.center(i, j);
      os << c.x << ',' << c.y << ',' << hm.at(i, j) - tx_dbm << '\n';
    }
}

/// Binary 8-bit PGM, top row first; [min, max] maps linearly to [255, 0].
inline void write_heatmap_pgm(const HeatMap& hm, std::ostream& os) {
  double lo = kInf;
  double hi = -kInf;
  for (double v : hm.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  os << "P5\n" << hm.width << ' ' << hm.height << "\n255\n";
  for (int j = hm.height - 1; j >= 0; --j)
    for (int i = 0; i < hm.width; ++i) {
      const double f = hi > lo ? (hm.at(i, j) - lo) / (hi - lo) : 0.0;
      os.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (1.0 - f)))));
    }
}

// ---------------------------------------------------------------------------
// Exact-vs-GP error evaluation on random pairs

struct PairSample {
  Point source;
  Point dest;
};

/// Pairs of distinct measurement points drawn uniformly.
inline std::vector<PairSample> sample_pairs(const std::vector<Point>& pts, std::size_t count, std::uint64_t seed) {
  if (pts.size() < 2) throw ValidationError("need at least two measurement points");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  std::vector<PairSample> out;
  out.reserve(count);
  while (out.size() < count) {
    const std::size_t a = pick(rng);
    const std::size_t b = pick(rng);
    if (a != b) out.push_back({pts[a], pts[b]});
  }
  return out;
}

struct PairEval {
  PairSample pair;
  HullResult hull;
  DominantPath exact;
  std::vector<double> gp_obj;  // one per offset draw
  std::vector<std::uint32_t> gp_unpruned_runs;
  Extremes extremes;
  std::uint64_t noop_bound_violations = 0;
};

/// Exact hull plus GP(r) for `u_draws` offsets (offset k uses seed u_seed + k).
inline PairEval evaluate_pair(const std::shared_ptr<const CornerVisibility>& cv, const PairSample& pr, double r,
                              int u_draws, std::uint64_t u_seed, bool prune = true) {
  PairEval ev;
  ev.pair = pr;
  G1 g = build_g1(cv, pr.source, {pr.dest});
  PairHullSolver solver(g, 0);
  ev.hull = solver.solve();
  ev.exact = dominant_path(ev.hull, g.plan().constants());
  std::vector<std::optional<PathSummary>> sp0{solver.sp0()};
  GPSession session(g, {}, std::move(sp0));
  ev.extremes = session.extremes()[0];
  for (int k = 0; k < u_draws; ++k) {
    GPResult res = session.run(GPConfig::random(r, u_seed + static_cast<std::uint64_t>(k)), prune);
    ev.gp_obj.push_back(res.dests[0].obj);
    ev.gp_unpruned_runs.push_back(res.stats.unpruned_runs[0]);
    ev.noop_bound_violations += res.stats.noop_bound_violations;
  }
  ev.noop_bound_violations += solver.noop_bound_violations();
  return ev;
}

struct ErrorSummary {
  std::size_t samples = 0;
  double min_error = 0.0;
  double max_error = 0.0;
  double mean_error = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
  double fraction_exact = 0.0;  // error <= 1e-9
  double mean_hull = 0.0;
  int max_hull = 0;
  std::map<int, int> hull_histogram;
};

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const std::size_t j = std::min(i + 1, v.size() - 1);
  return v[i] + (pos - static_cast<double>(i)) * (v[j] - v[i]);
}

inline ErrorSummary summarize(const std::vector<PairEval>& evals) {
  ErrorSummary s;
  std::vector<double> errs;
  double hull_sum = 0.0;
  for (const PairEval& e : evals) {
    const int b = static_cast<int>(e.hull.points.size());
    ++s.hull_histogram[b];
    hull_sum += b;
    s.max_hull = std::max(s.max_hull, b);
    for (double o : e.gp_obj) errs.push_back(o - e.exact.obj);
  }
  s.samples = errs.size();
  if (errs.empty()) return s;
  s.mean_hull = hull_sum / static_cast<double>(evals.size());
  s.min_error = *std::min_element(errs.begin(), errs.end());
  s.max_error = *std::max_element(errs.begin(), errs.end());
  double sum = 0.0;
  std::size_t exact = 0;
  for (double x : errs) {
    sum += x;
    exact += x <= 1e-9 ? 1 : 0;
  }
  s.mean_error = sum / static_cast<double>(errs.size());
  s.fraction_exact = static_cast<double>(exact) / static_cast<double>(errs.size());
  s.p50 = quantile(errs, 0.5);
  s.p90 = quantile(errs, 0.9);
  s.p99 = quantile(errs, 0.99);
  return s;
}

}  // namespace idp
