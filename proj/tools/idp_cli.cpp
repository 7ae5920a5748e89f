// Command-line front end: floorplan generation, heat maps, hull inspection,
// GP error evaluation, Pareto runs and smoothed-analysis trials.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "idp/idp.hpp"

namespace {

using namespace idp;

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kInternal = 3 };

Point parse_point(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ValidationError("expected a point as x,y but got '" + s + "'");
  try {
    std::size_t used = 0;
    const double x = std::stod(s.substr(0, comma), &used);
    const double y = std::stod(s.substr(comma + 1), &used);
    return {x, y};
  } catch (const std::logic_error&) {
    throw ValidationError("expected a point as x,y but got '" + s + "'");
  }
}

std::shared_ptr<const Floorplan> load_plan(const std::string& path) {
  return std::make_shared<const Floorplan>(load_floorplan(path));
}

/// Writes to `path`, or stdout for "" / "-".
template <class F>
void with_output(const std::string& path, F&& write, bool binary = false) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ValidationError("cannot write " + path);
  write(out);
}

GPConfig gp_config(double r, const std::optional<double>& u, std::uint64_t seed) {
  if (!(r > 1.0)) throw ValidationError("--r must be > 1");
  if (u) {
    if (*u < 0.0 || *u >= 1.0) throw ValidationError("--u must be in [0, 1)");
    return {r, *u};
  }
  return GPConfig::random(r, seed);
}

nlohmann::ordered_json stats_json(const GPStats& st, const std::vector<Extremes>& ext, double r) {
  nlohmann::ordered_json j;
  j["lambdas"] = st.lambdas;
  j["m_sizes"] = st.m_sizes;
  double mean_runs = 0.0;
  double mean_expected = 0.0;
  double max_expected = 0.0;
  for (std::size_t t = 0; t < st.unpruned_runs.size(); ++t) {
    mean_runs += st.unpruned_runs[t];
    const double e = expected_unpruned_runs(ext[t], r);
    mean_expected += e;
    max_expected = std::max(max_expected, e);
  }
  const double n = static_cast<double>(std::max<std::size_t>(st.unpruned_runs.size(), 1));
  j["mean_unpruned_runs"] = mean_runs / n;
  j["mean_expected_unpruned_runs"] = mean_expected / n;
  j["max_expected_unpruned_runs"] = max_expected;
  j["relaxations"] = st.relaxations;
  j["explicit_equivalent_relaxations"] = st.explicit_equivalent;
  j["skipped_fraction"] =
      st.explicit_equivalent ? 1.0 - static_cast<double>(st.relaxations) / static_cast<double>(st.explicit_equivalent)
                             : 0.0;
  j["noop_relaxations"] = st.noop_relaxations;
  j["seconds"] = st.seconds;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Indoor dominant path solver"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic floorplan");
  gen->require_subcommand(1);
  std::string gen_out;
  MazeParams maze;
  auto* gen_maze = gen->add_subcommand("maze", "Random spanning-tree maze");
  gen_maze->add_option("--seed", maze.seed, "Random seed");
  gen_maze->add_option("--cells", maze.cells, "Cells per side")->check(CLI::Range(2, 10000));
  gen_maze->add_option("--cell-size", maze.cell_size, "Cell size in meters");
  gen_maze->add_option("--out", gen_out, "Output file (default stdout)");
  OfficeParams office;
  auto* gen_office = gen->add_subcommand("office", "Regular office block");
  gen_office->add_option("--rows", office.rows, "Office rows")->check(CLI::Range(1, 10000));
  gen_office->add_option("--cols", office.cols, "Offices per row")->check(CLI::Range(1, 10000));
  gen_office->add_option("--out", gen_out, "Output file (default stdout)");

  // shared options
  std::string plan_path;
  std::string out_path;
  std::uint64_t seed = 1;
  double r = 2.0;
  std::optional<double> u;
  bool no_prune = false;
  std::string source_s;
  std::vector<std::string> dest_s;

  auto* heat = app.add_subcommand("heatmap", "Path loss over a grid of measurement points");
  double spacing = 1.0;
  std::string algo_s = "gp";
  double epsilon = 0.1;
  double tx_dbm = 0.0;
  heat->add_option("--plan", plan_path, "Floorplan JSON")->required();
  heat->add_option("--source", source_s, "Transmitter position x,y")->required();
  heat->add_option("--spacing", spacing, "Grid spacing in meters");
  heat->add_option("--algo", algo_s, "gp, exact or pareto");
  heat->add_option("--r", r, "GP ratio");
  heat->add_option("--u", u, "GP offset exponent in [0,1)");
  heat->add_option("--seed", seed, "Seed for the GP offset");
  heat->add_flag("--no-prune", no_prune, "Disable destination and corner pruning");
  heat->add_option("--epsilon", epsilon, "Pareto accuracy in dB");
  heat->add_option("--tx-dbm", tx_dbm, "Subtract this transmit power from the CSV values");
  heat->add_option("--out", out_path, "Output prefix (writes PREFIX.csv and PREFIX.pgm)")->required();

  auto* hull = app.add_subcommand("hull", "Exact hull of the (distance, loss) trade-off");
  hull->add_option("--plan", plan_path, "Floorplan JSON")->required();
  hull->add_option("--source", source_s, "Transmitter position x,y")->required();
  hull->add_option("--dest", dest_s, "Receiver position x,y (repeatable)")->required();
  hull->add_option("--out", out_path, "CSV output (default stdout)");

  auto* eval = app.add_subcommand("eval-error", "Compare GP against the exact solver on random pairs");
  std::size_t pairs = 1000;
  int u_draws = 1;
  eval->add_option("--plan", plan_path, "Floorplan JSON")->required();
  eval->add_option("--pairs", pairs, "Number of source/destination pairs");
  eval->add_option("--r", r, "GP ratio");
  eval->add_option("--seed", seed, "Seed for pair sampling and GP offsets");
  eval->add_option("--u-draws", u_draws, "GP offsets per pair")->check(CLI::PositiveNumber);
  eval->add_flag("--no-prune", no_prune, "Disable destination and corner pruning");
  eval->add_option("--out", out_path, "Per-pair CSV output (default stdout)");

  auto* pareto = app.add_subcommand("pareto", "Pareto-set approximation for one pair");
  pareto->add_option("--plan", plan_path, "Floorplan JSON")->required();
  pareto->add_option("--source", source_s, "Transmitter position x,y")->required();
  pareto->add_option("--dest", dest_s, "Receiver position x,y")->required()->expected(1);
  pareto->add_option("--epsilon", epsilon, "Accuracy in dB")->check(CLI::PositiveNumber);

  auto* smooth = app.add_subcommand("smoothed", "Extreme-point counts under random weight perturbation");
  std::optional<double> rho;
  int trials = 100;
  smooth->add_option("--plan", plan_path, "Floorplan JSON")->required();
  smooth->add_option("--source", source_s, "Transmitter position x,y")->required();
  smooth->add_option("--dest", dest_s, "Receiver position x,y")->required()->expected(1);
  smooth->add_option("--rho", rho, "Expected perturbation angle (default 1/sqrt(2m))");
  smooth->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  smooth->add_option("--seed", seed, "Base seed");
  smooth->add_option("--out", out_path, "CSV output (default stdout)");

  auto* stats = app.add_subcommand("stats", "Pruning and relaxation statistics of GP heat maps");
  int sources = 3;
  stats->add_option("--plan", plan_path, "Floorplan JSON")->required();
  stats->add_option("--r", r, "GP ratio");
  stats->add_option("--sources", sources, "Number of random grid sources")->check(CLI::PositiveNumber);
  stats->add_option("--seed", seed, "Seed for source sampling and GP offsets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_maze || *gen_office) {
      const Floorplan plan = *gen_maze ? generate_maze(maze) : generate_office(office);
      with_output(gen_out, [&](std::ostream& os) { os << to_json(plan); });
    } else if (*heat) {
      const auto plan = load_plan(plan_path);
      HeatMapOptions opt;
      opt.spacing = spacing;
      if (!(spacing > 0.0)) throw ValidationError("--spacing must be positive");
      opt.algo = parse_algo(algo_s);
      opt.gp = gp_config(r, u, seed);
      opt.prune = !no_prune;
      opt.epsilon = epsilon;
      const HeatMapRun run = compute_heatmap(build_corner_visibility(plan), parse_point(source_s), opt);
      with_output(out_path + ".csv", [&](std::ostream& os) { write_heatmap_csv(run.map, os, tx_dbm); });
      with_output(out_path + ".pgm", [&](std::ostream& os) { write_heatmap_pgm(run.map, os); }, true);
      if (run.gp_stats) std::cerr << stats_json(*run.gp_stats, run.extremes, r).dump() << '\n';
    } else if (*hull) {
      const auto plan = load_plan(plan_path);
      std::vector<Point> dests;
      for (const auto& d : dest_s) dests.push_back(parse_point(d));
      const G1 g = build_g1(build_corner_visibility(plan), parse_point(source_s), dests);
      with_output(out_path, [&](std::ostream& os) {
        os << "dest,B,sp_calls,point,dist_m,loss_db,obj_db,lambda_to_next\n" << std::setprecision(12);
        for (std::uint32_t t = 0; t < g.num_dests(); ++t) {
          PairHullSolver solver(g, t);
          const HullResult h = solver.solve();
          for (std::size_t i = 0; i < h.points.size(); ++i) {
            os << t << ',' << h.points.size() << ',' << h.sp_calls << ',' << i << ',' << h.points[i].dist << ','
               << h.points[i].loss << ',' << obj(h.points[i].dist, h.points[i].loss, plan->alpha()) << ',';
            if (i < h.breakpoints.size()) os << h.breakpoints[i];
            os << '\n';
          }
        }
      });
    } else if (*eval) {
      const auto plan = load_plan(plan_path);
      const auto cv = build_corner_visibility(plan);
      const auto samples = sample_pairs(measurement_grid(*plan), pairs, seed);
      std::vector<PairEval> evals;
      for (std::size_t k = 0; k < samples.size(); ++k)
        evals.push_back(evaluate_pair(cv, samples[k], r, u_draws, seed * 1000003ULL + k * 7919ULL, !no_prune));
      with_output(out_path, [&](std::ostream& os) {
        os << "pair,sx,sy,tx,ty,B,sp_calls,exact_obj_db,gp_obj_db,error_db\n" << std::setprecision(12);
        for (std::size_t k = 0; k < evals.size(); ++k) {
          const PairEval& e = evals[k];
          for (double o : e.gp_obj)
            os << k << ',' << e.pair.source.x << ',' << e.pair.source.y << ',' << e.pair.dest.x << ','
               << e.pair.dest.y << ',' << e.hull.points.size() << ',' << e.hull.sp_calls << ',' << e.exact.obj
               << ',' << o << ',' << o - e.exact.obj << '\n';
        }
      });
      const ErrorSummary s = summarize(evals);
      nlohmann::ordered_json j;
      j["samples"] = s.samples;
      j["min_error_db"] = s.min_error;
      j["mean_error_db"] = s.mean_error;
      j["p50_error_db"] = s.p50;
      j["p90_error_db"] = s.p90;
      j["p99_error_db"] = s.p99;
      j["max_error_db"] = s.max_error;
      j["fraction_exact"] = s.fraction_exact;
      j["worst_bound_db"] = worst_error_bound(r, plan->alpha());
      j["expected_bound_db"] = expected_error_bound(r, plan->alpha());
      j["mean_hull_points"] = s.mean_hull;
      j["max_hull_points"] = s.max_hull;
      nlohmann::ordered_json hist;
      for (const auto& [b, c] : s.hull_histogram) hist[std::to_string(b)] = c;
      j["hull_histogram"] = hist;
      std::cerr << j.dump() << '\n';
    } else if (*pareto) {
      const auto plan = load_plan(plan_path);
      const G1 g = build_g1(build_corner_visibility(plan), parse_point(source_s), {parse_point(dest_s.at(0))});
      const G2Explicit g2(g);
      const ParetoResult pr = run_pareto(g, g2, 0, epsilon);
      nlohmann::ordered_json j;
      j["dist_m"] = pr.path.dist;
      j["loss_db"] = pr.path.loss;
      j["obj_db"] = pr.obj;
      j["pl_db"] = pr.pl_db;
      j["epsilon_db"] = epsilon;
      j["delta_db"] = pr.delta;
      j["g2_nodes"] = g2.num_nodes();
      j["g2_edges"] = g2.num_edges();
      j["rounds"] = pr.rounds;
      j["max_buckets"] = pr.max_buckets;
      j["max_loss_db"] = pr.max_loss;
      j["stored_paths"] = pr.stored_paths;
      std::cout << j.dump(1) << '\n';
    } else if (*smooth) {
      const auto plan = load_plan(plan_path);
      const G1 g = build_g1(build_corner_visibility(plan), parse_point(source_s), {parse_point(dest_s.at(0))});
      const G2Explicit g2(g);
      PerturbationConfig cfg;
      cfg.rho = rho ? *rho : 1.0 / std::sqrt(2.0 * static_cast<double>(g2.num_edges()));
      if (!(cfg.rho > 0.0)) throw ValidationError("--rho must be positive");
      cfg.seed = seed;
      cfg.trials = trials;
      const TrialReport rep = smoothed_trial(g, g2, 0, cfg);
      with_output(out_path, [&](std::ostream& os) {
        os << "trial,B,rejections\n";
        for (std::size_t k = 0; k < rep.extreme_points.size(); ++k)
          os << k << ',' << rep.extreme_points[k] << ',' << rep.rejections[k] << '\n';
      });
      nlohmann::ordered_json j;
      j["m"] = rep.m;
      j["rho"] = cfg.rho;
      j["bound"] = rep.bound;
      j["mean_B"] = rep.mean_b();
      std::cerr << j.dump() << '\n';
    } else if (*stats) {
      const auto plan = load_plan(plan_path);
      const auto cv = build_corner_visibility(plan);
      const auto pts = measurement_grid(*plan);
      auto links = std::make_shared<const DestLinks>(cv, pts);
      std::mt19937_64 rng(seed);
      std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
      nlohmann::ordered_json all = nlohmann::ordered_json::array();
      for (int k = 0; k < sources; ++k) {
        const Point s = pts[pick(rng)] + Point{0.25, 0.25};
        HeatMapOptions opt;
        opt.gp = GPConfig::random(r, seed + static_cast<std::uint64_t>(k));
        const HeatMapRun run = compute_heatmap(cv, s, opt, links);
        nlohmann::ordered_json j = stats_json(*run.gp_stats, run.extremes, r);
        j["source"] = {s.x, s.y};
        j.erase("lambdas");
        j.erase("m_sizes");
        all.push_back(j);
      }
      std::cout << all.dump(1) << '\n';
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
