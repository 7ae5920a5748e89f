#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "idp/idp.hpp"
#include "oracles.hpp"

using namespace idp;

namespace {
constexpr double kA = 8.686;
}

TEST(Bounds, WorstCaseAtTwo) {
  EXPECT_NEAR(worst_error_bound(2.0, oracle::kAlpha), 0.5182, 5e-5);
  EXPECT_NEAR(worst_error_bound(2.0, oracle::kAlpha), oracle::gp_worst_numeric(2.0, oracle::kAlpha), 1e-6);
}

TEST(Bounds, WorstCaseMatchesNumericMaximum) {
  for (double r : {1.1, 1.5, std::exp(1.0), 4.0, 10.0, 100.0})
    EXPECT_NEAR(worst_error_bound(r, kA), oracle::gp_worst_numeric(r, kA), 1e-6 * std::max(1.0, std::log(r))) << r;
  // At r = e the closed form is alpha (-1 + 1/(e-1) + ln(e-1)).
  const double e = std::exp(1.0);
  EXPECT_NEAR(worst_error_bound(e, kA), kA * (-1.0 + 1.0 / (e - 1.0) + std::log(e - 1.0)), 1e-12);
  EXPECT_NEAR(worst_error_bound(e, oracle::kAlpha), 1.070984, 1e-6);
}

TEST(Bounds, VanishesAsRatioApproachesOne) { EXPECT_LT(worst_error_bound(1.0 + 1e-6, kA), 1e-5); }

TEST(Bounds, Expected) {
  EXPECT_NEAR(expected_error_bound(2.0, oracle::kAlpha), 0.1732, 5e-5);
  EXPECT_NEAR(expected_error_bound(100.0, oracle::kAlpha), 6.6, 0.1);
  for (double r : {1.5, 2.0, 4.0, 100.0}) {
    EXPECT_NEAR(expected_error_bound(r, kA), oracle::gp_expected_numeric(r, kA), 1e-6 * std::max(1.0, r / 10)) << r;
    EXPECT_LT(expected_error_bound(r, kA), worst_error_bound(r, kA));
  }
  EXPECT_THROW(expected_error_bound(1.0, kA), std::invalid_argument);
}

TEST(Interval, HandValues) {
  const GPConfig cfg{2.0, 0.0};
  EXPECT_NEAR(gamma_hat(2.0), 2.0 * std::log(2.0), 1e-15);
  const ActiveInterval a = active_interval(10.0, 10.0, cfg, kA);
  EXPECT_NEAR(a.lo, kA * 2 * std::log(2.0) / 20.0, 1e-12);
  EXPECT_NEAR(a.hi, kA * 2 * std::log(2.0) / 10.0, 1e-12);
  EXPECT_NEAR(a.lo, 0.6021, 1e-4);
  EXPECT_NEAR(a.hi, 1.2041, 1e-4);
  EXPECT_LT(active_interval(1.0, 1e12, cfg, kA).lo, 1e-11);
  for (double dmax : {1.0, 3.0, 70.0}) {
    const ActiveInterval b = active_interval(1.0, dmax, GPConfig{3.0, 0.2}, kA);
    EXPECT_NEAR(b.hi / b.lo, 3.0 * dmax, 1e-9 * dmax);
  }
  EXPECT_THROW(active_interval(2.0, 1.0, cfg, kA), std::invalid_argument);
}

TEST(Grid, CoversIntervalWithExpectedCount) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double r = 1.5 + 3 * u(rng);
    const GPConfig cfg{r, u(rng)};
    const double d = 1 + 50 * u(rng);
    const auto one = lambda_grid(d, d, cfg, kA);  // width r
    EXPECT_TRUE(one.size() == 1 || one.size() == 2) << one.size();
    const int kk = 1 + static_cast<int>(4 * u(rng));
    const auto many = lambda_grid(d, d * std::pow(r, kk - 1), cfg, kA);  // width r^kk
    EXPECT_TRUE(static_cast<int>(many.size()) == kk || static_cast<int>(many.size()) == kk + 1);
    for (std::size_t i = 1; i < many.size(); ++i) EXPECT_NEAR(many[i] / many[i - 1], r, 1e-9);
  }
}

TEST(Grid, OffsetShiftByRatioIsSameGrid) {
  const GPConfig a{2.0, 0.3};
  const GPConfig b{2.0, 1.3};
  const auto ga = lambda_grid(1.0, 40.0, a, kA);
  const auto gb = lambda_grid(1.0, 40.0, b, kA);
  ASSERT_EQ(ga.size(), gb.size());
  for (std::size_t i = 0; i < ga.size(); ++i) EXPECT_NEAR(ga[i], gb[i], 1e-12 * ga[i]);
}

TEST(Pruning, DestinationSets) {
  const GPConfig cfg{2.0, 0.0};
  std::vector<Extremes> ext{{10.0, 10.0, 0, 0}, {1.0, 2.0, 0, 0}};
  const ActiveInterval a0 = active_interval(10.0, 10.0, cfg, kA);
  EXPECT_EQ(destinations_for(0.5 * (a0.lo + a0.hi), ext, cfg, kA), (std::vector<std::uint32_t>{0}));
  EXPECT_TRUE(destinations_for(1000.0, ext, cfg, kA).empty());
  // Every destination lies in some grid lambda's set.
  const auto grid = lambda_grid(1.0, 10.0, cfg, kA);
  std::vector<int> hit(2, 0);
  for (double lam : grid)
    for (auto t : destinations_for(lam, ext, cfg, kA)) hit[t] = 1;
  EXPECT_EQ(hit, (std::vector<int>{1, 1}));
}

TEST(Pruning, CornerSets) {
  // Corner (5,0) lies on the s-t segment; corner (5,40) is far off.
  const Floorplan p("c", {{{5, 0}, {5, -1}, 2, 5}, {{5, 40}, {6, 40}, 2, 5}}, {});
  const G1 g = build_g1(p, {0, 0}, {{10, 0}});
  std::vector<Extremes> ext{{10.0, 10.0, 0, 0}};
  const SearchFilter f = prune_corners(g, {0}, ext);
  for (std::uint32_t c = 0; c < g.num_corners(); ++c) {
    const Point q = p.corners()[c].position;
    if (q == Point{5, 0}) EXPECT_TRUE(f.corner_active[c]);
    if (q.y == 40) EXPECT_FALSE(f.corner_active[c]);
  }
}

TEST(GP, EmptyPlanIsExact) {
  const G1 g = build_g1(Floorplan{}, {0, 0}, {{1, 0}, {30, 4}, {0.2, 0.1}});
  const GPResult r = run_gp(g, GPConfig{2.0, 0.4});
  // Edge lengths are snapped to 2^-40; alpha ln d magnifies that by alpha / d.
  for (std::uint32_t t = 0; t < 3; ++t)
    EXPECT_NEAR(r.dests[t].obj, obj(distance({0, 0}, g.dests()[t]), 0.0, g.plan().alpha()), 1e-10);
}

TEST(GP, ErrorWithinWorstBoundOnMaze) {
  MazeParams mp;
  mp.seed = 5;
  mp.cells = 8;
  auto plan = std::make_shared<const Floorplan>(generate_maze(mp));
  const auto cv = build_corner_visibility(plan);
  const auto pairs = sample_pairs(measurement_grid(*plan), 40, 9);
  const double bound = worst_error_bound(2.0, plan->alpha());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    for (bool prune : {true, false}) {
      const PairEval ev = evaluate_pair(cv, pairs[k], 2.0, 4, 100 + k, prune);
      for (double o : ev.gp_obj) {
        EXPECT_GE(o - ev.exact.obj, -1e-9);
        EXPECT_LE(o - ev.exact.obj, bound + 1e-9);
      }
      EXPECT_EQ(ev.noop_bound_violations, 0u);
    }
  }
}

TEST(GP, HeatMapAgreesWithExactWithinBound) {
  MazeParams mp;
  mp.seed = 8;
  mp.cells = 5;
  auto plan = std::make_shared<const Floorplan>(generate_maze(mp));
  const auto cv = build_corner_visibility(plan);
  HeatMapOptions opt;
  opt.gp = GPConfig{2.0, 0.77};
  const HeatMapRun gp = compute_heatmap(cv, {4.5, 7.5}, opt);
  opt.algo = Algo::Exact;
  const HeatMapRun ex = compute_heatmap(cv, {4.5, 7.5}, opt);
  ASSERT_EQ(gp.map.values.size(), ex.map.values.size());
  for (std::size_t i = 0; i < gp.map.values.size(); ++i) {
    EXPECT_GE(gp.map.values[i] - ex.map.values[i], -1e-9);
    EXPECT_LE(gp.map.values[i] - ex.map.values[i], worst_error_bound(2.0, plan->alpha()) + 1e-9);
  }
  EXPECT_LE(gp.gp_stats->relaxations, gp.gp_stats->explicit_equivalent);
}

TEST(GP, UnprunedRunCountMatchesGridMembership) {
  MazeParams mp;
  mp.cells = 6;
  const Floorplan p = generate_maze(mp);
  const G1 g = build_g1(p, {7.75, 7.6}, measurement_grid(p));
  GPSession session(g);
  const GPConfig cfg{2.0, 0.25};
  const GPResult r = session.run(cfg);
  for (std::uint32_t t = 0; t < g.num_dests(); ++t) {
    const ActiveInterval a = active_interval(session.extremes()[t].dmin, session.extremes()[t].dmax, cfg, p.alpha());
    std::uint32_t n = 0;
    for (double lam : r.stats.lambdas) n += a.contains(lam);
    EXPECT_EQ(r.stats.unpruned_runs[t], n);
    EXPECT_GE(n, 1u);
  }
}
