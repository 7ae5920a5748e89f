#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "idp/idp.hpp"
#include "oracles.hpp"

using namespace idp;

namespace {

/// Hull computed with the explicit engine as the SP oracle.
HullResult explicit_hull(const G1& g, std::uint32_t t) {
  const G2Explicit g2(g);
  return exact_hull([&](Lambda lam) { return *sp_explicit(g, g2, lam).paths[t]; });
}

void expect_monotone(const HullResult& h) {
  for (std::size_t i = 1; i < h.points.size(); ++i) {
    EXPECT_LT(h.points[i].dist, h.points[i - 1].dist);
    EXPECT_GT(h.points[i].loss, h.points[i - 1].loss);
  }
  for (std::size_t i = 1; i < h.breakpoints.size(); ++i) EXPECT_LT(h.breakpoints[i - 1], h.breakpoints[i]);
  if (h.points.size() >= 2) {
    EXPECT_EQ(h.sp_calls, 2 * static_cast<int>(h.points.size()) - 1);
    EXPECT_EQ(h.breakpoints.size(), h.points.size() - 1);
  }
}

}  // namespace

TEST(Objective, Values) {
  EXPECT_DOUBLE_EQ(obj(1.0, 0.0, oracle::kAlpha), 0.0);
  EXPECT_NEAR(obj(10.0, 0.0, 20.0 / std::log(10.0)), 20.0, 1e-12);
  EXPECT_NEAR(obj(std::exp(1.0), 1.0, 8.686), 9.686, 1e-12);
  EXPECT_THROW(obj(0.0, 1.0, 8.686), std::invalid_argument);
}

TEST(PathLoss, Values) {
  const RadioConstants rc;
  EXPECT_NEAR(path_loss_db(1.0, 0.0, rc), 40.0, 1e-12);
  EXPECT_NEAR(path_loss_db(10.0, 0.0, rc), 60.0, 1e-12);
  EXPECT_NEAR(path_loss_db(5.0, 2.0, rc), 40.0 + 20.0 * std::log10(5.0) + 2.0, 1e-12);
  EXPECT_NEAR(path_loss_db(5.0, 2.0, rc), 55.979, 1e-3);
}

TEST(Hull, EmptyPlanIsOnePoint) {
  const G1 g = build_g1(Floorplan{}, {0, 0}, {{3, 4}});
  PairHullSolver solver(g, 0);
  const HullResult h = solver.solve();
  ASSERT_EQ(h.points.size(), 1u);
  EXPECT_EQ(h.sp_calls, 2);
  EXPECT_DOUBLE_EQ(h.points[0].dist, 5.0);
  EXPECT_TRUE(h.breakpoints.empty());
}

TEST(Hull, TwoPointsUseThreeCalls) {
  const Floorplan p("w", {{{0, -1}, {0, 5}, 15, 5}}, {});
  const G1 g = build_g1(p, {-1, 0}, {{1, 0}});
  PairHullSolver solver(g, 0);
  const HullResult h = solver.solve();
  ASSERT_EQ(h.points.size(), 2u);
  EXPECT_EQ(h.sp_calls, 3);
  EXPECT_NEAR(h.points[0].dist, 2 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(h.points[0].loss, 5.0, 1e-12);
  EXPECT_NEAR(h.points[1].dist, 2.0, 1e-12);
  EXPECT_NEAR(h.points[1].loss, 15.0, 1e-12);
  ASSERT_EQ(h.breakpoints.size(), 1u);
  EXPECT_NEAR(h.breakpoints[0], 10.0 / (2 * std::sqrt(2.0) - 2.0), 1e-9);
}

TEST(Hull, EqualsBruteForceCloudHull) {
  std::mt19937_64 rng(41);
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Floorplan p = oracle::random_plan(seed, 3);
    if (p.corners().size() > 7) continue;
    const G1 g = build_g1(p, oracle::random_free_point(p, rng), {oracle::random_free_point(p, rng)});
    const G2Explicit g2(g);
    std::vector<oracle::DL> cloud;
    oracle::enumerate_corner_simple(
        g2, 0, [](std::uint32_t, double, double) { return true; },
        [&](const oracle::PathPoint& path) { cloud.push_back({path.dist, path.loss}); });
    const auto want = oracle::lower_left_hull(cloud);
    PairHullSolver solver(g, 0);
    const HullResult got = solver.solve();
    ASSERT_EQ(got.points.size(), want.size()) << "seed " << seed;
    for (std::size_t i = 0; i < want.size(); ++i) {
      EXPECT_NEAR(got.points[i].dist, want[i].d, 1e-9);
      EXPECT_NEAR(got.points[i].loss, want[i].l, 1e-9);
    }
    expect_monotone(got);
    ++compared;
  }
  EXPECT_GE(compared, 15);
}

TEST(Hull, PrunedSolverMatchesExplicitHull) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    MazeParams mp;
    mp.seed = seed;
    mp.cells = 5;
    const Floorplan p = generate_maze(mp);
    const auto pts = measurement_grid(p);
    std::mt19937_64 rng(seed);
    for (int k = 0; k < 4; ++k) {
      const Point s = pts[rng() % pts.size()], t = pts[rng() % pts.size()];
      if (s == t) continue;
      const G1 g = build_g1(p, s, {t});
      PairHullSolver solver(g, 0);
      const HullResult a = solver.solve();
      const HullResult b = explicit_hull(g, 0);
      ASSERT_EQ(a.points.size(), b.points.size());
      for (std::size_t i = 0; i < a.points.size(); ++i) {
        EXPECT_NEAR(a.points[i].dist, b.points[i].dist, 1e-9);
        EXPECT_NEAR(a.points[i].loss, b.points[i].loss, 1e-9);
      }
      expect_monotone(a);
    }
  }
}

TEST(Dominant, MinObjAgreesWithBruteForce) {
  std::mt19937_64 rng(43);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Floorplan p = oracle::random_plan(seed, 4);
    const G1 g = build_g1(p, oracle::random_free_point(p, rng), {oracle::random_free_point(p, rng)});
    const G2Explicit g2(g);
    PairHullSolver solver(g, 0);
    const DominantPath dp = dominant_path(solver.solve(), p.constants());
    EXPECT_NEAR(dp.obj, oracle::brute_min_obj(g, g2, 0, p.alpha()), 1e-9) << "seed " << seed;
  }
}

TEST(Dominant, PicksLowerObjective) {
  RadioConstants rc;
  rc.freespace_exponent = 8.686 * std::log(10.0) / 10.0;  // alpha = 8.686
  HullResult h;
  h.points.push_back({10.0, 0.0, {}});
  h.points.push_back({5.0, 7.0, {}});
  const DominantPath dp = dominant_path(h, rc);
  EXPECT_DOUBLE_EQ(dp.dist, 10.0);
  EXPECT_NEAR(dp.obj, 8.686 * std::log(10.0), 1e-9);
  EXPECT_NEAR(obj(5.0, 7.0, 8.686), 20.98, 0.01);
  EXPECT_NEAR(dp.lambda_star, 0.8686, 1e-12);

  HullResult one;
  one.points.push_back({8.686, 3.0, {}});
  EXPECT_NEAR(dominant_path(one, rc).lambda_star, 1.0, 1e-12);
  EXPECT_THROW(dominant_path(HullResult{}, rc), std::invalid_argument);
}
