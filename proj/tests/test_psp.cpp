#include <gtest/gtest.h>

#include <random>

#include "idp/idp.hpp"
#include "oracles.hpp"

using namespace idp;

namespace {

int tie_splits = 0;

/// Labels must agree on the primary key. Equal-cost alternatives may keep
/// different (loss, dist) splits once rounding breaks the tie.
void expect_same_label(Label a, Label b, Lambda lam, const char* what, std::uint32_t id) {
  ASSERT_EQ(a.reached(), b.reached()) << what << ' ' << id;
  if (!a.reached()) return;
  const Key ka = key_of(a, lam), kb = key_of(b, lam);
  EXPECT_NEAR(ka.k1, kb.k1, 1e-9 * std::max(1.0, std::abs(ka.k1))) << what << ' ' << id;
  if (std::abs(ka.k1 - kb.k1) > 1e-9 * std::max(1.0, std::abs(ka.k1))) return;
  if (std::abs(ka.k2 - kb.k2) > 1e-9) ++tie_splits;
}

/// Compares every socket and destination label of the two engines.
void compare_engines(const G1& g, Lambda lam, const SearchFilter& f) {
  const G2Explicit g2(g, f);
  ExplicitLabels ex;
  SPOptions all;
  all.early_exit = false;
  sp_explicit(g, g2, lam, all, &ex);
  ImplicitEngine engine(g);
  const SPResult r = engine.run(lam, f, all);
  EXPECT_EQ(r.noop_bound_violations, 0u);
  for (std::uint32_t e = 0; e < g.num_edges(); ++e) {
    if (g2.in_socket(e) != UINT32_MAX) expect_same_label(engine.in_label(e), ex.node[g2.in_socket(e)], lam, "in", e);
    if (g2.out_socket(e) != UINT32_MAX) expect_same_label(engine.out_label(e), ex.node[g2.out_socket(e)], lam, "out", e);
  }
  for (std::uint32_t t = 0; t < g.num_dests(); ++t)
    if (f.dest_ok(t)) expect_same_label(engine.dest_label(t), ex.node[g2.dest_node(t)], lam, "dest", t);
}

/// Recomputes a path's (dist, loss) from its G1 edges and turn losses.
void expect_consistent(const G1& g, const PathSummary& p) {
  double d = 0.0, l = 0.0;
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    d += g.edge(p.edges[i]).dist;
    l += g.edge(p.edges[i]).loss;
    if (i > 0) {
      EXPECT_EQ(g.edge(p.edges[i - 1]).to, g.edge(p.edges[i]).from);
      l += intra_corner_loss(g, p.edges[i - 1], p.edges[i]);
    }
  }
  EXPECT_NEAR(d, p.dist, 1e-9);
  EXPECT_NEAR(l, p.loss, 1e-9);
  ASSERT_EQ(p.nodes.size(), p.edges.size() + 1);
  EXPECT_EQ(p.nodes.front(), 0u);
}

}  // namespace

TEST(Keys, LexicographicOrder) {
  const Label a{2.0, 3.0}, b{10.0, 1.0};  // (loss, dist)
  EXPECT_TRUE(key_of(a, Lambda::of(1.0)) < key_of(b, Lambda::of(1.0)));
  EXPECT_DOUBLE_EQ(key_of(a, Lambda::of(1.0)).k1, 5.0);
  EXPECT_TRUE(key_of(b, Lambda::inf()) < key_of(a, Lambda::inf()));
  EXPECT_TRUE(key_of(a, Lambda::of(0.0)) < key_of(b, Lambda::of(0.0)));
  EXPECT_TRUE(key_of(a, Lambda::of(0.0)) < key_of(Label{}, Lambda::of(0.0)));
  EXPECT_THROW(Lambda::of(-1.0), std::invalid_argument);
}

TEST(Explicit, PicksHybridMinimumAmongParallelRoutes) {
  // Two s-t routes: the direct edge and the detour via the wall's lower end.
  // Weights are overridden so the routes cost (1, 10) and (3, 2).
  const Floorplan p("w", {{{0, 0}, {0, 5}, 2, 5}}, {});
  const G1 g = build_g1(p, {-3, -1}, {{3, -1}});
  const G2Explicit g2(g);
  std::vector<double> dw(g2.num_edges(), 1000.0), lw(g2.num_edges(), 1000.0);
  std::uint32_t via = UINT32_MAX;
  for (std::uint32_t c = 0; c < p.corners().size(); ++c)
    if (p.corners()[c].position == Point{0, 0}) via = g.corner_node(c);
  for (std::uint32_t i = 0; i < g2.num_edges(); ++i) {
    const G2Edge& e = g2.edge(i);
    if (e.g1_edge == UINT32_MAX) {
      if (g2.node(e.from).corner == via - 1) dw[i] = lw[i] = 0.0;
      continue;
    }
    const G1Edge& x = g.edge(e.g1_edge);
    if (x.from == 0 && x.to == g.dest_node(0)) dw[i] = 1.0, lw[i] = 10.0;
    if (x.from == 0 && x.to == via) dw[i] = 1.0, lw[i] = 1.0;
    if (x.from == via && x.to == g.dest_node(0)) dw[i] = 2.0, lw[i] = 1.0;
  }
  auto run = [&](Lambda lam) { return *sp_explicit(g, g2, lam, {}, nullptr, &dw, &lw).paths[0]; };
  const PathSummary p1 = run(Lambda::of(1.0));
  EXPECT_DOUBLE_EQ(p1.dist, 3.0);
  EXPECT_DOUBLE_EQ(p1.loss + 1.0 * p1.dist, 5.0);
  EXPECT_DOUBLE_EQ(run(Lambda::inf()).dist, 1.0);
  EXPECT_DOUBLE_EQ(run(Lambda::inf()).loss, 10.0);
  EXPECT_DOUBLE_EQ(run(Lambda::of(0.0)).loss, 2.0);
}

TEST(Implicit, MatchesExplicitOnRandomPlans) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lam(0.0, 20.0);
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    const Floorplan p = oracle::random_plan(seed, 5);
    const G1 g = build_g1(p, oracle::random_free_point(p, rng),
                          {oracle::random_free_point(p, rng), oracle::random_free_point(p, rng)});
    compare_engines(g, Lambda::of(0.0), {});
    compare_engines(g, Lambda::inf(), {});
    for (int k = 0; k < 5; ++k) compare_engines(g, Lambda::of(lam(rng)), {});
  }
}

TEST(Implicit, MatchesExplicitOnSmallMazes) {
  std::mt19937_64 rng(23);
  std::exponential_distribution<double> lam(0.5);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    MazeParams mp;
    mp.seed = seed;
    mp.cells = 4;
    const Floorplan p = generate_maze(mp);
    const auto pts = measurement_grid(p);
    const G1 g = build_g1(p, pts[seed] + Point{0.25, 0.1}, pts);
    for (int k = 0; k < 6; ++k) compare_engines(g, Lambda::of(k == 0 ? 0.0 : lam(rng)), {});
    compare_engines(g, Lambda::inf(), {});
  }
}

TEST(Implicit, MatchesExplicitUnderFilters) {
  std::mt19937_64 rng(29);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Floorplan p = oracle::random_plan(seed, 6);
    const G1 g = build_g1(p, oracle::random_free_point(p, rng),
                          {oracle::random_free_point(p, rng), oracle::random_free_point(p, rng)});
    SearchFilter f;
    f.corner_active.resize(g.num_corners());
    for (auto& c : f.corner_active) c = rng() % 3 != 0;
    f.dest_active = {1, static_cast<char>(rng() % 2)};
    compare_engines(g, Lambda::of(1.5), f);
    compare_engines(g, Lambda::of(0.0), f);
  }
}

TEST(Implicit, EmptyCornerFilterGivesStraightLines) {
  MazeParams mp;
  mp.cells = 4;
  const Floorplan p = generate_maze(mp);
  const G1 g = build_g1(p, {1.5, 1.5}, {{10.5, 7.5}, {4.5, 9.5}});
  SearchFilter f;
  f.corner_active.assign(g.num_corners(), 0);
  const SPResult r = sp_implicit(g, Lambda::of(0.3), f);
  for (std::uint32_t t = 0; t < 2; ++t) {
    ASSERT_TRUE(r.paths[t]);
    EXPECT_EQ(r.paths[t]->edges.size(), 1u);
    EXPECT_NEAR(r.paths[t]->dist, distance(g.source(), g.dests()[t]), 1e-12);
    EXPECT_DOUBLE_EQ(r.paths[t]->loss, p.segment_penetration(g.source(), g.dests()[t]));
  }
}

TEST(Implicit, PathsAreConsistentAndSkipRelaxations) {
  MazeParams mp;
  mp.cells = 8;
  mp.seed = 3;
  const Floorplan p = generate_maze(mp);
  const auto pts = measurement_grid(p);
  const G1 g = build_g1(p, {12.75, 12.6}, pts);
  for (Lambda lam : {Lambda::of(0.0), Lambda::of(0.7), Lambda::inf()}) {
    const SPResult r = sp_implicit(g, lam);
    EXPECT_EQ(r.noop_bound_violations, 0u);
    EXPECT_LT(r.relaxation_count, r.explicit_equivalent_count);
    for (std::uint32_t t = 0; t < g.num_dests(); t += 7) {
      ASSERT_TRUE(r.paths[t]);
      expect_consistent(g, *r.paths[t]);
    }
  }
}

TEST(Extremes, EmptyPlan) {
  const G1 g = build_g1(Floorplan{}, {0, 0}, {{6, 8}});
  const Extremes e = loss_and_dist_extremes(g)[0];
  EXPECT_DOUBLE_EQ(e.dmin, 10.0);
  EXPECT_DOUBLE_EQ(e.dmax, 10.0);
  EXPECT_DOUBLE_EQ(e.loss0, 0.0);
  EXPECT_DOUBLE_EQ(e.loss_inf, 0.0);
}

TEST(Extremes, DetourAroundWallEnd) {
  // Zero diffraction, so walking around the wall end is loss-free.
  const Floorplan p("w", {{{0, -1}, {0, 5}, 2, 0}}, {});
  const G1 g = build_g1(p, {-1, 0}, {{1, 0}});
  const Extremes e = loss_and_dist_extremes(g)[0];
  EXPECT_DOUBLE_EQ(e.dmin, 2.0);
  EXPECT_NEAR(e.dmax, 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(e.loss0, 0.0);
  EXPECT_DOUBLE_EQ(e.loss_inf, 2.0);
}

TEST(Extremes, Ordering) {
  std::mt19937_64 rng(31);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Floorplan p = oracle::random_plan(seed, 6);
    const G1 g = build_g1(p, oracle::random_free_point(p, rng), {oracle::random_free_point(p, rng)});
    const Extremes e = loss_and_dist_extremes(g)[0];
    EXPECT_GE(e.dmax, e.dmin - 1e-12);
    EXPECT_LE(e.loss0, e.loss_inf + 1e-12);
  }
}

TEST(Implicit, GoalDirectedMatchesPlainSearch) {
  MazeParams mp;
  mp.cells = 8;
  mp.seed = 5;
  const Floorplan p = generate_maze(mp);
  const auto pts = measurement_grid(p);
  std::mt19937_64 rng(31);
  std::exponential_distribution<double> lam(0.5);
  for (int k = 0; k < 12; ++k) {
    const Point s = pts[rng() % pts.size()] + Point{0.25, 0.1};
    const G1 g = build_g1(p, s, {pts[rng() % pts.size()], pts[rng() % pts.size()]});
    SearchFilter f;
    f.dest_active = {1, 0};
    SPOptions goal;
    goal.goal_directed = true;
    ImplicitEngine engine(g);
    for (Lambda l : {Lambda::of(0.0), Lambda::of(lam(rng)), Lambda::inf()}) {
      const SPResult a = engine.run(l, f);
      const SPResult b = engine.run(l, f, goal);
      ASSERT_TRUE(a.paths[0] && b.paths[0]);
      EXPECT_NEAR(key_of({a.paths[0]->loss, a.paths[0]->dist}, l).k1, key_of({b.paths[0]->loss, b.paths[0]->dist}, l).k1,
                  1e-9);
      expect_consistent(g, *b.paths[0]);
      EXPECT_LE(b.relaxation_count, a.relaxation_count);
    }
  }
}
