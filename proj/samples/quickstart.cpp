// Dominant path between two points of a small maze, exact and approximate.

#include <cstdio>

#include "idp/idp.hpp"

int main() {
  idp::MazeParams mp;
  mp.seed = 7;
  mp.cells = 6;
  const idp::Floorplan plan = idp::generate_maze(mp);
  std::printf("maze: %zu walls, %zu corners\n", plan.walls().size(), plan.corners().size());

  const idp::Point s{1.5, 1.5};
  const idp::Point t{16.5, 13.5};
  const idp::G1 g = idp::build_g1(plan, s, {t});

  idp::PairHullSolver solver(g, 0);
  const idp::HullResult hull = solver.solve();
  std::printf("hull: %zu extreme paths from %d searches\n", hull.points.size(), hull.sp_calls);
  for (const auto& p : hull.points) std::printf("  dist %8.3f m  loss %7.3f dB\n", p.dist, p.loss);

  const idp::DominantPath dp = idp::dominant_path(hull, plan.constants());
  std::printf("exact: PL %.3f dB over %.3f m, %zu corners\n", dp.pl_db, dp.dist,
              dp.path.nodes.size() > 2 ? dp.path.nodes.size() - 2 : 0);

  const idp::GPResult gp = idp::run_gp(g, idp::GPConfig{2.0, 0.5});
  std::printf("GP(r=2): PL %.3f dB (error %.4f dB, bound %.4f dB)\n", gp.dests[0].pl_db, gp.dests[0].obj - dp.obj,
              idp::worst_error_bound(2.0, plan.alpha()));
  return 0;
}
