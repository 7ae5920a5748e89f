// Path-loss heat map of the default office block, written as office.pgm.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>

#include "idp/idp.hpp"

int main(int argc, char** argv) {
  const char* out = argc > 1 ? argv[1] : "office.pgm";
  auto plan = std::make_shared<const idp::Floorplan>(idp::generate_office({}));
  const auto t0 = std::chrono::steady_clock::now();
  auto cv = idp::build_corner_visibility(plan);

  idp::HeatMapOptions opt;
  opt.gp = idp::GPConfig::random(2.0, 42);
  const idp::HeatMapRun run = idp::compute_heatmap(cv, {30.25, 20.25}, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ofstream os(out, std::ios::binary);
  idp::write_heatmap_pgm(run.map, os);
  std::printf("%dx%d heat map in %.2f s, %zu lambda runs, %.1f%% of relaxations skipped -> %s\n", run.map.width,
              run.map.height, secs, run.gp_stats->lambdas.size(),
              100.0 * (1.0 - double(run.gp_stats->relaxations) / double(run.gp_stats->explicit_equivalent)), out);
  return 0;
}
