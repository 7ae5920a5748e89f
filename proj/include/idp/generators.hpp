#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "idp/errors.hpp"
#include "idp/floorplan.hpp"

namespace idp {

struct MazeParams {
  std::uint64_t seed = 1;
  int cells = 20;
  double cell_size = 3.0;
  double interior_db = 2.0;
  double exterior_db = 15.0;
  double diffraction_db_per_90 = 5.0;
};

/// Uniform spanning tree of the cells x cells grid graph (Wilson's algorithm).
/// Returns, per cell, the neighbour it was joined to (-1 for the root).
inline std::vector<int> wilson_spanning_tree(int cells, std::mt19937_64& rng) {
  const int n = cells * cells;
  std::vector<char> in_tree(n, 0);
  std::vector<int> next(n, -1);
  std::vector<int> parent(n, -1);
  std::uniform_int_distribution<int> pick_cell(0, n - 1);
  in_tree[pick_cell(rng)] = 1;
  int nbrs[4];
  for (int start = 0; start < n; ++start) {
    int u = start;
    while (!in_tree[u]) {
      const int x = u % cells;
      const int y = u / cells;
      int k = 0;
      if (x > 0) nbrs[k++] = u - 1;
      if (x + 1 < cells) nbrs[k++] = u + 1;
      if (y > 0) nbrs[k++] = u - cells;
      if (y + 1 < cells) nbrs[k++] = u + cells;
      next[u] = nbrs[std::uniform_int_distribution<int>(0, k - 1)(rng)];
      u = next[u];
    }
    u = start;
    while (!in_tree[u]) {
      in_tree[u] = 1;
      parent[u] = next[u];
      u = next[u];
    }
  }
  return parent;
}

/// Random maze: cell edges that are not in a uniform spanning tree become
/// walls (their planar duals), plus a closed exterior.
inline Floorplan generate_maze(const MazeParams& p) {
  if (p.cells < 2) throw ValidationError("generate_maze: cells must be >= 2");
  if (!(p.cell_size > 0.0)) throw ValidationError("generate_maze: cell_size must be positive");
  std::mt19937_64 rng(p.seed);
  const int c = p.cells;
  const std::vector<int> parent = wilson_spanning_tree(c, rng);
  auto joined = [&](int u, int v) { return parent[u] == v || parent[v] == u; };
  const double s = p.cell_size;
  std::vector<Wall> walls;
  auto add = [&](double x0, double y0, double x1, double y1, double db) {
    walls.push_back({{x0 * s, y0 * s}, {x1 * s, y1 * s}, db, p.diffraction_db_per_90});
  };
  for (int i = 0; i < c; ++i) {
    add(i, 0, i + 1, 0, p.exterior_db);
    add(i, c, i + 1, c, p.exterior_db);
    add(0, i, 0, i + 1, p.exterior_db);
    add(c, i, c, i + 1, p.exterior_db);
  }
  for (int y = 0; y < c; ++y) {
    for (int x = 0; x < c; ++x) {
      const int u = y * c + x;
      if (x + 1 < c && !joined(u, u + 1)) add(x + 1, y, x + 1, y + 1, p.interior_db);
      if (y + 1 < c && !joined(u, u + c)) add(x, y + 1, x + 1, y + 1, p.interior_db);
    }
  }
  return Floorplan("maze-" + std::to_string(p.seed), std::move(walls), RadioConstants{});
}

struct OfficeParams {
  int rows = 12;
  int cols = 20;
  double office_w = 3.0;
  double office_h = 4.0;
  double hallway = 2.0;
  double interior_db = 2.0;
  double exterior_db = 15.0;
  double diffraction_db_per_90 = 5.0;
};

/// Regular office block: office rows are paired back to back around a
/// horizontal hallway, and one vertical hallway splits each row in the middle.
///
/// Layout per pair of rows (bottom to top): offices, hallway, offices. An odd
/// final row gets its own hallway above it. The plan is built on a lattice of
/// rectangles; a wall goes on every lattice edge separating two different
/// rooms (hallways form one room) or a room from the outside.
inline Floorplan generate_office(const OfficeParams& p) {
  if (p.rows < 1 || p.cols < 1) throw ValidationError("generate_office: rows and cols must be >= 1");
  // x lattice
  const int split = p.cols / 2;
  std::vector<double> xs{0.0};
  std::vector<int> xkind;  // -1 hallway column, else office column index
  for (int i = 0; i < p.cols; ++i) {
    if (i == split) {
      xs.push_back(xs.back() + p.hallway);
      xkind.push_back(-1);
    }
    xs.push_back(xs.back() + p.office_w);
    xkind.push_back(i);
  }
  if (split == p.cols) {
    xs.push_back(xs.back() + p.hallway);
    xkind.push_back(-1);
  }
  // y lattice
  std::vector<double> ys{0.0};
  std::vector<int> ykind;  // -1 hallway row, else office row index
  for (int r = 0; r < p.rows; r += 2) {
    ys.push_back(ys.back() + p.office_h);
    ykind.push_back(r);
    ys.push_back(ys.back() + p.hallway);
    ykind.push_back(-1);
    if (r + 1 < p.rows) {
      ys.push_back(ys.back() + p.office_h);
      ykind.push_back(r + 1);
    }
  }
  const int nx = static_cast<int>(xkind.size());
  const int ny = static_cast<int>(ykind.size());
  constexpr int kOutside = -2;
  constexpr int kHall = -1;
  auto label = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return kOutside;
    if (xkind[i] < 0 || ykind[j] < 0) return kHall;
    return ykind[j] * p.cols + xkind[i];
  };
  std::vector<Wall> walls;
  auto consider = [&](int la, int lb, Point a, Point b) {
    if (la == lb) return;
    const bool exterior = la == kOutside || lb == kOutside;
    walls.push_back({a, b, exterior ? p.exterior_db : p.interior_db, p.diffraction_db_per_90});
  };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i)
      consider(label(i, j - 1), label(i, j), {xs[i], ys[j]}, {xs[i + 1], ys[j]});
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j < ny; ++j)
      consider(label(i - 1, j), label(i, j), {xs[i], ys[j]}, {xs[i], ys[j + 1]});
  return Floorplan("office-" + std::to_string(p.rows) + "x" + std::to_string(p.cols), std::move(walls),
                   RadioConstants{});
}

/// Centers of the cells of a `spacing` grid covering the plan's bounding box.
inline std::vector<Point> measurement_grid(const Floorplan& plan, double spacing = 1.0) {
  const auto [lo, hi] = plan.bounding_box();
  const int nx = static_cast<int>(std::floor((hi.x - lo.x) / spacing + 1e-9));
  const int ny = static_cast<int>(std::floor((hi.y - lo.y) / spacing + 1e-9));
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(std::max(nx, 0)) * static_cast<std::size_t>(std::max(ny, 0)));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) pts.push_back({lo.x + (i + 0.5) * spacing, lo.y + (j + 0.5) * spacing});
  return pts;
}

}  // namespace idp
