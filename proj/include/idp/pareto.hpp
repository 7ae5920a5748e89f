#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "idp/hull.hpp"
#include "idp/psp.hpp"

namespace idp {

struct ParetoOptions {
  /// Discard partial paths whose loss plus alpha * ln(distance so far plus
  /// straight-line remainder) already exceeds the lambda = 0 path's obj by
  /// more than epsilon. Such paths cannot lead to an acceptable answer.
  bool bound_pruning = true;
};

struct ParetoResult {
  PathSummary path;
  double obj = 0.0;
  double pl_db = 0.0;
  double delta = 0.0;
  std::size_t rounds = 0;             // rounds actually executed
  std::size_t max_buckets = 0;        // largest table width over (v, i)
  double max_loss = 0.0;              // L_max over stored paths
  std::size_t stored_paths = 0;
  std::vector<double> obj_by_round;   // best obj at t after each round (inf if none yet)
};

/// Approximates the Pareto set of (dist, loss) at every G2 node by bucketing
/// loss into steps of delta = epsilon / (n - 1) and keeping the shortest path
/// per bucket. The returned path's obj is within epsilon of the optimum.
inline ParetoResult run_pareto(const G1& g1, const G2Explicit& g2, std::uint32_t dest, double epsilon,
                               const ParetoOptions& opts = {}) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("run_pareto: epsilon must be positive");
  const double alpha = g1.plan().alpha();
  const std::uint32_t n = g2.num_nodes();
  const std::uint32_t target = g2.dest_node(dest);
  const double delta = epsilon / static_cast<double>(std::max<std::uint32_t>(n - 1, 1));
  const Point tpos = g1.dests()[dest];

  std::vector<double> to_target(n, 0.0);
  for (std::uint32_t v = 0; v < n; ++v) {
    const G2Node& nd = g2.node(v);
    Point p;
    switch (nd.kind) {
      case G2Node::Kind::Source: p = g1.source(); break;
      case G2Node::Kind::Dest: p = g1.dests()[nd.dest]; break;
      default: p = g1.plan().corners()[nd.corner].position; break;
    }
    to_target[v] = distance(p, tpos);
  }

  double upper = kInf;
  if (opts.bound_pruning) {
    SPResult r0 = sp_explicit(g1, g2, Lambda::of(0.0));
    if (r0.paths[dest]) upper = obj(r0.paths[dest]->dist, r0.paths[dest]->loss, alpha);
  }

  struct Stored {
    double dist;
    double loss;
    std::uint32_t node;
    std::uint32_t parent;  // index into pool, kNone at the source
    std::uint32_t g2_edge;
  };
  std::vector<Stored> pool;
  std::vector<std::unordered_map<std::int64_t, std::uint32_t>> table(n);
  auto bucket = [&](double loss) { return static_cast<std::int64_t>(std::ceil(loss / delta)); };

  ParetoResult res;
  res.delta = delta;
  pool.push_back({0.0, 0.0, 0, kNone, kNone});
  table[0][0] = 0;
  res.max_buckets = 1;
  std::vector<std::uint32_t> frontier{0};
  std::vector<std::uint32_t> next;

  for (std::uint32_t round = 1; round < n && !frontier.empty(); ++round) {
    next.clear();
    for (std::uint32_t pi : frontier) {
      const Stored cur = pool[pi];
      for (std::uint32_t ei : g2.out_edges(cur.node)) {
        const G2Edge& e = g2.edge(ei);
        const double d = cur.dist + e.dist;
        const double l = cur.loss + e.loss;
        if (opts.bound_pruning && d + to_target[e.to] > 0.0 &&
            l + alpha * std::log(d + to_target[e.to]) > upper + epsilon)
          continue;
        const std::int64_t j = bucket(l);
        auto& slot = table[e.to];
        auto found = slot.find(j);
        if (found != slot.end() && !(d < pool[found->second].dist)) continue;
        const auto id = static_cast<std::uint32_t>(pool.size());
        pool.push_back({d, l, e.to, pi, ei});
        if (found == slot.end())
          slot.emplace(j, id);
        else
          found->second = id;
        res.max_buckets = std::max(res.max_buckets, slot.size());
        res.max_loss = std::max(res.max_loss, l);
        next.push_back(id);
      }
    }
    frontier.swap(next);
    res.rounds = round;
    double best = kInf;
    for (const auto& [j, id] : table[target]) best = std::min(best, obj(pool[id].dist, pool[id].loss, alpha));
    res.obj_by_round.push_back(best);
  }

  std::uint32_t best_id = kNone;
  double best_obj = kInf;
  for (const auto& [j, id] : table[target]) {
    const double o = obj(pool[id].dist, pool[id].loss, alpha);
    if (o < best_obj || (o == best_obj && best_id != kNone && pool[id].dist < pool[best_id].dist)) {
      best_obj = o;
      best_id = id;
    }
  }
  if (best_id == kNone) throw std::runtime_error("run_pareto: destination unreachable");
  res.stored_paths = pool.size();
  res.obj = best_obj;
  res.path.dist = pool[best_id].dist;
  res.path.loss = pool[best_id].loss;
  for (std::uint32_t id = best_id; pool[id].parent != kNone; id = pool[id].parent) {
    const G2Edge& e = g2.edge(pool[id].g2_edge);
    if (e.g1_edge != kNone) res.path.edges.push_back(e.g1_edge);
  }
  std::reverse(res.path.edges.begin(), res.path.edges.end());
  res.path.nodes = detail::nodes_of(g1, res.path.edges);
  res.pl_db = path_loss_db(res.path.dist, res.path.loss, g1.plan().constants());
  return res;
}

}  // namespace idp
