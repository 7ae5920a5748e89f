#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "idp/graph.hpp"

namespace idp {

/// The parameter lambda of the hybrid weight loss + lambda * dist, in dB/m.
/// Infinity is kept distinct so that lambda = inf means "shortest distance,
/// then lowest loss" without a sentinel value.
struct Lambda {
  double value = 0.0;
  bool infinite = false;

  static Lambda inf() { return {0.0, true}; }
  static Lambda of(double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("lambda must be finite and >= 0");
    return {v, false};
  }
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr std::uint32_t kNone = UINT32_MAX;

struct Label {
  double loss = kInf;
  double dist = kInf;
  bool reached() const { return loss != kInf; }
};

struct Key {
  double k1;
  double k2;
  friend bool operator<(const Key& a, const Key& b) { return a.k1 < b.k1 || (a.k1 == b.k1 && a.k2 < b.k2); }
  friend bool operator==(const Key&, const Key&) = default;
};

inline Key key_of(const Label& l, Lambda lam) {
  if (!l.reached()) return {kInf, kInf};
  if (lam.infinite) return {l.dist, l.loss};
  return {l.loss + lam.value * l.dist, l.dist};
}

/// One s-t path: totals plus the G1 node and edge sequences from the source.
struct PathSummary {
  double dist = 0.0;
  double loss = 0.0;
  std::vector<std::uint32_t> nodes;
  std::vector<std::uint32_t> edges;
};

struct SPResult {
  std::vector<std::optional<PathSummary>> paths;  // per destination
  std::uint64_t relaxation_count = 0;        // intra-corner relaxations performed
  std::uint64_t noop_relaxation_count = 0;   // of those, how many improved nothing
  std::uint64_t explicit_equivalent_count = 0;  // intra-corner relaxations an explicit search would do
  std::uint64_t noop_bound_violations = 0;   // finalized sockets with more than sectors+2 no-ops
};

struct SPOptions {
  /// Stop as soon as every active destination is settled.
  bool early_exit = true;
  /// Goal-directed search (A*) toward the single active destination, using
  /// straight-line distance as the heuristic. Implicit engine only; ignored
  /// unless exactly one destination is active. Socket labels away from the
  /// goal are left partial.
  bool goal_directed = false;
};

namespace detail {

struct HeapItem {
  Key key;
  std::uint32_t id;
  // priority_queue is a max-heap: "less" means lower priority.
  friend bool operator<(const HeapItem& a, const HeapItem& b) {
    if (a.key.k1 != b.key.k1) return a.key.k1 > b.key.k1;
    if (a.key.k2 != b.key.k2) return a.key.k2 > b.key.k2;
    return a.id > b.id;
  }
};

inline std::vector<std::uint32_t> nodes_of(const G1& g, const std::vector<std::uint32_t>& edges) {
  std::vector<std::uint32_t> nodes{G1::source_node()};
  for (std::uint32_t e : edges) nodes.push_back(g.edge(e).to);
  return nodes;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Explicit engine

/// Per-node labels of an explicit search, for comparisons.
struct ExplicitLabels {
  std::vector<Label> node;
};

/// Dijkstra on the explicit socket graph. Optional weight overrides replace
/// each G2 edge's (dist, loss).
inline SPResult sp_explicit(const G1& g1, const G2Explicit& g2, Lambda lam, const SPOptions& opts = {},
                            ExplicitLabels* labels_out = nullptr, const std::vector<double>* dist_w = nullptr,
                            const std::vector<double>* loss_w = nullptr) {
  const std::uint32_t n = g2.num_nodes();
  std::vector<Label> label(n);
  std::vector<std::uint32_t> parent(n, kNone);  // G2 edge id
  std::vector<char> done(n, 0);
  std::priority_queue<detail::HeapItem> heap;
  label[0] = {0.0, 0.0};
  heap.push({key_of(label[0], lam), 0});
  std::uint32_t remaining = g2.num_dests();
  SPResult res;
  while (!heap.empty()) {
    const auto top = heap.top();
    heap.pop();
    const std::uint32_t v = top.id;
    if (done[v] || !(top.key == key_of(label[v], lam))) continue;
    done[v] = 1;
    const G2Node& nv = g2.node(v);
    if (nv.kind == G2Node::Kind::Dest) {
      if (--remaining == 0 && opts.early_exit) break;
      continue;
    }
    const bool intra_src = nv.kind == G2Node::Kind::In;
    for (std::uint32_t ei : g2.out_edges(v)) {
      const G2Edge& e = g2.edge(ei);
      const double ed = dist_w ? (*dist_w)[ei] : e.dist;
      const double el = loss_w ? (*loss_w)[ei] : e.loss;
      const Label cand{label[v].loss + el, label[v].dist + ed};
      const bool better = key_of(cand, lam) < key_of(label[e.to], lam);
      if (intra_src) {
        ++res.relaxation_count;
        ++res.explicit_equivalent_count;
        if (!better) ++res.noop_relaxation_count;
      }
      if (better && !done[e.to]) {
        label[e.to] = cand;
        parent[e.to] = ei;
        heap.push({key_of(cand, lam), e.to});
      }
    }
  }
  res.paths.resize(g2.num_dests());
  for (std::uint32_t t = 0; t < g2.num_dests(); ++t) {
    const std::uint32_t v = g2.dest_node(t);
    if (!label[v].reached()) continue;
    PathSummary p;
    p.dist = label[v].dist;
    p.loss = label[v].loss;
    for (std::uint32_t u = v; u != 0;) {
      const G2Edge& e = g2.edge(parent[u]);
      if (e.g1_edge != kNone) p.edges.push_back(e.g1_edge);
      u = e.from;
    }
    std::reverse(p.edges.begin(), p.edges.end());
    p.nodes = detail::nodes_of(g1, p.edges);
    res.paths[t] = std::move(p);
  }
  if (labels_out) labels_out->node = std::move(label);
  return res;
}

// ---------------------------------------------------------------------------
// Implicit engine

/// Dijkstra over the socket graph without materializing intra-corner edges.
///
/// When an In socket is settled, the Out sockets of its corner are visited
/// in order of increasing deflection, separately for counterclockwise and
/// clockwise turns. Within one half-turn the candidate loss of a sector grows
/// at exactly the diffraction rate, while any label already on an Out socket
/// of that sector grows at most as fast; after the first candidate that fails
/// to improve a socket the rest of that sector in that half is skipped.
///
/// An engine keeps scratch buffers between runs and is not thread-safe; use
/// one engine per thread.
class ImplicitEngine {
 public:
  explicit ImplicitEngine(const G1& g) : g_(g) {
    const std::uint32_t m = g.num_edges();
    in_.assign(m, {});
    out_.assign(m, {});
    in_via_.assign(m, kNone);
    out_parent_.assign(m, kNone);
    in_done_.assign(m, 0);
    dest_.assign(g.num_dests(), {});
    dest_edge_.assign(g.num_dests(), kNone);
    dest_via_.assign(g.num_dests(), kNone);
    dest_done_.assign(g.num_dests(), 0);
    list_start_.assign(g.num_corners(), kNone);
    list_end_.assign(g.num_corners(), 0);
    std::size_t max_sectors = 1;
    for (const Corner& c : g.plan().corners()) max_sectors = std::max(max_sectors, c.sector_count());
    dead_.assign(max_sectors, 0);
  }

  const G1& graph() const { return g_; }

  SPResult run(Lambda lam, const SearchFilter& filter = {}, const SPOptions& opts = {}) {
    reset();
    lam_ = lam;
    filter_ = &filter;
    SPResult res;
    std::uint32_t remaining = 0;
    std::uint32_t last_ok = kNone;
    for (std::uint32_t t = 0; t < g_.num_dests(); ++t)
      if (filter.dest_ok(t)) ++remaining, last_ok = t;
    const std::uint32_t nt = g_.num_dests();
    guided_ = opts.goal_directed && remaining == 1;
    if (guided_) goal_ = g_.dests()[last_ok];

    for (std::uint32_t e : g_.out_edges(G1::source_node())) {
      if (!edge_active(g_, filter, e)) continue;
      const G1Edge& x = g_.edge(e);
      relax_edge(e, Label{0.0 + x.loss, 0.0 + x.dist}, kNone);
    }
    while (!heap_.empty()) {
      const auto top = heap_.top();
      heap_.pop();
      if (top.id < 1 + nt) {
        const std::uint32_t t = top.id - 1;
        if (dest_done_[t] || !(top.key == key_of(dest_[t], lam_))) continue;
        dest_done_[t] = 1;
        if (--remaining == 0 && opts.early_exit) break;
        continue;
      }
      const std::uint32_t e = top.id - 1 - nt;
      if (in_done_[e] || !(top.key == priority(e))) continue;
      in_done_[e] = 1;
      touched_done_.push_back(e);
      settle_in(e, res);
    }

    res.paths.resize(nt);
    for (std::uint32_t t = 0; t < nt; ++t) {
      if (!dest_[t].reached() || !filter.dest_ok(t)) continue;
      PathSummary p;
      p.dist = dest_[t].dist;
      p.loss = dest_[t].loss;
      p.edges.push_back(dest_edge_[t]);
      for (std::uint32_t prev = dest_via_[t]; prev != kNone; prev = in_via_[prev]) p.edges.push_back(prev);
      std::reverse(p.edges.begin(), p.edges.end());
      p.nodes = detail::nodes_of(g_, p.edges);
      res.paths[t] = std::move(p);
    }
    return res;
  }

  /// Label of the In socket of G1 edge e after the last run.
  Label in_label(std::uint32_t e) const { return in_[e]; }
  /// Label of the Out socket of G1 edge e after the last run.
  Label out_label(std::uint32_t e) const { return out_[e]; }
  Label dest_label(std::uint32_t t) const { return dest_[t]; }

 private:
  struct Entry {
    std::uint32_t edge;
    std::uint32_t sector;
    double angle;
    std::uint32_t run_begin;  // index of first entry of this same-sector run
    std::uint32_t run_end;    // one past the last entry of the run
  };

  void reset() {
    for (std::uint32_t e : touched_in_) {
      in_[e] = {};
      in_via_[e] = kNone;
    }
    for (std::uint32_t e : touched_out_) {
      out_[e] = {};
      out_parent_[e] = kNone;
    }
    for (std::uint32_t e : touched_done_) in_done_[e] = 0;
    touched_in_.clear();
    touched_out_.clear();
    touched_done_.clear();
    std::fill(dest_.begin(), dest_.end(), Label{});
    std::fill(dest_edge_.begin(), dest_edge_.end(), kNone);
    std::fill(dest_via_.begin(), dest_via_.end(), kNone);
    std::fill(dest_done_.begin(), dest_done_.end(), 0);
    for (std::uint32_t c : built_) list_start_[c] = kNone;
    built_.clear();
    entries_.clear();
    heap_ = {};
  }

  /// Relaxes G1 edge e, having reached its tail with `at_tail`. `via` is the
  /// incoming edge whose settling produced that label (kNone at the source).
  void relax_edge(std::uint32_t e, Label cand, std::uint32_t via) {
    const G1Edge& x = g_.edge(e);
    const std::uint32_t nt = g_.num_dests();
    if (g_.kind(x.to) == NodeKind::Dest) {
      const std::uint32_t t = g_.dest_of(x.to);
      if (dest_done_[t] || !(key_of(cand, lam_) < key_of(dest_[t], lam_))) return;
      dest_[t] = cand;
      dest_edge_[t] = e;
      dest_via_[t] = via;
      heap_.push({key_of(cand, lam_), 1 + t});
    } else {
      if (in_done_[e] || !(key_of(cand, lam_) < key_of(in_[e], lam_))) return;
      if (!in_[e].reached()) touched_in_.push_back(e);
      in_[e] = cand;
      in_via_[e] = via;
      heap_.push({priority(e), 1 + nt + e});
    }
  }

  /// Heap key of the In socket of e: its label's key, plus the straight-line
  /// remainder to the goal when the search is goal directed.
  Key priority(std::uint32_t e) const {
    Key k = key_of(in_[e], lam_);
    if (!guided_) return k;
    const double h = distance(g_.plan().corners()[g_.corner_of(g_.edge(e).to)].position, goal_);
    if (lam_.infinite) return {k.k1 + h, k.k2};
    return {k.k1 + lam_.value * h, k.k2 + h};
  }

  std::pair<std::uint32_t, std::uint32_t> corner_list(std::uint32_t c) {
    if (list_start_[c] != kNone) return {list_start_[c], list_end_[c]};
    const auto begin = static_cast<std::uint32_t>(entries_.size());
    for (std::uint32_t e : g_.out_edges(g_.corner_node(c))) {
      if (!edge_active(g_, *filter_, e)) continue;
      const G1Edge& x = g_.edge(e);
      entries_.push_back({e, x.sector_from, x.angle_from, 0, 0});
    }
    const auto end = static_cast<std::uint32_t>(entries_.size());
    for (std::uint32_t i = begin; i < end;) {
      std::uint32_t j = i + 1;
      while (j < end && entries_[j].sector == entries_[i].sector) ++j;
      for (std::uint32_t k = i; k < j; ++k) {
        entries_[k].run_begin = i - begin;
        entries_[k].run_end = j - begin;
      }
      i = j;
    }
    list_start_[c] = begin;
    list_end_[c] = end;
    built_.push_back(c);
    return {begin, end};
  }

  void settle_in(std::uint32_t e_in, SPResult& res) {
    const G1Edge& xin = g_.edge(e_in);
    const std::uint32_t c = g_.corner_of(xin.to);
    const Corner& corner = g_.plan().corners()[c];
    const auto [b, end] = corner_list(c);
    const std::uint32_t n = end - b;
    if (n == 0) return;
    const Entry* list = entries_.data() + b;
    res.explicit_equivalent_count += n;

    // Split the list into the counterclockwise half (deflection in [0, pi])
    // and the clockwise half.
    const double th = xin.angle_from;
    auto lb = [&](double a) {
      return static_cast<std::uint32_t>(
          std::lower_bound(list, list + n, a, [](const Entry& x, double v) { return x.angle < v; }) - list);
    };
    auto ub = [&](double a) {
      return static_cast<std::uint32_t>(
          std::upper_bound(list, list + n, a, [](double v, const Entry& x) { return v < x.angle; }) - list);
    };
    const std::uint32_t start = lb(th);
    std::uint32_t nf;
    if (th + kPi < kTwoPi)
      nf = ub(th + kPi) - start;
    else
      nf = (n - start) + ub(th + kPi - kTwoPi);

    const Label base = in_[e_in];
    std::uint64_t noops = 0;

    auto visit = [&](const Entry& en) -> bool {
      ++res.relaxation_count;
      const double intra = intra_corner_loss(corner, xin.dir, xin.sector_to, g_.edge(en.edge).dir, en.sector);
      const Label cand{base.loss + intra, base.dist};
      if (!(key_of(cand, lam_) < key_of(out_[en.edge], lam_))) {
        ++res.noop_relaxation_count;
        ++noops;
        return false;
      }
      if (!out_[en.edge].reached()) touched_out_.push_back(en.edge);
      out_[en.edge] = cand;
      out_parent_[en.edge] = e_in;
      const G1Edge& xo = g_.edge(en.edge);
      relax_edge(en.edge, Label{cand.loss + xo.loss, cand.dist + xo.dist}, e_in);
      return true;
    };

    // counterclockwise half
    ++stamp_;
    for (std::uint64_t p = start; p < std::uint64_t{start} + nf;) {
      const std::uint32_t idx = static_cast<std::uint32_t>(p % n);
      const Entry& en = list[idx];
      if (dead_[en.sector] == stamp_ || !visit(en)) {
        dead_[en.sector] = stamp_;
        p += en.run_end - idx;
      } else {
        ++p;
      }
    }
    // clockwise half
    ++stamp_;
    const std::int64_t lo = static_cast<std::int64_t>(start) + nf - n;
    for (std::int64_t q = static_cast<std::int64_t>(start) - 1; q >= lo;) {
      const auto idx = static_cast<std::uint32_t>(((q % n) + n) % n);
      const Entry& en = list[idx];
      if (dead_[en.sector] == stamp_ || !visit(en)) {
        dead_[en.sector] = stamp_;
        q -= idx - en.run_begin + 1;
      } else {
        --q;
      }
    }
    if (noops > corner.sector_count() + 2) ++res.noop_bound_violations;
  }

  const G1& g_;
  Lambda lam_;
  const SearchFilter* filter_ = nullptr;
  bool guided_ = false;
  Point goal_;
  std::vector<Label> in_;
  std::vector<Label> out_;
  std::vector<std::uint32_t> in_via_;
  std::vector<std::uint32_t> out_parent_;
  std::vector<char> in_done_;
  std::vector<Label> dest_;
  std::vector<std::uint32_t> dest_edge_;
  std::vector<std::uint32_t> dest_via_;
  std::vector<char> dest_done_;
  std::vector<std::uint32_t> touched_in_;
  std::vector<std::uint32_t> touched_out_;
  std::vector<std::uint32_t> touched_done_;
  std::vector<std::uint32_t> list_start_;
  std::vector<std::uint32_t> list_end_;
  std::vector<std::uint32_t> built_;
  std::vector<Entry> entries_;
  std::vector<std::uint64_t> dead_;
  std::uint64_t stamp_ = 0;
  std::priority_queue<detail::HeapItem> heap_;
};

inline SPResult sp_implicit(const G1& g, Lambda lam, const SearchFilter& filter = {}, const SPOptions& opts = {}) {
  ImplicitEngine engine(g);
  return engine.run(lam, filter, opts);
}

struct Extremes {
  double dmin = 0.0;    // straight-line distance
  double dmax = 0.0;    // distance of the lambda = 0 path
  double loss0 = 0.0;   // loss of the lambda = 0 path
  double loss_inf = 0.0;  // loss of the lambda = inf path
};

inline std::vector<Extremes> loss_and_dist_extremes(const G1& g) {
  ImplicitEngine engine(g);
  const SPResult r0 = engine.run(Lambda::of(0.0));
  const SPResult ri = engine.run(Lambda::inf());
  std::vector<Extremes> out(g.num_dests());
  for (std::uint32_t t = 0; t < g.num_dests(); ++t) {
    out[t].dmin = distance(g.source(), g.dests()[t]);
    out[t].dmax = r0.paths[t]->dist;
    out[t].loss0 = r0.paths[t]->loss;
    out[t].loss_inf = ri.paths[t]->loss;
  }
  return out;
}

}  // namespace idp
