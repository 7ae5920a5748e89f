#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "idp/errors.hpp"
#include "idp/floorplan.hpp"
#include "idp/geometry.hpp"

namespace idp {

enum class NodeKind : std::uint8_t { Source, Corner, Dest };

/// Which side of a wall an edge running along that wall travels on, relative
/// to its own direction of travel. None for every other edge.
enum class Side : std::uint8_t { None, Left, Right };

inline constexpr std::uint32_t kNoSector = UINT32_MAX;

struct G1Edge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  double dist = 0.0;
  double loss = 0.0;  // penetration
  Side side = Side::None;
  Point dir;                  // unit direction of travel
  double angle_from = 0.0;    // direction of the edge seen from its tail
  double angle_to = 0.0;      // direction back to the tail seen from the head
  std::uint32_t sector_from = kNoSector;  // sector at the tail corner
  std::uint32_t sector_to = kNoSector;    // sector at the head corner
};

namespace detail {

/// Sector for an edge leaving (outgoing) or entering (incoming) a corner at
/// the given angle. On-wall edges pick the sector on their travel side.
inline std::uint32_t socket_sector(const Corner& c, double angle, Side side, bool outgoing) {
  const std::size_t k = c.sector_count();
  if (k == 0) return kNoSector;
  if (side != Side::None) {
    if (auto w = c.wall_at(angle)) {
      const bool ccw = (side == Side::Left) == outgoing;
      return static_cast<std::uint32_t>(ccw ? *w : (*w + k - 1) % k);
    }
  }
  return static_cast<std::uint32_t>(c.sector_of(angle));
}

inline G1Edge make_edge(const Floorplan& plan, std::uint32_t from, Point a, std::uint32_t to, Point b,
                        Side side, const Corner* ca, const Corner* cb) {
  G1Edge e;
  e.from = from;
  e.to = to;
  e.dist = snap_weight(distance(a, b));
  e.loss = snap_weight(plan.segment_penetration(a, b));
  e.side = side;
  e.dir = unit(b - a);
  e.angle_from = angle_of(b - a);
  e.angle_to = angle_of(a - b);
  if (ca) e.sector_from = socket_sector(*ca, e.angle_from, side, true);
  if (cb) e.sector_to = socket_sector(*cb, e.angle_to, side, false);
  return e;
}

inline void sort_by_angle(std::vector<std::uint32_t>& ids, const std::vector<G1Edge>& edges, std::uint32_t base) {
  std::sort(ids.begin(), ids.end(), [&](std::uint32_t l, std::uint32_t r) {
    const G1Edge& a = edges[l - base];
    const G1Edge& b = edges[r - base];
    if (a.angle_from != b.angle_from) return a.angle_from < b.angle_from;
    return l < r;
  });
}

}  // namespace detail

/// Corner-to-corner part of G1. Depends only on the floorplan, so it is built
/// once and shared by every source.
class CornerVisibility {
 public:
  explicit CornerVisibility(std::shared_ptr<const Floorplan> plan) : plan_(std::move(plan)) {
    const auto& corners = plan_->corners();
    const auto n = static_cast<std::uint32_t>(corners.size());
    for (std::uint32_t u = 0; u < n; ++u) {
      for (std::uint32_t v = u + 1; v < n; ++v) {
        const Point a = corners[u].position;
        const Point b = corners[v].position;
        if (plan_->share_wall(u, v)) {
          for (Side side : {Side::Left, Side::Right}) {
            edges_.push_back(detail::make_edge(*plan_, u + 1, a, v + 1, b, side, &corners[u], &corners[v]));
            edges_.push_back(detail::make_edge(*plan_, v + 1, b, u + 1, a, side, &corners[v], &corners[u]));
          }
        } else if (!plan_->corner_inside(a, b)) {
          edges_.push_back(detail::make_edge(*plan_, u + 1, a, v + 1, b, Side::None, &corners[u], &corners[v]));
          edges_.push_back(detail::make_edge(*plan_, v + 1, b, u + 1, a, Side::None, &corners[v], &corners[u]));
        }
      }
    }
    out_.assign(n, {});
    in_.assign(n, {});
    for (std::uint32_t e = 0; e < edges_.size(); ++e) {
      out_[edges_[e].from - 1].push_back(e);
      in_[edges_[e].to - 1].push_back(e);
    }
    for (auto& list : out_) detail::sort_by_angle(list, edges_, 0);
  }

  const Floorplan& plan() const { return *plan_; }
  const std::shared_ptr<const Floorplan>& plan_ptr() const { return plan_; }
  const std::vector<G1Edge>& edges() const { return edges_; }
  /// Outgoing edge ids of a corner (0-based corner index), sorted by angle.
  const std::vector<std::uint32_t>& out(std::uint32_t corner) const { return out_[corner]; }
  const std::vector<std::uint32_t>& in(std::uint32_t corner) const { return in_[corner]; }

 private:
  std::shared_ptr<const Floorplan> plan_;
  std::vector<G1Edge> edges_;
  std::vector<std::vector<std::uint32_t>> out_;
  std::vector<std::vector<std::uint32_t>> in_;
};

inline std::shared_ptr<const CornerVisibility> build_corner_visibility(std::shared_ptr<const Floorplan> plan) {
  return std::make_shared<const CornerVisibility>(std::move(plan));
}

namespace detail {

inline void check_point(Point p, const char* what) {
  if (!is_finite(p)) throw ValidationError(std::string(what) + ": non-finite coordinate");
}

}  // namespace detail

/// Corner-to-destination part of G1 for a fixed destination list. Independent
/// of the source, so heat maps from several sources can share it.
class DestLinks {
 public:
  DestLinks(std::shared_ptr<const CornerVisibility> cv, const std::vector<Point>& dests) : cv_(std::move(cv)) {
    const Floorplan& plan = cv_->plan();
    const auto& corners = plan.corners();
    const auto nc = static_cast<std::uint32_t>(corners.size());
    dests_.reserve(dests.size());
    for (std::size_t i = 0; i < dests.size(); ++i) {
      detail::check_point(dests[i], "destination");
      if (plan.corner_near(dests[i])) throw ValidationError("destination " + std::to_string(i) + " coincides with a corner");
      dests_.push_back(plan.nudge_off_walls(dests[i]));
    }
    {
      std::vector<std::pair<Point, std::size_t>> sorted;
      for (std::size_t i = 0; i < dests_.size(); ++i) sorted.emplace_back(dests_[i], i);
      std::sort(sorted.begin(), sorted.end(), [](const auto& l, const auto& r) {
        return l.first.x != r.first.x ? l.first.x < r.first.x : l.first.y < r.first.y;
      });
      for (std::size_t i = 0; i < sorted.size(); ++i)
        for (std::size_t j = i + 1; j < sorted.size() && sorted[j].first.x - sorted[i].first.x <= kGeomEps; ++j)
          if (distance(sorted[i].first, sorted[j].first) <= kGeomEps)
            throw ValidationError("destinations " + std::to_string(sorted[i].second) + " and " +
                                  std::to_string(sorted[j].second) + " coincide");
    }
    base_ = static_cast<std::uint32_t>(cv_->edges().size());
    out_.assign(nc, {});
    for (std::uint32_t c = 0; c < nc; ++c) {
      const Point a = corners[c].position;
      for (std::uint32_t t = 0; t < dests_.size(); ++t) {
        if (plan.corner_inside(a, dests_[t])) continue;
        out_[c].push_back(base_ + static_cast<std::uint32_t>(edges_.size()));
        edges_.push_back(detail::make_edge(plan, c + 1, a, nc + 1 + t, dests_[t], Side::None, &corners[c], nullptr));
      }
      detail::sort_by_angle(out_[c], edges_, base_);
    }
  }

  const CornerVisibility& visibility() const { return *cv_; }
  const std::shared_ptr<const CornerVisibility>& visibility_ptr() const { return cv_; }
  /// Destination positions after nudging off walls.
  const std::vector<Point>& dests() const { return dests_; }
  const std::vector<G1Edge>& edges() const { return edges_; }
  std::uint32_t base() const { return base_; }
  const std::vector<std::uint32_t>& out(std::uint32_t corner) const { return out_[corner]; }

 private:
  std::shared_ptr<const CornerVisibility> cv_;
  std::vector<Point> dests_;
  std::vector<G1Edge> edges_;
  std::uint32_t base_ = 0;
  std::vector<std::vector<std::uint32_t>> out_;
};

/// Visibility graph over {source, corners, destinations}.
///
/// Node ids: 0 is the source, 1..C the corners, C+1..C+T the destinations.
/// Edge ids: corner-corner edges first, then corner-destination edges, then
/// edges leaving the source. Destinations are sinks. Any candidate edge whose
/// open segment passes through a corner is omitted, since the route through
/// that corner covers it.
class G1 {
 public:
  G1(std::shared_ptr<const DestLinks> links, Point source) : links_(std::move(links)) {
    const CornerVisibility& cv = links_->visibility();
    const Floorplan& plan = cv.plan();
    detail::check_point(source, "source");
    if (plan.corner_near(source)) throw ValidationError("source coincides with a corner");
    source_ = plan.nudge_off_walls(source);
    nc_ = static_cast<std::uint32_t>(plan.corners().size());
    nt_ = static_cast<std::uint32_t>(links_->dests().size());
    for (std::uint32_t t = 0; t < nt_; ++t)
      if (distance(links_->dests()[t], source_) <= kGeomEps)
        throw ValidationError("destination " + std::to_string(t) + " coincides with the source");
    n_cc_ = static_cast<std::uint32_t>(cv.edges().size());
    n_ct_ = static_cast<std::uint32_t>(links_->edges().size());
    const auto& corners = plan.corners();
    for (std::uint32_t c = 0; c < nc_; ++c) {
      if (plan.corner_inside(source_, corners[c].position)) continue;
      own_.push_back(detail::make_edge(plan, 0, source_, c + 1, corners[c].position, Side::None, nullptr, &corners[c]));
    }
    for (std::uint32_t t = 0; t < nt_; ++t) {
      if (plan.corner_inside(source_, links_->dests()[t])) continue;
      own_.push_back(detail::make_edge(plan, 0, source_, nc_ + 1 + t, links_->dests()[t], Side::None, nullptr, nullptr));
    }

    // Outgoing lists: the source's own edges, then per corner a merge of the
    // angle-sorted corner and destination lists.
    const std::uint32_t n_nodes = num_nodes();
    out_start_.assign(n_nodes + 1, 0);
    out_start_[1] = static_cast<std::uint32_t>(own_.size());
    for (std::uint32_t c = 0; c < nc_; ++c)
      out_start_[c + 2] = out_start_[c + 1] + static_cast<std::uint32_t>(cv.out(c).size() + links_->out(c).size());
    for (std::uint32_t v = nc_ + 1; v < n_nodes; ++v) out_start_[v + 1] = out_start_[v];
    out_ids_.resize(out_start_.back());
    for (std::uint32_t i = 0; i < own_.size(); ++i) out_ids_[i] = n_cc_ + n_ct_ + i;
    for (std::uint32_t c = 0; c < nc_; ++c) {
      const auto& l = cv.out(c);
      const auto& r = links_->out(c);
      std::merge(l.begin(), l.end(), r.begin(), r.end(), out_ids_.begin() + out_start_[c + 1],
                 [&](std::uint32_t x, std::uint32_t y) {
                   const double ax = edge(x).angle_from;
                   const double ay = edge(y).angle_from;
                   return ax != ay ? ax < ay : x < y;
                 });
    }
    in_start_.assign(nc_ + 1, 0);
    for (std::uint32_t c = 0; c < nc_; ++c)
      in_start_[c + 1] = in_start_[c] + static_cast<std::uint32_t>(cv.in(c).size());
    std::vector<std::uint32_t> source_in(nc_, UINT32_MAX);
    for (std::uint32_t i = 0; i < own_.size(); ++i)
      if (own_[i].to <= nc_) source_in[own_[i].to - 1] = n_cc_ + n_ct_ + i;
    std::uint32_t extra = 0;
    for (std::uint32_t c = 0; c < nc_; ++c) extra += source_in[c] != UINT32_MAX;
    in_ids_.reserve(in_start_.back() + extra);
    std::vector<std::uint32_t> starts(nc_ + 1, 0);
    for (std::uint32_t c = 0; c < nc_; ++c) {
      starts[c] = static_cast<std::uint32_t>(in_ids_.size());
      if (source_in[c] != UINT32_MAX) in_ids_.push_back(source_in[c]);
      in_ids_.insert(in_ids_.end(), cv.in(c).begin(), cv.in(c).end());
    }
    starts[nc_] = static_cast<std::uint32_t>(in_ids_.size());
    in_start_ = std::move(starts);
  }

  const Floorplan& plan() const { return links_->visibility().plan(); }
  const DestLinks& links() const { return *links_; }
  const std::shared_ptr<const DestLinks>& links_ptr() const { return links_; }

  std::uint32_t num_corners() const { return nc_; }
  std::uint32_t num_dests() const { return nt_; }
  std::uint32_t num_nodes() const { return 1 + nc_ + nt_; }
  std::uint32_t num_edges() const { return n_cc_ + n_ct_ + static_cast<std::uint32_t>(own_.size()); }

  static constexpr std::uint32_t source_node() { return 0; }
  std::uint32_t corner_node(std::uint32_t c) const { return 1 + c; }
  std::uint32_t dest_node(std::uint32_t t) const { return 1 + nc_ + t; }
  NodeKind kind(std::uint32_t node) const {
    return node == 0 ? NodeKind::Source : (node <= nc_ ? NodeKind::Corner : NodeKind::Dest);
  }
  std::uint32_t corner_of(std::uint32_t node) const { return node - 1; }
  std::uint32_t dest_of(std::uint32_t node) const { return node - 1 - nc_; }

  Point source() const { return source_; }
  const std::vector<Point>& dests() const { return links_->dests(); }
  Point position(std::uint32_t node) const {
    if (node == 0) return source_;
    if (node <= nc_) return plan().corners()[node - 1].position;
    return links_->dests()[node - 1 - nc_];
  }

  const G1Edge& edge(std::uint32_t e) const {
    if (e < n_cc_) return links_->visibility().edges()[e];
    if (e < n_cc_ + n_ct_) return links_->edges()[e - n_cc_];
    return own_[e - n_cc_ - n_ct_];
  }

  /// Outgoing edge ids. For corners they are sorted by angle.
  std::span<const std::uint32_t> out_edges(std::uint32_t node) const {
    return {out_ids_.data() + out_start_[node], out_start_[node + 1] - out_start_[node]};
  }
  /// Incoming edge ids of a corner (0-based corner index).
  std::span<const std::uint32_t> corner_in_edges(std::uint32_t corner) const {
    return {in_ids_.data() + in_start_[corner], in_start_[corner + 1] - in_start_[corner]};
  }

 private:
  std::shared_ptr<const DestLinks> links_;
  Point source_;
  std::uint32_t nc_ = 0;
  std::uint32_t nt_ = 0;
  std::uint32_t n_cc_ = 0;
  std::uint32_t n_ct_ = 0;
  std::vector<G1Edge> own_;
  std::vector<std::uint32_t> out_start_;
  std::vector<std::uint32_t> out_ids_;
  std::vector<std::uint32_t> in_start_;
  std::vector<std::uint32_t> in_ids_;
};

inline G1 build_g1(std::shared_ptr<const CornerVisibility> cv, Point source, const std::vector<Point>& dests) {
  return G1(std::make_shared<const DestLinks>(std::move(cv), dests), source);
}

inline G1 build_g1(const Floorplan& plan, Point source, const std::vector<Point>& dests) {
  return build_g1(build_corner_visibility(std::make_shared<const Floorplan>(plan)), source, dests);
}

/// Loss of turning at a corner: k_c times the deflection angle, plus the
/// cheaper of the clockwise and counterclockwise sweeps from the sector the
/// signal arrives from to the sector it leaves into.
inline double intra_corner_loss(const Corner& c, Point dir_in, std::uint32_t sector_in, Point dir_out,
                                std::uint32_t sector_out) {
  const double bend = c.diffraction_db_per_rad * deflection_angle(dir_in, dir_out);
  if (sector_in == kNoSector || sector_out == kNoSector) return snap_weight(bend);
  return snap_weight(bend + c.sector_penetration(sector_in, sector_out));
}

inline double intra_corner_loss(const G1& g, std::uint32_t e_in, std::uint32_t e_out) {
  const G1Edge& a = g.edge(e_in);
  const G1Edge& b = g.edge(e_out);
  return intra_corner_loss(g.plan().corners()[g.corner_of(a.to)], a.dir, a.sector_to, b.dir, b.sector_from);
}

/// Writes one `from to dist loss` line per edge.
inline void dump_edges(const G1& g, std::ostream& os) {
  os.precision(17);
  for (std::uint32_t e = 0; e < g.num_edges(); ++e) {
    const G1Edge& x = g.edge(e);
    os << x.from << ' ' << x.to << ' ' << x.dist << ' ' << x.loss << '\n';
  }
}

// ---------------------------------------------------------------------------
// Explicit G2

struct G2Node {
  enum class Kind : std::uint8_t { Source, Dest, In, Out };
  Kind kind = Kind::Source;
  std::uint32_t corner = UINT32_MAX;   // In/Out
  std::uint32_t g1_edge = UINT32_MAX;  // In/Out
  std::uint32_t dest = UINT32_MAX;     // Dest
  double angle = 0.0;
  std::uint32_t sector = kNoSector;
};

struct G2Edge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  double dist = 0.0;
  double loss = 0.0;
  std::uint32_t g1_edge = UINT32_MAX;  // UINT32_MAX for intra-corner edges
};

/// Restricts a search to part of G1. Empty vectors mean "everything active".
/// dest_dmax prunes a corner-to-destination edge (c, t) when
/// |s - c| + |c - t| exceeds dest_dmax[t].
struct SearchFilter {
  std::vector<char> dest_active;
  std::vector<char> corner_active;
  std::vector<double> dest_dmax;

  bool dest_ok(std::uint32_t t) const { return dest_active.empty() || dest_active[t]; }
  bool corner_ok(std::uint32_t c) const { return corner_active.empty() || corner_active[c]; }
};

/// True when edge e survives the filter.
inline bool edge_active(const G1& g, const SearchFilter& f, std::uint32_t e) {
  const G1Edge& x = g.edge(e);
  if (g.kind(x.from) == NodeKind::Corner && !f.corner_ok(g.corner_of(x.from))) return false;
  switch (g.kind(x.to)) {
    case NodeKind::Corner:
      return f.corner_ok(g.corner_of(x.to));
    case NodeKind::Dest: {
      const std::uint32_t t = g.dest_of(x.to);
      if (!f.dest_ok(t)) return false;
      if (!f.dest_dmax.empty() && x.from != 0) {
        const Point c = g.position(x.from);
        if (distance(g.source(), c) + x.dist > f.dest_dmax[t] * (1.0 + 1e-12) + kGeomEps) return false;
      }
      return true;
    }
    default:
      return true;
  }
}

/// Corner graph exploded into sockets. Node 0 is the source, nodes 1..T the
/// destinations, then one In socket per G1 edge entering a corner and one Out
/// socket per G1 edge leaving a corner. Every In socket connects to every Out
/// socket of the same corner, U-turns included.
class G2Explicit {
 public:
  explicit G2Explicit(const G1& g, const SearchFilter& filter = {}) : nt_(g.num_dests()) {
    nodes_.push_back({});
    for (std::uint32_t t = 0; t < nt_; ++t) {
      G2Node n;
      n.kind = G2Node::Kind::Dest;
      n.dest = t;
      nodes_.push_back(n);
    }
    const std::uint32_t m = g.num_edges();
    in_node_.assign(m, UINT32_MAX);
    out_node_.assign(m, UINT32_MAX);
    active_.assign(m, 0);
    for (std::uint32_t e = 0; e < m; ++e) {
      if (!edge_active(g, filter, e)) continue;
      active_[e] = 1;
      const G1Edge& x = g.edge(e);
      if (g.kind(x.from) == NodeKind::Corner) {
        out_node_[e] = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back({G2Node::Kind::Out, g.corner_of(x.from), e, UINT32_MAX, x.angle_from, x.sector_from});
      }
      if (g.kind(x.to) == NodeKind::Corner) {
        in_node_[e] = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back({G2Node::Kind::In, g.corner_of(x.to), e, UINT32_MAX, x.angle_to, x.sector_to});
      }
    }
    for (std::uint32_t e = 0; e < m; ++e) {
      if (!active_[e]) continue;
      const G1Edge& x = g.edge(e);
      const std::uint32_t from = x.from == 0 ? 0 : out_node_[e];
      const std::uint32_t to = g.kind(x.to) == NodeKind::Dest ? 1 + g.dest_of(x.to) : in_node_[e];
      edges_.push_back({from, to, x.dist, x.loss, e});
    }
    for (std::uint32_t c = 0; c < g.num_corners(); ++c) {
      if (!filter.corner_ok(c)) continue;
      const auto outs = g.out_edges(g.corner_node(c));
      for (std::uint32_t ei : g.corner_in_edges(c)) {
        if (!active_[ei]) continue;
        for (std::uint32_t eo : outs) {
          if (!active_[eo]) continue;
          edges_.push_back({in_node_[ei], out_node_[eo], 0.0, intra_corner_loss(g, ei, eo), UINT32_MAX});
        }
      }
    }
    start_.assign(nodes_.size() + 1, 0);
    for (const G2Edge& e : edges_) ++start_[e.from + 1];
    for (std::size_t i = 0; i < nodes_.size(); ++i) start_[i + 1] += start_[i];
    adj_.resize(edges_.size());
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    for (std::uint32_t i = 0; i < edges_.size(); ++i) adj_[fill[edges_[i].from]++] = i;
  }

  std::uint32_t num_nodes() const { return static_cast<std::uint32_t>(nodes_.size()); }
  std::uint32_t num_edges() const { return static_cast<std::uint32_t>(edges_.size()); }
  std::uint32_t num_dests() const { return nt_; }
  static constexpr std::uint32_t source_node() { return 0; }
  std::uint32_t dest_node(std::uint32_t t) const { return 1 + t; }
  const G2Node& node(std::uint32_t v) const { return nodes_[v]; }
  const G2Edge& edge(std::uint32_t e) const { return edges_[e]; }
  const std::vector<G2Edge>& edges() const { return edges_; }
  std::span<const std::uint32_t> out_edges(std::uint32_t v) const {
    return {adj_.data() + start_[v], start_[v + 1] - start_[v]};
  }
  /// Socket node of G1 edge e at its head / tail corner (UINT32_MAX if none).
  std::uint32_t in_socket(std::uint32_t e) const { return in_node_[e]; }
  std::uint32_t out_socket(std::uint32_t e) const { return out_node_[e]; }

 private:
  std::uint32_t nt_;
  std::vector<G2Node> nodes_;
  std::vector<G2Edge> edges_;
  std::vector<std::uint32_t> in_node_;
  std::vector<std::uint32_t> out_node_;
  std::vector<char> active_;
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> adj_;
};

inline void dump_edges(const G2Explicit& g, std::ostream& os) {
  os.precision(17);
  for (const G2Edge& e : g.edges()) os << e.from << ' ' << e.to << ' ' << e.dist << ' ' << e.loss << '\n';
}

}  // namespace idp
