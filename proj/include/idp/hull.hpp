#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "idp/psp.hpp"

namespace idp {

/// obj(d, l) = l + alpha * ln d, the quantity the dominant path minimizes.
inline double obj(double d, double loss, double alpha) {
  if (!(d > 0.0)) throw std::invalid_argument("obj: distance must be positive");
  return loss + alpha * std::log(d);
}

/// PL = PL0 + l + 10 * n * log10(d / d0), in dB.
inline double path_loss_db(double d, double loss, const RadioConstants& rc) {
  if (!(d > 0.0)) throw std::invalid_argument("path_loss_db: distance must be positive");
  return rc.reference_loss_db + loss + 10.0 * rc.freespace_exponent * std::log10(d / rc.reference_distance_m);
}

struct HullPoint {
  double dist = 0.0;
  double loss = 0.0;
  PathSummary path;
};

/// Lower-left convex hull of the (dist, loss) cloud of all s-t paths.
struct HullResult {
  std::vector<HullPoint> points;    // decreasing dist, increasing loss
  std::vector<double> breakpoints;  // lambda between points i and i+1
  int sp_calls = 0;
};

namespace detail {

template <class SP>
void hull_between(SP& sp, const HullPoint& left, const HullPoint& right, HullResult& out, int depth) {
  if (depth > 64) throw std::runtime_error("exact_hull: recursion depth exceeded");
  const double lam = (right.loss - left.loss) / (left.dist - right.dist);
  HullPoint mid;
  {
    PathSummary p = sp(Lambda::of(lam));
    ++out.sp_calls;
    mid.dist = p.dist;
    mid.loss = p.loss;
    mid.path = std::move(p);
  }
  const double h_left = left.loss + lam * left.dist;
  const double h_mid = mid.loss + lam * mid.dist;
  const double tol = 1e-9 * std::max({1.0, std::abs(left.loss), std::abs(right.loss)});
  if (h_left - h_mid > tol) {
    hull_between(sp, left, mid, out, depth + 1);
    out.points.push_back(mid);
    hull_between(sp, mid, right, out, depth + 1);
  } else {
    out.breakpoints.push_back(lam);
  }
}

}  // namespace detail

/// Exact hull by recursive chord splitting. `sp(Lambda)` must return the
/// parametric shortest path (with the lexicographic tie rules) for one fixed
/// destination. Uses 2B - 1 calls for B >= 2 extreme points, 2 when B = 1.
template <class SP>
HullResult exact_hull(SP&& sp) {
  HullResult out;
  HullPoint left;
  HullPoint right;
  {
    PathSummary p0 = sp(Lambda::of(0.0));
    left.dist = p0.dist;
    left.loss = p0.loss;
    left.path = std::move(p0);
    PathSummary pi = sp(Lambda::inf());
    right.dist = pi.dist;
    right.loss = pi.loss;
    right.path = std::move(pi);
    out.sp_calls = 2;
  }
  const double ltol = 1e-9 * std::max({1.0, std::abs(left.loss), std::abs(right.loss)});
  if (left.dist - right.dist <= 1e-12 * std::max(1.0, left.dist) || right.loss - left.loss <= ltol) {
    out.points.push_back(std::move(left));
    return out;
  }
  out.points.push_back(left);
  detail::hull_between(sp, left, right, out, 0);
  out.points.push_back(std::move(right));
  return out;
}

struct DominantPath {
  PathSummary path;
  double dist = 0.0;
  double loss = 0.0;
  double obj = 0.0;
  double pl_db = 0.0;
  double lambda_star = 0.0;  // alpha / d*
};

/// The hull point of least obj; ties go to the shorter path.
inline DominantPath dominant_path(const HullResult& hull, const RadioConstants& rc) {
  if (hull.points.empty()) throw std::invalid_argument("dominant_path: empty hull");
  const double alpha = rc.alpha();
  std::size_t best = 0;
  double best_obj = obj(hull.points[0].dist, hull.points[0].loss, alpha);
  for (std::size_t i = 1; i < hull.points.size(); ++i) {
    const double o = obj(hull.points[i].dist, hull.points[i].loss, alpha);
    if (o < best_obj || (o == best_obj && hull.points[i].dist < hull.points[best].dist)) {
      best = i;
      best_obj = o;
    }
  }
  const HullPoint& p = hull.points[best];
  return {p.path, p.dist, p.loss, best_obj, path_loss_db(p.dist, p.loss, rc), alpha / p.dist};
}

/// Computes the exact hull for one destination of G1 with the implicit engine.
///
/// Searches at finite lambda > 0 are restricted to corners c with
/// |s - c| + |c - t| <= dmax, where dmax is the distance of the lambda = 0
/// path: no path longer than that can be optimal for any lambda >= 0. The
/// lambda = inf search only uses corners on the segment s-t.
class PairHullSolver {
 public:
  /// `engine`, if given, must be built on `g`; it lets many solvers share
  /// one set of scratch buffers.
  PairHullSolver(const G1& g, std::uint32_t dest, ImplicitEngine* engine = nullptr) : g_(g), t_(dest) {
    if (!engine) {
      own_ = std::make_unique<ImplicitEngine>(g);
      engine = own_.get();
    }
    engine_ = engine;
    base_.dest_active.assign(g.num_dests(), 0);
    base_.dest_active[dest] = 1;
  }

  /// The lambda = 0 path over the full graph (cached).
  const PathSummary& sp0() {
    if (!sp0_) {
      SPResult r = engine_->run(Lambda::of(0.0), base_, guided());
      sp0_ = std::move(*r.paths[t_]);
      count(r);
    }
    return *sp0_;
  }

  PathSummary operator()(Lambda lam) {
    if (!lam.infinite && lam.value == 0.0) return sp0();
    const Point s = g_.source();
    const Point t = g_.dests()[t_];
    SearchFilter f = base_;
    f.corner_active.assign(g_.num_corners(), 0);
    if (lam.infinite) {
      for (std::uint32_t c = 0; c < g_.num_corners(); ++c)
        f.corner_active[c] = strictly_inside_segment(g_.plan().corners()[c].position, s, t) ? 1 : 0;
    } else {
      const double dmax = sp0().dist;
      const double lim = dmax * (1.0 + 1e-12) + kGeomEps;
      for (std::uint32_t c = 0; c < g_.num_corners(); ++c) {
        const Point p = g_.plan().corners()[c].position;
        f.corner_active[c] = distance(s, p) + distance(p, t) <= lim ? 1 : 0;
      }
    }
    SPResult r = engine_->run(lam, f, guided());
    count(r);
    return std::move(*r.paths[t_]);
  }

  /// Supplies the lambda = 0 path, e.g. from one search shared by many
  /// destinations.
  void set_sp0(PathSummary p) { sp0_ = std::move(p); }

  HullResult solve() { return exact_hull(*this); }

  ImplicitEngine& engine() { return *engine_; }
  std::uint64_t relaxations() const { return relax_; }
  std::uint64_t explicit_equivalent() const { return explicit_; }
  std::uint64_t noop_bound_violations() const { return violations_; }

 private:
  static SPOptions guided() {
    SPOptions o;
    o.goal_directed = true;
    return o;
  }

  void count(const SPResult& r) {
    relax_ += r.relaxation_count;
    explicit_ += r.explicit_equivalent_count;
    violations_ += r.noop_bound_violations;
  }

  const G1& g_;
  std::uint32_t t_;
  std::unique_ptr<ImplicitEngine> own_;
  ImplicitEngine* engine_ = nullptr;
  SearchFilter base_;
  std::optional<PathSummary> sp0_;
  std::uint64_t relax_ = 0;
  std::uint64_t explicit_ = 0;
  std::uint64_t violations_ = 0;
};

}  // namespace idp
