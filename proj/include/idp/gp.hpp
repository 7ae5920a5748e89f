#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "idp/hull.hpp"
#include "idp/psp.hpp"

namespace idp {

/// Worst ratio between a grid lambda and the ideal alpha / d*: r ln r / (r - 1).
inline double gamma_hat(double r) {
  if (!(r > 1.0)) throw std::invalid_argument("r must be > 1");
  return r * std::log(r) / (r - 1.0);
}

/// Worst-case additive error of GP(r), in dB:
/// alpha * (-1 + ln r / (r - 1) + ln(r - 1) - ln ln r).
inline double worst_error_bound(double r, double alpha) {
  if (!(r > 1.0)) throw std::invalid_argument("r must be > 1");
  const double x = r - 1.0;
  const double lnr = std::log1p(x);
  return alpha * (-1.0 + lnr / x + std::log(x) - std::log(lnr));
}

/// Expected additive error of GP(r) with a uniformly random offset, in dB:
/// alpha * (-ln(r) / 2 + ln(r - 1) - ln ln r).
inline double expected_error_bound(double r, double alpha) {
  if (!(r > 1.0)) throw std::invalid_argument("r must be > 1");
  const double x = r - 1.0;
  const double lnr = std::log1p(x);
  return alpha * (-0.5 * lnr + std::log(x) - std::log(lnr));
}

struct GPConfig {
  double r = 2.0;
  double u = 0.0;  // offset exponent, lambda0 = r^u

  double lambda0() const { return std::pow(r, u); }
  double gamma() const { return gamma_hat(r); }

  /// Config with u drawn uniformly from [0, 1).
  static GPConfig random(double r, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return {r, std::uniform_real_distribution<double>(0.0, 1.0)(rng)};
  }
};

struct ActiveInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double lam) const { return lam >= lo && lam <= hi; }
};

/// [alpha g / (r dmax), alpha g / dmin]: running SP at any lambda in this
/// interval is enough for the error bounds of destination t.
inline ActiveInterval active_interval(double dmin, double dmax, const GPConfig& cfg, double alpha) {
  if (!(dmin > 0.0) || !(dmax >= dmin)) throw std::invalid_argument("active_interval: need 0 < dmin <= dmax");
  const double g = cfg.gamma();
  return {alpha * g / (cfg.r * dmax), alpha * g / dmin};
}

/// All lambda0 * r^i inside the interval for [dmin_all, dmax_all], ascending.
inline std::vector<double> lambda_grid(double dmin_all, double dmax_all, const GPConfig& cfg, double alpha) {
  const ActiveInterval a = active_interval(dmin_all, dmax_all, cfg, alpha);
  const double l0 = cfg.lambda0();
  const double lr = std::log(cfg.r);
  long long i = static_cast<long long>(std::floor(std::log(a.lo / l0) / lr)) - 1;
  std::vector<double> out;
  for (;; ++i) {
    const double lam = l0 * std::pow(cfg.r, static_cast<double>(i));
    if (lam > a.hi) break;
    if (lam >= a.lo) out.push_back(lam);
  }
  return out;
}

/// M(lambda): destinations whose active interval contains lambda.
inline std::vector<std::uint32_t> destinations_for(double lam, const std::vector<Extremes>& ext, const GPConfig& cfg,
                                                   double alpha, const std::vector<char>* among = nullptr) {
  const double g = cfg.gamma();
  std::vector<std::uint32_t> out;
  for (std::uint32_t t = 0; t < ext.size(); ++t) {
    if (among && !(*among)[t]) continue;
    if (ext[t].dmin <= alpha * g / lam && ext[t].dmax >= alpha * g / (cfg.r * lam)) out.push_back(t);
  }
  return out;
}

/// Search filter for SP(lambda) restricted to destinations `m`: a corner stays
/// active if some t in m has |s - c| + |c - t| <= dmax(t); corner-to-t edges
/// beyond dmax(t) are dropped.
inline SearchFilter prune_corners(const G1& g, const std::vector<std::uint32_t>& m, const std::vector<Extremes>& ext) {
  SearchFilter f;
  f.dest_active.assign(g.num_dests(), 0);
  for (std::uint32_t t : m) f.dest_active[t] = 1;
  f.dest_dmax.assign(g.num_dests(), 0.0);
  for (std::uint32_t t = 0; t < g.num_dests(); ++t) f.dest_dmax[t] = ext[t].dmax;
  f.corner_active.assign(g.num_corners(), 0);
  const Point s = g.source();
  const auto& corners = g.plan().corners();
  for (std::uint32_t c = 0; c < g.num_corners(); ++c) {
    const Point p = corners[c].position;
    const double sc = distance(s, p);
    for (std::uint32_t t : m) {
      if (sc + distance(p, g.dests()[t]) <= ext[t].dmax * (1.0 + 1e-12) + kGeomEps) {
        f.corner_active[c] = 1;
        break;
      }
    }
  }
  return f;
}

struct GPDest {
  PathSummary path;
  double obj = 0.0;
  double pl_db = 0.0;
};

struct GPStats {
  std::vector<double> lambdas;               // grid values actually run
  std::vector<std::uint32_t> m_sizes;        // |M(lambda_i)| per run
  std::vector<std::uint32_t> unpruned_runs;  // per destination
  std::uint64_t relaxations = 0;
  std::uint64_t explicit_equivalent = 0;
  std::uint64_t noop_relaxations = 0;
  std::uint64_t noop_bound_violations = 0;
  double seconds = 0.0;
};

struct GPResult {
  std::vector<GPDest> dests;
  GPStats stats;
};

/// GP(r, lambda0) from one source. The lambda = 0 search over the full graph
/// and the per-destination extremes are computed once and reused by every
/// run(), so several offsets u can be tried cheaply.
class GPSession {
 public:
  GPSession(const G1& g, std::vector<char> dest_mask = {}) : g_(g), engine_(g), mask_(std::move(dest_mask)) {
    const auto t0 = std::chrono::steady_clock::now();
    SearchFilter f;
    f.dest_active = mask_;
    SPResult r0 = engine_.run(Lambda::of(0.0), f);
    base_relax_ = r0.relaxation_count;
    base_explicit_ = r0.explicit_equivalent_count;
    base_noop_ = r0.noop_relaxation_count;
    init(r0.paths);
    base_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  /// Reuses lambda = 0 paths computed elsewhere (one per destination; only
  /// entries of active destinations are read).
  GPSession(const G1& g, std::vector<char> dest_mask, std::vector<std::optional<PathSummary>> sp0)
      : g_(g), engine_(g), mask_(std::move(dest_mask)) {
    init(sp0);
  }

  const std::vector<Extremes>& extremes() const { return ext_; }
  bool active(std::uint32_t t) const { return mask_.empty() || mask_[t]; }

  GPResult run(const GPConfig& cfg, bool prune = true) {
    const auto t0 = std::chrono::steady_clock::now();
    const double alpha = g_.plan().alpha();
    const RadioConstants& rc = g_.plan().constants();
    GPResult res;
    res.stats.relaxations = base_relax_;
    res.stats.explicit_equivalent = base_explicit_;
    res.stats.noop_relaxations = base_noop_;
    res.stats.unpruned_runs.assign(g_.num_dests(), 0);
    res.dests.resize(g_.num_dests());
    double dmin_all = kInf;
    double dmax_all = 0.0;
    for (std::uint32_t t = 0; t < g_.num_dests(); ++t) {
      if (!active(t)) continue;
      res.dests[t].path = sp0_[t];
      res.dests[t].obj = obj(sp0_[t].dist, sp0_[t].loss, alpha);
      dmin_all = std::min(dmin_all, ext_[t].dmin);
      dmax_all = std::max(dmax_all, ext_[t].dmax);
    }
    if (dmin_all == kInf) return res;

    for (double lam : lambda_grid(dmin_all, dmax_all, cfg, alpha)) {
      const std::vector<char>* among = mask_.empty() ? nullptr : &mask_;
      std::vector<std::uint32_t> m;
      SearchFilter f;
      if (prune) {
        m = destinations_for(lam, ext_, cfg, alpha, among);
        if (m.empty()) continue;
        f = prune_corners(g_, m, ext_);
      } else {
        for (std::uint32_t t = 0; t < g_.num_dests(); ++t)
          if (active(t)) m.push_back(t);
        f.dest_active = mask_;
      }
      SPResult r = engine_.run(Lambda::of(lam), f);
      res.stats.lambdas.push_back(lam);
      res.stats.m_sizes.push_back(static_cast<std::uint32_t>(m.size()));
      res.stats.relaxations += r.relaxation_count;
      res.stats.explicit_equivalent += r.explicit_equivalent_count;
      res.stats.noop_relaxations += r.noop_relaxation_count;
      res.stats.noop_bound_violations += r.noop_bound_violations;
      for (std::uint32_t t : m) {
        ++res.stats.unpruned_runs[t];
        const PathSummary& p = *r.paths[t];
        const double o = obj(p.dist, p.loss, alpha);
        if (o < res.dests[t].obj) {
          res.dests[t].obj = o;
          res.dests[t].path = p;
        }
      }
    }
    for (std::uint32_t t = 0; t < g_.num_dests(); ++t)
      if (active(t)) res.dests[t].pl_db = path_loss_db(res.dests[t].path.dist, res.dests[t].path.loss, rc);
    res.stats.seconds = base_seconds_ + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

 private:
  void init(std::vector<std::optional<PathSummary>>& paths) {
    ext_.resize(g_.num_dests());
    sp0_.resize(g_.num_dests());
    for (std::uint32_t t = 0; t < g_.num_dests(); ++t) {
      if (!active(t)) continue;
      ext_[t].dmin = distance(g_.source(), g_.dests()[t]);
      ext_[t].dmax = std::max(paths[t]->dist, ext_[t].dmin);
      ext_[t].loss0 = paths[t]->loss;
      sp0_[t] = std::move(*paths[t]);
    }
  }

  const G1& g_;
  ImplicitEngine engine_;
  std::vector<char> mask_;
  std::vector<Extremes> ext_;
  std::vector<PathSummary> sp0_;
  std::uint64_t base_relax_ = 0;
  std::uint64_t base_explicit_ = 0;
  std::uint64_t base_noop_ = 0;
  double base_seconds_ = 0.0;
};

inline GPResult run_gp(const G1& g, const GPConfig& cfg, bool prune = true) {
  GPSession session(g);
  return session.run(cfg, prune);
}

/// Expected number of grid lambdas inside A(t) for a uniform offset:
/// 1 + log_r(dmax / dmin).
inline double expected_unpruned_runs(const Extremes& e, double r) {
  return 1.0 + std::log(e.dmax / e.dmin) / std::log(r);
}

}  // namespace idp
