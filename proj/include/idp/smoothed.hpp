#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "idp/hull.hpp"
#include "idp/psp.hpp"

namespace idp {

/// CDF of the exponential law with mean rho truncated to [0, pi].
inline double truncated_exp_cdf(double theta, double rho) {
  if (theta <= 0.0) return 0.0;
  if (theta >= kPi) return 1.0;
  return std::expm1(-theta / rho) / std::expm1(-kPi / rho);
}

/// Inverse-CDF draw of the truncated exponential angle.
template <class Rng>
double draw_truncated_exp(double rho, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return -rho * std::log1p(u * std::expm1(-kPi / rho));
}

inline double euclidean_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Rotates the unit vector u by a random angle theta ~ Exp(rho) truncated to
/// [0, pi], toward a uniformly random direction orthogonal to u.
template <class Rng>
std::vector<double> rho_perturb(const std::vector<double>& u, double rho, Rng& rng, double* theta_out = nullptr) {
  const std::size_t m = u.size();
  if (m < 2) throw std::invalid_argument("rho_perturb: need at least 2 entries");
  const double nu = euclidean_norm(u);
  if (nu == 0.0) throw std::invalid_argument("rho_perturb: zero vector");
  if (std::abs(nu - 1.0) > 1e-9) throw std::invalid_argument("rho_perturb: input must be unit length");
  if (!(rho > 0.0)) throw std::invalid_argument("rho_perturb: rho must be positive");
  const double theta = draw_truncated_exp(rho, rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> w(m);
  double nw = 0.0;
  while (nw < 1e-6) {
    double dot_uw = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      w[i] = gauss(rng);
      dot_uw += w[i] * u[i];
    }
    for (std::size_t i = 0; i < m; ++i) w[i] -= dot_uw * u[i];
    nw = euclidean_norm(w);
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta) / nw;
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = c * u[i] + s * w[i];
  const double no = euclidean_norm(out);
  for (double& x : out) x /= no;
  if (theta_out) *theta_out = theta;
  return out;
}

/// Label-correcting search on G2 with arbitrary-sign weights, using the same
/// lexicographic keys as the Dijkstra engines. Returns nullopt when a cycle
/// of negative hybrid weight is reachable.
inline std::optional<PathSummary> sp_label_correcting(const G1& g1, const G2Explicit& g2, std::uint32_t dest,
                                                      Lambda lam, const std::vector<double>& dist_w,
                                                      const std::vector<double>& loss_w) {
  const std::uint32_t n = g2.num_nodes();
  std::vector<Label> label(n);
  std::vector<std::uint32_t> parent(n, kNone);
  std::vector<std::uint32_t> updates(n, 0);
  std::vector<char> queued(n, 0);
  std::deque<std::uint32_t> queue;
  label[0] = {0.0, 0.0};
  queue.push_back(0);
  queued[0] = 1;
  while (!queue.empty()) {
    const std::uint32_t v = queue.front();
    queue.pop_front();
    queued[v] = 0;
    for (std::uint32_t ei : g2.out_edges(v)) {
      const G2Edge& e = g2.edge(ei);
      const Label cand{label[v].loss + loss_w[ei], label[v].dist + dist_w[ei]};
      if (!(key_of(cand, lam) < key_of(label[e.to], lam))) continue;
      label[e.to] = cand;
      parent[e.to] = ei;
      if (++updates[e.to] > n) return std::nullopt;
      if (!queued[e.to]) {
        queued[e.to] = 1;
        queue.push_back(e.to);
      }
    }
  }
  const std::uint32_t t = g2.dest_node(dest);
  if (!label[t].reached()) return std::nullopt;
  PathSummary p;
  p.dist = label[t].dist;
  p.loss = label[t].loss;
  std::uint32_t steps = 0;
  for (std::uint32_t u = t; u != 0; u = g2.edge(parent[u]).from) {
    if (++steps > n) return std::nullopt;  // parent cycle: negative cycle on the way
    const G2Edge& e = g2.edge(parent[u]);
    if (e.g1_edge != kNone) p.edges.push_back(e.g1_edge);
  }
  std::reverse(p.edges.begin(), p.edges.end());
  p.nodes = detail::nodes_of(g1, p.edges);
  return p;
}

enum class NegativeWeightPolicy {
  /// Keep draws with negative entries and search with a label-correcting
  /// method; only draws that create a negative cycle are redrawn.
  LabelCorrecting,
  /// Redraw whenever any perturbed entry is negative.
  Reject,
};

struct PerturbationConfig {
  double rho = 0.0;
  std::uint64_t seed = 1;
  int trials = 100;
  NegativeWeightPolicy policy = NegativeWeightPolicy::LabelCorrecting;
};

struct TrialReport {
  std::vector<int> extreme_points;  // B per trial
  std::vector<int> rejections;      // redraws per trial
  double bound = 0.0;               // 4 pi sqrt(2m) / rho
  std::size_t m = 0;                // number of G2 edges
  double mean_b() const {
    double s = 0.0;
    for (int b : extreme_points) s += b;
    return extreme_points.empty() ? 0.0 : s / static_cast<double>(extreme_points.size());
  }
};

/// Smoothed-analysis bound on the expected number of hull points: 4 pi sqrt(2m) / rho.
inline double smoothed_bound(std::size_t m, double rho) {
  return 4.0 * kPi * std::sqrt(2.0 * static_cast<double>(m)) / rho;
}

/// Perturbs the G2 distance and loss vectors `trials` times and counts the
/// exact hull points for s-t each time. Trial k uses the generator seeded
/// with seed + k.
inline TrialReport smoothed_trial(const G1& g1, const G2Explicit& g2, std::uint32_t dest,
                                  const PerturbationConfig& cfg) {
  const std::size_t m = g2.num_edges();
  std::vector<double> d(m);
  std::vector<double> l(m);
  for (std::size_t i = 0; i < m; ++i) {
    d[i] = g2.edge(static_cast<std::uint32_t>(i)).dist;
    l[i] = g2.edge(static_cast<std::uint32_t>(i)).loss;
  }
  const double nd = euclidean_norm(d);
  const double nl = euclidean_norm(l);
  if (nd == 0.0 || nl == 0.0) throw ValidationError("smoothed_trial: distance or loss vector is zero");
  for (double& x : d) x /= nd;
  for (double& x : l) x /= nl;

  TrialReport rep;
  rep.m = m;
  rep.bound = smoothed_bound(m, cfg.rho);
  std::uint64_t draws = 0;
  std::uint64_t rejected = 0;
  for (int k = 0; k < cfg.trials; ++k) {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(k));
    int rej = 0;
    for (;;) {
      ++draws;
      std::vector<double> pd = rho_perturb(d, cfg.rho, rng);
      std::vector<double> pl = rho_perturb(l, cfg.rho, rng);
      for (double& x : pd) x *= nd;
      for (double& x : pl) x *= nl;
      bool ok = true;
      if (cfg.policy == NegativeWeightPolicy::Reject) {
        for (std::size_t i = 0; i < m && ok; ++i) ok = pd[i] >= 0.0 && pl[i] >= 0.0;
      }
      std::optional<HullResult> hull;
      if (ok) {
        try {
          hull = exact_hull([&](Lambda lam) {
            auto p = sp_label_correcting(g1, g2, dest, lam, pd, pl);
            if (!p) throw std::domain_error("negative cycle");
            return std::move(*p);
          });
        } catch (const std::domain_error&) {
          ok = false;
        }
      }
      if (ok) {
        rep.extreme_points.push_back(static_cast<int>(hull->points.size()));
        break;
      }
      ++rej;
      ++rejected;
      if (draws >= 20 && 2 * rejected > draws)
        throw std::runtime_error("smoothed_trial: more than half of the draws were rejected; rho is too large "
                                 "for this instance");
    }
    rep.rejections.push_back(rej);
  }
  return rep;
}

}  // namespace idp
