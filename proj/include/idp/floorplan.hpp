#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "idp/errors.hpp"
#include "idp/geometry.hpp"

namespace idp {

struct Wall {
  Point a;
  Point b;
  double penetration_db = 0.0;
  double diffraction_db_per_90 = 0.0;
};

/// Walls leaving a corner in one direction. Several walls only share an entry
/// when they overlap exactly; their penetration losses add up.
struct IncidentWall {
  double angle = 0.0;  // outgoing direction, [0, 2*pi)
  double penetration_db = 0.0;
  std::vector<std::uint32_t> walls;
};

/// A wall endpoint. Sector i is the open angular interval between incident
/// wall i and incident wall i+1 (cyclically), swept counterclockwise.
struct Corner {
  Point position;
  double diffraction_db_per_rad = 0.0;
  std::vector<IncidentWall> incident_walls;
  std::vector<double> penetration_prefix;  // size sectors+1

  std::size_t sector_count() const { return incident_walls.size(); }

  /// Sector containing a direction. A direction exactly on a wall belongs to
  /// the sector counterclockwise of it.
  std::size_t sector_of(double angle) const {
    const std::size_t k = incident_walls.size();
    auto it = std::upper_bound(incident_walls.begin(), incident_walls.end(), angle,
                               [](double a, const IncidentWall& w) { return a < w.angle; });
    const std::size_t idx = static_cast<std::size_t>(it - incident_walls.begin());
    return idx == 0 ? k - 1 : idx - 1;
  }

  /// Index of the incident wall lying exactly at `angle`, if any.
  std::optional<std::size_t> wall_at(double angle) const {
    auto it = std::lower_bound(incident_walls.begin(), incident_walls.end(), angle,
                               [](const IncidentWall& w, double a) { return w.angle < a; });
    if (it != incident_walls.end() && it->angle == angle)
      return static_cast<std::size_t>(it - incident_walls.begin());
    return std::nullopt;
  }

  /// Cheapest total penetration of the walls separating two sectors, sweeping
  /// either clockwise or counterclockwise.
  double sector_penetration(std::size_t from, std::size_t to) const {
    if (from == to) return 0.0;
    const double total = penetration_prefix.back();
    double ccw;
    if (to > from)
      ccw = penetration_prefix[to + 1] - penetration_prefix[from + 1];
    else
      ccw = total - (penetration_prefix[from + 1] - penetration_prefix[to + 1]);
    return std::min(ccw, total - ccw);
  }
};

struct RadioConstants {
  double freespace_exponent = 2.0;   // n-bar
  double reference_loss_db = 40.0;   // PL0
  double reference_distance_m = 1.0; // d0

  /// Multiplier of ln(d) in the objective: 10 * n / ln(10).
  double alpha() const { return 10.0 * freespace_exponent / std::log(10.0); }
};

/// Uniform bucket grid over segments or points, used to find the walls a
/// segment may cross without testing every wall.
class SegmentGrid {
 public:
  SegmentGrid() = default;

  SegmentGrid(Point lo, Point hi, std::size_t items) {
    const double w = std::max(hi.x - lo.x, 1e-6);
    const double h = std::max(hi.y - lo.y, 1e-6);
    double cell = std::sqrt(w * h / static_cast<double>(std::max<std::size_t>(items, 1)));
    cell = std::max({cell, w / 512.0, h / 512.0});
    cell_ = cell;
    origin_ = {lo.x - cell, lo.y - cell};
    nx_ = static_cast<std::size_t>(std::ceil(w / cell)) + 2;
    ny_ = static_cast<std::size_t>(std::ceil(h / cell)) + 2;
    cells_.assign(nx_ * ny_, {});
  }

  bool empty() const { return cells_.empty(); }

  void insert_segment(std::uint32_t id, Point a, Point b) {
    if (empty()) return;
    const auto [i0, i1] = col_range(std::min(a.x, b.x) - kPad, std::max(a.x, b.x) + kPad);
    const auto [j0, j1] = row_range(std::min(a.y, b.y) - kPad, std::max(a.y, b.y) + kPad);
    for (std::size_t j = j0; j <= j1; ++j)
      for (std::size_t i = i0; i <= i1; ++i) cells_[j * nx_ + i].push_back(id);
  }

  void insert_point(std::uint32_t id, Point p) { insert_segment(id, p, p); }

  /// Ids of items whose cells touch the padded segment (a, b); sorted, unique.
  void query(Point a, Point b, std::vector<std::uint32_t>& out) const {
    out.clear();
    if (empty()) return;
    const double ylo_seg = std::min(a.y, b.y) - kPad;
    const double yhi_seg = std::max(a.y, b.y) + kPad;
    if (yhi_seg < origin_.y || ylo_seg > origin_.y + cell_ * static_cast<double>(ny_)) return;
    const auto [j0, j1] = row_range(ylo_seg, yhi_seg);
    const double dy = b.y - a.y;
    const double dx = b.x - a.x;
    for (std::size_t j = j0; j <= j1; ++j) {
      const double ylo = std::max(origin_.y + cell_ * static_cast<double>(j) - kPad, ylo_seg);
      const double yhi = std::min(origin_.y + cell_ * static_cast<double>(j + 1) + kPad, yhi_seg);
      double xlo, xhi;
      if (std::abs(dy) < 1e-12) {
        xlo = std::min(a.x, b.x);
        xhi = std::max(a.x, b.x);
      } else {
        double t0 = (ylo - a.y) / dy;
        double t1 = (yhi - a.y) / dy;
        if (t0 > t1) std::swap(t0, t1);
        t0 = std::clamp(t0, 0.0, 1.0);
        t1 = std::clamp(t1, 0.0, 1.0);
        const double x0 = a.x + t0 * dx;
        const double x1 = a.x + t1 * dx;
        xlo = std::min(x0, x1);
        xhi = std::max(x0, x1);
      }
      const auto [i0, i1] = col_range(xlo - kPad, xhi + kPad);
      for (std::size_t i = i0; i <= i1; ++i) {
        const auto& c = cells_[j * nx_ + i];
        out.insert(out.end(), c.begin(), c.end());
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }

 private:
  static constexpr double kPad = 1e-7;

  std::pair<std::size_t, std::size_t> col_range(double lo, double hi) const {
    return {clamp_index((lo - origin_.x) / cell_, nx_), clamp_index((hi - origin_.x) / cell_, nx_)};
  }
  std::pair<std::size_t, std::size_t> row_range(double lo, double hi) const {
    return {clamp_index((lo - origin_.y) / cell_, ny_), clamp_index((hi - origin_.y) / cell_, ny_)};
  }
  static std::size_t clamp_index(double v, std::size_t n) {
    if (!(v > 0.0)) return 0;
    const double f = std::floor(v);
    if (f >= static_cast<double>(n - 1)) return n - 1;
    return static_cast<std::size_t>(f);
  }

  Point origin_;
  double cell_ = 1.0;
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<std::vector<std::uint32_t>> cells_;
};

/// Immutable floorplan: walls, derived corners and radio constants.
///
/// Construction validates every wall, merges endpoints closer than kGeomEps
/// into shared corners and splits walls at any corner lying inside them, so
/// that every wall runs between two corners with no corner in its interior.
class Floorplan {
 public:
  Floorplan() : Floorplan("", {}, {}) {}

  Floorplan(std::string name, std::vector<Wall> walls, RadioConstants constants)
      : name_(std::move(name)), constants_(constants) {
    if (!(constants_.freespace_exponent > 0.0) || !std::isfinite(constants_.freespace_exponent))
      throw ValidationError("freespace_exponent must be positive");
    if (!(constants_.reference_distance_m > 0.0) || !std::isfinite(constants_.reference_distance_m))
      throw ValidationError("reference_distance_m must be positive");
    if (!std::isfinite(constants_.reference_loss_db))
      throw ValidationError("reference_loss_db must be finite");
    for (std::size_t i = 0; i < walls.size(); ++i) validate_wall(walls[i], i);
    build(std::move(walls));
  }

  const std::string& name() const { return name_; }
  const std::vector<Wall>& walls() const { return walls_; }
  const std::vector<Corner>& corners() const { return corners_; }
  const RadioConstants& constants() const { return constants_; }
  double alpha() const { return constants_.alpha(); }
  /// Corner indices of wall i's endpoints (a, b).
  std::pair<std::uint32_t, std::uint32_t> wall_corners(std::size_t i) const { return wall_corners_[i]; }
  std::pair<Point, Point> bounding_box() const { return bbox_; }

  /// True when some wall joins corners u and v.
  bool share_wall(std::uint32_t u, std::uint32_t v) const {
    return wall_pairs_.count(pair_key(u, v)) != 0;
  }

  /// Total penetration loss of the walls properly crossed by the open segment
  /// (a, b). Touching a wall endpoint or running along a wall is free; the
  /// loss of passing a corner is charged by the corner model instead.
  double segment_penetration(Point a, Point b, std::vector<std::uint32_t>* crossed = nullptr) const {
    if (distance(a, b) <= 0.0) throw std::invalid_argument("segment_penetration: a == b");
    thread_local std::vector<std::uint32_t> cand;
    wall_grid_.query(a, b, cand);
    double total = 0.0;
    if (crossed) crossed->clear();
    for (std::uint32_t w : cand) {
      const Wall& wall = walls_[w];
      if (properly_crosses(a, b, wall.a, wall.b)) {
        total += wall.penetration_db;
        if (crossed) crossed->push_back(w);
      }
    }
    return total;
  }

  /// True when a corner lies strictly inside the open segment (a, b).
  bool corner_inside(Point a, Point b) const {
    thread_local std::vector<std::uint32_t> cand;
    corner_grid_.query(a, b, cand);
    for (std::uint32_t c : cand)
      if (strictly_inside_segment(corners_[c].position, a, b)) return true;
    return false;
  }

  std::optional<std::uint32_t> corner_near(Point p, double eps = kGeomEps) const {
    thread_local std::vector<std::uint32_t> cand;
    corner_grid_.query(p, p, cand);
    for (std::uint32_t c : cand)
      if (distance(corners_[c].position, p) <= eps) return c;
    return std::nullopt;
  }

  /// Moves a point lying within kGeomEps of a wall by 10*kGeomEps along that
  /// wall's left normal. Other points are returned unchanged.
  Point nudge_off_walls(Point p) const {
    thread_local std::vector<std::uint32_t> cand;
    for (int round = 0; round < 4; ++round) {
      wall_grid_.query(p, p, cand);
      bool moved = false;
      for (std::uint32_t w : cand) {
        const Wall& wall = walls_[w];
        if (point_segment_distance(p, wall.a, wall.b) <= kGeomEps) {
          p = p + 10.0 * kGeomEps * perp(unit(wall.b - wall.a));
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    return p;
  }

 private:
  static std::uint64_t pair_key(std::uint32_t u, std::uint32_t v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | v;
  }

  static void validate_wall(const Wall& w, std::size_t i) {
    const std::string at = "walls[" + std::to_string(i) + "]";
    if (!is_finite(w.a) || !is_finite(w.b)) throw ValidationError(at + ": non-finite coordinate");
    if (!std::isfinite(w.penetration_db) || w.penetration_db < 0.0)
      throw ValidationError(at + ".penetration_db: must be >= 0");
    if (!std::isfinite(w.diffraction_db_per_90) || w.diffraction_db_per_90 < 0.0)
      throw ValidationError(at + ".diffraction_db_per_90deg: must be >= 0");
    if (distance(w.a, w.b) < kGeomEps) throw ValidationError(at + ": zero-length wall");
  }

  void build(std::vector<Wall> raw) {
    // Corner dedup: sweep endpoints in x order, merge within kGeomEps.
    std::vector<Point> ends;
    ends.reserve(raw.size() * 2);
    for (const Wall& w : raw) {
      ends.push_back(w.a);
      ends.push_back(w.b);
    }
    std::vector<std::uint32_t> order(ends.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t l, std::uint32_t r) {
      if (ends[l].x != ends[r].x) return ends[l].x < ends[r].x;
      if (ends[l].y != ends[r].y) return ends[l].y < ends[r].y;
      return l < r;
    });
    std::vector<std::uint32_t> end_corner(ends.size());
    std::vector<Point> positions;
    std::vector<std::uint32_t> first_end;  // representative endpoint per corner
    std::size_t window_start = 0;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
      const Point p = ends[order[oi]];
      while (window_start < oi && ends[order[window_start]].x < p.x - kGeomEps) ++window_start;
      std::optional<std::uint32_t> found;
      for (std::size_t k = window_start; k < oi; ++k) {
        const std::uint32_t c = end_corner[order[k]];
        if (distance(positions[c], p) <= kGeomEps) {
          found = c;
          break;
        }
      }
      if (found) {
        end_corner[order[oi]] = *found;
      } else {
        end_corner[order[oi]] = static_cast<std::uint32_t>(positions.size());
        positions.push_back(p);
        first_end.push_back(order[oi]);
      }
    }
    // Renumber corners by first appearance in the wall list for stable output.
    std::vector<std::uint32_t> renum(positions.size(), UINT32_MAX);
    std::vector<Point> ordered;
    ordered.reserve(positions.size());
    for (std::size_t e = 0; e < ends.size(); ++e) {
      const std::uint32_t c = end_corner[e];
      if (renum[c] == UINT32_MAX) {
        renum[c] = static_cast<std::uint32_t>(ordered.size());
        ordered.push_back(positions[c]);
      }
    }
    for (auto& c : end_corner) c = renum[c];

    bbox_ = {{0.0, 0.0}, {0.0, 0.0}};
    if (!ordered.empty()) {
      bbox_ = {ordered[0], ordered[0]};
      for (Point p : ordered) {
        bbox_.first = {std::min(bbox_.first.x, p.x), std::min(bbox_.first.y, p.y)};
        bbox_.second = {std::max(bbox_.second.x, p.x), std::max(bbox_.second.y, p.y)};
      }
    }
    corner_grid_ = ordered.empty() ? SegmentGrid{} : SegmentGrid(bbox_.first, bbox_.second, ordered.size());
    for (std::uint32_t c = 0; c < ordered.size(); ++c) corner_grid_.insert_point(c, ordered[c]);

    // Split walls at interior corners (T-junctions).
    std::vector<std::uint32_t> cand;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const std::uint32_t ca = end_corner[2 * i];
      const std::uint32_t cb = end_corner[2 * i + 1];
      const Point a = ordered[ca];
      const Point b = ordered[cb];
      corner_grid_.query(a, b, cand);
      std::vector<std::pair<double, std::uint32_t>> cuts;
      for (std::uint32_t c : cand) {
        if (c == ca || c == cb) continue;
        if (strictly_inside_segment(ordered[c], a, b)) cuts.emplace_back(dot(ordered[c] - a, b - a), c);
      }
      std::sort(cuts.begin(), cuts.end());
      std::uint32_t prev = ca;
      cuts.emplace_back(0.0, cb);
      for (const auto& cut : cuts) {
        Wall piece = raw[i];
        piece.a = ordered[prev];
        piece.b = ordered[cut.second];
        walls_.push_back(piece);
        wall_corners_.emplace_back(prev, cut.second);
        prev = cut.second;
      }
    }

    corners_.assign(ordered.size(), {});
    for (std::uint32_t c = 0; c < ordered.size(); ++c) corners_[c].position = ordered[c];
    std::vector<std::vector<std::pair<double, std::uint32_t>>> spokes(ordered.size());
    for (std::uint32_t w = 0; w < walls_.size(); ++w) {
      const auto [ca, cb] = wall_corners_[w];
      spokes[ca].emplace_back(angle_of(ordered[cb] - ordered[ca]), w);
      spokes[cb].emplace_back(angle_of(ordered[ca] - ordered[cb]), w);
      wall_pairs_.insert(pair_key(ca, cb));
    }
    for (std::uint32_t c = 0; c < ordered.size(); ++c) {
      auto& sp = spokes[c];
      std::sort(sp.begin(), sp.end());
      Corner& corner = corners_[c];
      double max_k90 = 0.0;
      for (const auto& [ang, w] : sp) {
        max_k90 = std::max(max_k90, walls_[w].diffraction_db_per_90);
        if (!corner.incident_walls.empty() && corner.incident_walls.back().angle == ang) {
          corner.incident_walls.back().penetration_db += walls_[w].penetration_db;
          corner.incident_walls.back().walls.push_back(w);
        } else {
          corner.incident_walls.push_back({ang, walls_[w].penetration_db, {w}});
        }
      }
      corner.diffraction_db_per_rad = max_k90 / (kPi / 2.0);
      corner.penetration_prefix.assign(corner.incident_walls.size() + 1, 0.0);
      for (std::size_t k = 0; k < corner.incident_walls.size(); ++k)
        corner.penetration_prefix[k + 1] = corner.penetration_prefix[k] + corner.incident_walls[k].penetration_db;
    }

    wall_grid_ = walls_.empty() ? SegmentGrid{} : SegmentGrid(bbox_.first, bbox_.second, walls_.size());
    for (std::uint32_t w = 0; w < walls_.size(); ++w) wall_grid_.insert_segment(w, walls_[w].a, walls_[w].b);
  }

  std::string name_;
  RadioConstants constants_;
  std::vector<Wall> walls_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> wall_corners_;
  std::vector<Corner> corners_;
  std::unordered_set<std::uint64_t> wall_pairs_;
  std::pair<Point, Point> bbox_;
  SegmentGrid wall_grid_;
  SegmentGrid corner_grid_;
};

// ---------------------------------------------------------------------------
// JSON document format

namespace detail {

inline std::string position_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline double number_field(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError(path + "." + key + ": expected a number");
  return v.get<double>();
}

inline Point point_field(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw ParseError(path + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ParseError(path + "." + key + ": expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace detail

/// Parses a floorplan document. Unknown fields are rejected.
inline Floorplan parse_floorplan(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("floorplan: " + detail::position_of(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("floorplan: top level must be an object");
  static const std::vector<std::string> top_keys = {"name", "freespace_exponent", "reference_loss_db",
                                                    "reference_distance_m", "walls"};
  static const std::vector<std::string> wall_keys = {"a", "b", "penetration_db", "diffraction_db_per_90deg"};
  for (const auto& item : doc.items())
    if (std::find(top_keys.begin(), top_keys.end(), item.key()) == top_keys.end())
      throw ParseError("floorplan: unknown field '" + item.key() + "'");

  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ParseError("name: expected a string");
    name = doc["name"].get<std::string>();
  }
  RadioConstants rc;
  if (doc.contains("freespace_exponent")) rc.freespace_exponent = detail::number_field(doc, "freespace_exponent", "");
  if (doc.contains("reference_loss_db")) rc.reference_loss_db = detail::number_field(doc, "reference_loss_db", "");
  if (doc.contains("reference_distance_m"))
    rc.reference_distance_m = detail::number_field(doc, "reference_distance_m", "");
  if (!doc.contains("walls")) throw ParseError("floorplan: missing field 'walls'");
  if (!doc["walls"].is_array()) throw ParseError("walls: expected an array");

  std::vector<Wall> walls;
  std::size_t i = 0;
  for (const auto& w : doc["walls"]) {
    const std::string path = "walls[" + std::to_string(i++) + "]";
    if (!w.is_object()) throw ParseError(path + ": expected an object");
    for (const auto& item : w.items())
      if (std::find(wall_keys.begin(), wall_keys.end(), item.key()) == wall_keys.end())
        throw ParseError(path + ": unknown field '" + item.key() + "'");
    for (const auto& k : wall_keys)
      if (!w.contains(k)) throw ParseError(path + ": missing field '" + k + "'");
    Wall wall;
    wall.a = detail::point_field(w, "a", path);
    wall.b = detail::point_field(w, "b", path);
    wall.penetration_db = detail::number_field(w, "penetration_db", path);
    wall.diffraction_db_per_90 = detail::number_field(w, "diffraction_db_per_90deg", path);
    walls.push_back(wall);
  }
  return Floorplan(std::move(name), std::move(walls), rc);
}

inline std::string to_json(const Floorplan& plan) {
  nlohmann::ordered_json doc;
  doc["name"] = plan.name();
  doc["freespace_exponent"] = plan.constants().freespace_exponent;
  doc["reference_loss_db"] = plan.constants().reference_loss_db;
  doc["reference_distance_m"] = plan.constants().reference_distance_m;
  auto walls = nlohmann::ordered_json::array();
  for (const Wall& w : plan.walls()) {
    nlohmann::ordered_json j;
    j["a"] = {w.a.x, w.a.y};
    j["b"] = {w.b.x, w.b.y};
    j["penetration_db"] = w.penetration_db;
    j["diffraction_db_per_90deg"] = w.diffraction_db_per_90;
    walls.push_back(std::move(j));
  }
  doc["walls"] = std::move(walls);
  return doc.dump(1) + "\n";
}

inline Floorplan load_floorplan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open floorplan file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_floorplan(ss.str());
}

}  // namespace idp
