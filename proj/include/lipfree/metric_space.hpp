#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lipfree/rational.hpp"

namespace lipfree {

struct PointLabel {
  Rat x;
  Rat y;
};

/// A finite metric space with a designated base point. Immutable after
/// construction. The constructor only checks structure (square matrix,
/// unique ids, base in range); the metric axioms are the job of validate().
class FiniteMetricSpace {
 public:
  FiniteMetricSpace(std::vector<std::string> ids,
                    std::vector<std::optional<PointLabel>> labels,
                    std::vector<std::vector<Rat>> dist, int base,
                    std::map<std::string, std::string> meta = {})
      : ids_(std::move(ids)),
        labels_(std::move(labels)),
        dist_(std::move(dist)),
        base_(base),
        meta_(std::move(meta)) {
    const std::size_t n = ids_.size();
    if (n == 0) throw std::invalid_argument("space needs at least one point");
    if (labels_.size() != n) throw std::invalid_argument("labels size mismatch");
    if (dist_.size() != n) throw std::invalid_argument("distance matrix is not square");
    for (const auto& row : dist_)
      if (row.size() != n) throw std::invalid_argument("distance matrix is not square");
    if (base_ < 0 || static_cast<std::size_t>(base_) >= n)
      throw std::invalid_argument("base point out of range");
    for (std::size_t i = 0; i < n; ++i) {
      if (!index_.emplace(ids_[i], static_cast<int>(i)).second)
        throw std::invalid_argument("duplicate point id: " + ids_[i]);
    }
  }

  int size() const { return static_cast<int>(ids_.size()); }
  const std::string& id(int i) const { return ids_.at(i); }
  const std::optional<PointLabel>& label(int i) const { return labels_.at(i); }
  const Rat& dist(int i, int j) const { return dist_.at(i).at(j); }
  int base() const { return base_; }
  const std::map<std::string, std::string>& meta() const { return meta_; }

  std::optional<int> index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool id_less(int i, int j) const { return ids_.at(i) < ids_.at(j); }

  /// All point indices ordered by id; the canonical iteration order for
  /// deterministic set-valued results.
  std::vector<int> points_by_id() const {
    std::vector<int> order(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return ids_[a] < ids_[b]; });
    return order;
  }

  /// Smallest positive distance, or nullopt for a one-point space.
  std::optional<Rat> min_positive_distance() const {
    std::optional<Rat> best;
    for (int i = 0; i < size(); ++i)
      for (int j = i + 1; j < size(); ++j) {
        const Rat& d = dist(i, j);
        if (d > 0 && (!best || d < *best)) best = d;
      }
    return best;
  }

  Rat diameter() const {
    Rat best = 0;
    for (int i = 0; i < size(); ++i)
      for (int j = i + 1; j < size(); ++j) best = std::max(best, dist(i, j));
    return best;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<std::optional<PointLabel>> labels_;
  std::vector<std::vector<Rat>> dist_;
  int base_;
  std::map<std::string, std::string> meta_;
  std::map<std::string, int, std::less<>> index_;
};

struct SegmentQuery {
  int u;
  int v;
  Rat delta;  // >= 0
};

struct MetricViolation {
  enum class Kind {
    NonzeroDiagonal,
    NonpositiveOffDiagonal,
    Asymmetry,
    Triangle,
  };
  Kind kind;
  int p = -1;
  int q = -1;
  int r = -1;  // the via-point for triangle violations
  std::string message;
};

/// Checks the metric axioms; returns the first violation in index scan order,
/// or nullopt when all hold.
inline std::optional<MetricViolation> validate(const FiniteMetricSpace& space) {
  const int n = space.size();
  for (int p = 0; p < n; ++p) {
    if (space.dist(p, p) != 0)
      return MetricViolation{MetricViolation::Kind::NonzeroDiagonal, p, p, -1,
                             "dist(" + space.id(p) + "," + space.id(p) + ") != 0"};
  }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (p != q && space.dist(p, q) <= 0)
        return MetricViolation{MetricViolation::Kind::NonpositiveOffDiagonal, p, q, -1,
                               "dist(" + space.id(p) + "," + space.id(q) +
                                   ") is not positive"};
    }
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      if (space.dist(p, q) != space.dist(q, p))
        return MetricViolation{MetricViolation::Kind::Asymmetry, p, q, -1,
                               "dist(" + space.id(p) + "," + space.id(q) +
                                   ") != dist(" + space.id(q) + "," + space.id(p) + ")"};
    }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) {
        if (space.dist(p, q) > space.dist(p, r) + space.dist(r, q))
          return MetricViolation{MetricViolation::Kind::Triangle, p, q, r,
                                 "dist(" + space.id(p) + "," + space.id(q) +
                                     ") > dist(" + space.id(p) + "," + space.id(r) +
                                     ") + dist(" + space.id(r) + "," + space.id(q) + ")"};
      }
  return std::nullopt;
}

namespace detail {
inline void require_distinct(const FiniteMetricSpace& space, int u, int v,
                             const char* what) {
  if (u < 0 || v < 0 || u >= space.size() || v >= space.size())
    throw std::invalid_argument(std::string(what) + ": point index out of range");
  if (u == v)
    throw std::invalid_argument(std::string(what) + ": endpoints must be distinct");
}
}  // namespace detail

/// The metric segment [u,v] = {p : d(u,p) + d(v,p) = d(u,v)}, sorted by id.
/// Always contains u and v.
inline std::vector<int> segment(const FiniteMetricSpace& space, int u, int v) {
  detail::require_distinct(space, u, v, "segment");
  std::vector<int> out;
  for (int p : space.points_by_id())
    if (space.dist(u, p) + space.dist(v, p) == space.dist(u, v)) out.push_back(p);
  return out;
}

/// The open relaxation {p : d(u,p) + d(v,p) < d(u,v) + delta}; strict
/// inequality, monotone in delta, equal to segment() below the positive gap.
inline std::vector<int> delta_segment(const FiniteMetricSpace& space, int u, int v,
                                      const Rat& delta) {
  detail::require_distinct(space, u, v, "delta_segment");
  if (delta < 0) throw std::invalid_argument("delta_segment: delta must be >= 0");
  std::vector<int> out;
  for (int p : space.points_by_id())
    if (space.dist(u, p) + space.dist(v, p) < space.dist(u, v) + delta)
      out.push_back(p);
  return out;
}

inline std::vector<int> delta_segment(const FiniteMetricSpace& space,
                                      const SegmentQuery& q) {
  return delta_segment(space, q.u, q.v, q.delta);
}

/// Minimal positive excess d(u,p)+d(v,p)-d(u,v) over points outside [u,v];
/// delta_segment(u,v,delta) == segment(u,v) for every 0 < delta <= gap.
/// nullopt when every point lies on the segment.
inline std::optional<Rat> segment_gap(const FiniteMetricSpace& space, int u, int v) {
  detail::require_distinct(space, u, v, "segment_gap");
  std::optional<Rat> best;
  for (int p = 0; p < space.size(); ++p) {
    Rat excess = space.dist(u, p) + space.dist(v, p) - space.dist(u, v);
    if (excess > 0 && (!best || excess < *best)) best = excess;
  }
  return best;
}

/// The delta' of the nested-segment lemma: for x in [u,v]_delta,
/// [u,x]_{delta'} and [v,x]_{delta'} both sit inside [u,v]_delta.
inline Rat subset_line_delta(const FiniteMetricSpace& space, int u, int v, int x,
                             const Rat& delta) {
  Rat gap = space.dist(u, v) + delta - space.dist(u, x) - space.dist(v, x);
  if (gap <= 0)
    throw std::invalid_argument("subset_line_delta: x is not in the delta-segment");
  return gap;
}

struct BallCover {
  Rat r_plus_s;          // normalized by d(u,v)
  Rat r;                 // normalized radius around u
  Rat s;                 // normalized radius around v
  std::vector<int> u_part;  // includes u; sorted by id
  std::vector<int> v_part;  // includes v; sorted by id
};

struct SplitResult {
  Rat cost;
  std::vector<char> to_u;  // one flag per input entry
};

/// Splits points between two centers given (distance-to-u, distance-to-v)
/// per point, minimizing max(u-part) + max(v-part); an empty part costs 0.
/// Sorting by the u-distance makes the optimum a prefix, so the sweep is 1D.
inline SplitResult min_radius_split(const std::vector<std::pair<Rat, Rat>>& duv) {
  const std::size_t k = duv.size();
  SplitResult result;
  result.to_u.assign(k, 0);
  if (k == 0) {
    result.cost = 0;
    return result;
  }
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return duv[a].first < duv[b].first;
  });
  // suffix_max_v[i] = max of v-distances over order[i..k-1]
  std::vector<Rat> suffix_max_v(k + 1, Rat(0));
  for (std::size_t i = k; i-- > 0;)
    suffix_max_v[i] = std::max(suffix_max_v[i + 1], duv[order[i]].second);
  std::size_t best_prefix = 0;
  Rat best_cost = suffix_max_v[0];
  Rat prefix_max_u = 0;
  for (std::size_t i = 1; i <= k; ++i) {
    prefix_max_u = std::max(prefix_max_u, duv[order[i - 1]].first);
    Rat cost = prefix_max_u + suffix_max_v[i];
    if (cost < best_cost) {
      best_cost = cost;
      best_prefix = i;
    }
  }
  result.cost = best_cost;
  for (std::size_t i = 0; i < best_prefix; ++i) result.to_u[order[i]] = 1;
  return result;
}

/// Minimal r+s (normalized by d(u,v)) such that the segment interior is
/// covered by B(u, r*d(u,v)) and B(v, s*d(u,v)), with an optimal partition.
/// Works on [u,v] itself: on a finite space the delta-segments stabilize to
/// the segment for small delta, so this is the strongest available cover.
inline BallCover min_enclosing_radii(const FiniteMetricSpace& space, int u, int v) {
  detail::require_distinct(space, u, v, "min_enclosing_radii");
  std::vector<int> seg = segment(space, u, v);
  std::vector<int> interior;
  for (int p : seg)
    if (p != u && p != v) interior.push_back(p);
  std::vector<std::pair<Rat, Rat>> duv;
  duv.reserve(interior.size());
  for (int p : interior) duv.emplace_back(space.dist(u, p), space.dist(v, p));
  SplitResult split = min_radius_split(duv);

  BallCover cover;
  cover.u_part.push_back(u);
  cover.v_part.push_back(v);
  Rat raw_r = 0, raw_s = 0;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (split.to_u[i]) {
      cover.u_part.push_back(interior[i]);
      raw_r = std::max(raw_r, duv[i].first);
    } else {
      cover.v_part.push_back(interior[i]);
      raw_s = std::max(raw_s, duv[i].second);
    }
  }
  const Rat& d = space.dist(u, v);
  cover.r = raw_r / d;
  cover.s = raw_s / d;
  cover.r_plus_s = cover.r + cover.s;
  auto by_id = [&](int a, int b) { return space.id_less(a, b); };
  std::sort(cover.u_part.begin(), cover.u_part.end(), by_id);
  std::sort(cover.v_part.begin(), cover.v_part.end(), by_id);
  return cover;
}

}  // namespace lipfree
