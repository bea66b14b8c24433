#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lipfree/metric_space.hpp"
#include "lipfree/rational.hpp"

namespace lipfree {

namespace detail {
inline std::string coord_id(const Rat& a, const Rat& b) {
  return rat_string(a) + "_" + rat_string(b);
}
}  // namespace detail

/// The two-corner ladder: levels S_0 = {x, y} and S_n = {(k/2^n, 1/2^n)},
/// n = 1..depth, under the metric
///   d((a1,b1),(a2,b2)) = |a1-a2|                          if b1 = b2,
///                        min(a1+a2, 2-a1-a2) + |b1-b2|    otherwise.
/// Point ids are "x", "y" and "a_b"; base is x. Cardinality 2^(depth+1)+depth.
inline FiniteMetricSpace gen_example32(int depth) {
  if (depth < 1) throw std::invalid_argument("gen_example32: depth must be >= 1");
  std::vector<std::string> ids;
  std::vector<std::optional<PointLabel>> labels;
  std::vector<std::pair<Rat, Rat>> coords;
  auto push = [&](const Rat& a, const Rat& b, const std::string& id) {
    ids.push_back(id);
    labels.push_back(PointLabel{a, b});
    coords.emplace_back(a, b);
  };
  push(Rat(0), Rat(0), "x");
  push(Rat(1), Rat(0), "y");
  for (int n = 1; n <= depth; ++n) {
    Rat scale = Rat(Int(1) << n);
    Rat level = Rat(1) / scale;
    for (int k = 0; k <= (1 << n); ++k) {
      Rat a = Rat(k) / scale;
      push(a, level, detail::coord_id(a, level));
    }
  }
  const std::size_t size = ids.size();
  std::vector<std::vector<Rat>> dist(size, std::vector<Rat>(size, Rat(0)));
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = i + 1; j < size; ++j) {
      const auto& [a1, b1] = coords[i];
      const auto& [a2, b2] = coords[j];
      Rat d;
      if (b1 == b2) {
        d = a1 > a2 ? a1 - a2 : a2 - a1;
      } else {
        Rat vertical = b1 > b2 ? b1 - b2 : b2 - b1;
        d = std::min(Rat(a1 + a2), Rat(Rat(2) - a1 - a2)) + vertical;
      }
      dist[i][j] = d;
      dist[j][i] = d;
    }
  return FiniteMetricSpace(std::move(ids), std::move(labels), std::move(dist), 0,
                           {{"kind", "example32"},
                            {"depth", std::to_string(depth)},
                            {"id", "example32-d" + std::to_string(depth)}});
}

/// Two vertical columns a in {0,1}, b in {0, h, ..., 1} with h = 1/2^k, under
/// the max metric. Corners carry the ids x1=(0,0), y1=(1,0), x2=(1,1),
/// y2=(0,1); base is x1.
inline FiniteMetricSpace gen_example46(int step_exponent) {
  if (step_exponent < 1)
    throw std::invalid_argument("gen_example46: step exponent must be >= 1");
  const int steps = 1 << step_exponent;
  std::vector<std::string> ids;
  std::vector<std::optional<PointLabel>> labels;
  std::vector<std::pair<Rat, Rat>> coords;
  auto corner_id = [](const Rat& a, const Rat& b) -> std::string {
    if (a == 0 && b == 0) return "x1";
    if (a == 1 && b == 0) return "y1";
    if (a == 1 && b == 1) return "x2";
    if (a == 0 && b == 1) return "y2";
    return {};
  };
  for (int col = 0; col <= 1; ++col)
    for (int i = 0; i <= steps; ++i) {
      Rat a = col;
      Rat b = Rat(i) / steps;
      std::string id = corner_id(a, b);
      if (id.empty()) id = detail::coord_id(a, b);
      ids.push_back(id);
      labels.push_back(PointLabel{a, b});
      coords.emplace_back(a, b);
    }
  const std::size_t size = ids.size();
  std::vector<std::vector<Rat>> dist(size, std::vector<Rat>(size, Rat(0)));
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = i + 1; j < size; ++j) {
      Rat da = coords[i].first - coords[j].first;
      if (da < 0) da = -da;
      Rat db = coords[i].second - coords[j].second;
      if (db < 0) db = -db;
      dist[i][j] = std::max(da, db);
      dist[j][i] = dist[i][j];
    }
  return FiniteMetricSpace(std::move(ids), std::move(labels), std::move(dist), 0,
                           {{"kind", "example46"},
                            {"step_exponent", std::to_string(step_exponent)},
                            {"id", "example46-k" + std::to_string(step_exponent)}});
}

enum class RandomScheme { ShortestPath, EuclideanSnap };

/// Seed-deterministic random spaces. ShortestPath closes random rational
/// edge weights under all-pairs shortest paths (rich segment structure);
/// EuclideanSnap takes distinct random grid points under the l1 metric
/// (mostly trivial segments). Ids are p0..p{n-1}; base is p0.
inline FiniteMetricSpace gen_random(int n, std::uint64_t seed,
                                    RandomScheme scheme = RandomScheme::ShortestPath) {
  if (n < 2) throw std::invalid_argument("gen_random: need at least 2 points");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Rat>> dist(n, std::vector<Rat>(n, Rat(0)));
  if (scheme == RandomScheme::ShortestPath) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Rat w(1 + static_cast<long>(rng() % 24), 1 + static_cast<long>(rng() % 8));
        dist[i][j] = w;
        dist[j][i] = w;
      }
    for (int via = 0; via < n; ++via)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Rat through = dist[i][via] + dist[via][j];
          if (i != j && through < dist[i][j]) {
            dist[i][j] = through;
            dist[j][i] = through;
          }
        }
  } else {
    std::vector<std::pair<Rat, Rat>> pts;
    while (static_cast<int>(pts.size()) < n) {
      Rat a(static_cast<long>(rng() % 33), 16);
      Rat b(static_cast<long>(rng() % 33), 16);
      bool fresh = true;
      for (const auto& p : pts)
        if (p.first == a && p.second == b) fresh = false;
      if (fresh) pts.emplace_back(a, b);
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Rat da = pts[i].first - pts[j].first;
        if (da < 0) da = -da;
        Rat db = pts[i].second - pts[j].second;
        if (db < 0) db = -db;
        dist[i][j] = da + db;
        dist[j][i] = dist[i][j];
      }
  }
  std::vector<std::string> ids;
  std::vector<std::optional<PointLabel>> labels(n, std::nullopt);
  for (int i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
  const char* scheme_name =
      scheme == RandomScheme::ShortestPath ? "shortest-path" : "euclidean-snap";
  return FiniteMetricSpace(std::move(ids), std::move(labels), std::move(dist), 0,
                           {{"kind", "random"},
                            {"n", std::to_string(n)},
                            {"seed", std::to_string(seed)},
                            {"scheme", scheme_name},
                            {"id", "random-n" + std::to_string(n) + "-s" +
                                       std::to_string(seed) + "-" + scheme_name}});
}

}  // namespace lipfree
