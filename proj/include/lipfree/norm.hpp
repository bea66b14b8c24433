#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lipfree/free_element.hpp"
#include "lipfree/metric_space.hpp"
#include "lipfree/simplex.hpp"

namespace lipfree {

struct FlowEdge {
  int from;
  int to;
  Rat amount;  // > 0
};

/// The free-space norm of an element together with both optimality
/// certificates: a transport plan whose cost is the value, and a 1-Lipschitz
/// potential pairing to the value (zero duality gap).
struct NormCertificate {
  Rat value;
  std::vector<FlowEdge> flow;
  LipschitzFunction potential;
};

namespace detail {

/// Potential from an optimal plan: shortest-path distances on the support
/// with every metric edge plus a reversed edge of weight -d(p,q) for each
/// flow edge. A negative cycle would certify that the plan is not optimal,
/// so this construction re-checks the solver on every call.
inline std::vector<Rat> potential_from_flow(const FiniteMetricSpace& space,
                                            const std::vector<int>& nodes,
                                            const std::vector<FlowEdge>& flow) {
  struct Arc {
    int from, to;
    Rat weight;
  };
  std::vector<Arc> arcs;
  for (int a : nodes)
    for (int b : nodes)
      if (a != b) arcs.push_back({a, b, space.dist(a, b)});
  for (const FlowEdge& e : flow) arcs.push_back({e.from, e.to, -space.dist(e.from, e.to)});

  std::vector<std::optional<Rat>> dist(space.size());
  dist[nodes.front()] = Rat(0);
  for (std::size_t round = 0; round + 1 < nodes.size(); ++round) {
    bool changed = false;
    for (const Arc& arc : arcs) {
      if (!dist[arc.from]) continue;
      Rat candidate = *dist[arc.from] + arc.weight;
      if (!dist[arc.to] || candidate < *dist[arc.to]) {
        dist[arc.to] = candidate;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (const Arc& arc : arcs) {
    if (!dist[arc.from]) continue;
    if (!dist[arc.to] || *dist[arc.from] + arc.weight < *dist[arc.to])
      throw std::logic_error("norm: transport plan failed the optimality check");
  }
  std::vector<Rat> values;
  values.reserve(nodes.size());
  for (int p : nodes) values.push_back(*dist[p]);
  return values;
}

}  // namespace detail

/// Exact free-space norm via the transportation LP on the support, with the
/// dual potential rebuilt from the plan and McShane-extended to the whole
/// space. Requires a valid metric (run validate() first on untrusted input).
inline NormCertificate norm(const FiniteMetricSpace& space, const FreeElement& el) {
  if (static_cast<int>(el.masses.size()) != space.size())
    throw std::invalid_argument("norm: element size does not match the space");
  if (total_mass(el) != 0)
    throw std::invalid_argument("norm: element total mass is not zero");

  NormCertificate cert;
  std::vector<int> sources, sinks;
  for (int p : space.points_by_id()) {
    if (el.masses[p] > 0) sources.push_back(p);
    if (el.masses[p] < 0) sinks.push_back(p);
  }
  if (sources.empty()) {
    cert.value = 0;
    cert.potential = zero_function(space);
    return cert;
  }

  // minimize sum gamma_{pq} d(p,q), marginals fixed; one variable per
  // source-sink pair (triangle inequality keeps the optimum on the support).
  const std::size_t ns = sources.size(), nt = sinks.size();
  LpProblem lp;
  lp.c.assign(ns * nt, Rat(0));
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nt; ++j)
      lp.c[i * nt + j] = -space.dist(sources[i], sinks[j]);
  lp.A.assign(ns + nt, std::vector<Rat>(ns * nt, Rat(0)));
  lp.b.assign(ns + nt, Rat(0));
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < nt; ++j) lp.A[i][i * nt + j] = 1;
    lp.b[i] = el.masses[sources[i]];
  }
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t i = 0; i < ns; ++i) lp.A[ns + j][i * nt + j] = 1;
    lp.b[ns + j] = -el.masses[sinks[j]];
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw std::logic_error("norm: transportation problem must have an optimum");
  cert.value = -sol.objective;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nt; ++j) {
      const Rat& amount = sol.x[i * nt + j];
      if (amount > 0) cert.flow.push_back({sources[i], sinks[j], amount});
    }

  std::vector<int> nodes = sources;
  nodes.insert(nodes.end(), sinks.begin(), sinks.end());
  std::sort(nodes.begin(), nodes.end(),
            [&](int a, int b) { return space.id_less(a, b); });
  std::vector<Rat> on_support = detail::potential_from_flow(space, nodes, cert.flow);

  std::map<int, Rat> partial;
  for (std::size_t i = 0; i < nodes.size(); ++i) partial.emplace(nodes[i], on_support[i]);
  cert.potential = mcshane_extend(space, partial, Rat(1));

  if (pairing(cert.potential, el) != cert.value)
    throw std::logic_error("norm: duality gap detected");
  return cert;
}

inline bool is_unit_norm(const FiniteMetricSpace& space, const FreeElement& el) {
  return norm(space, el).value == 1;
}

}  // namespace lipfree
