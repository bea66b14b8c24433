#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "lipfree/free_element.hpp"
#include "lipfree/metric_space.hpp"
#include "lipfree/norm.hpp"
#include "lipfree/simplex.hpp"

namespace lipfree {

struct PairNormReport {
  Rat value;            // = ||m_xy + m_uv||, in [0,2]
  Rat epsilon_star;     // the equality-case epsilon: value = 2 - epsilon_star
  bool attained_by_cap; // raw formula exceeded 2 and was capped
};

/// ||m_xy + m_uv|| in closed form:
///   min(2, (d(x,v) + d(u,y) + |d(x,y) - d(u,v)|) / max(d(x,y), d(u,v))).
/// The cap is forced by||a + b|| <= 2 for unit vectors; below 2 the formula
/// is exact. The test suite pins this against the flow solver wholesale.
inline PairNormReport pair_sum_norm(const FiniteMetricSpace& space, int x, int y,
                                    int u, int v) {
  detail::require_distinct(space, x, y, "pair_sum_norm");
  detail::require_distinct(space, u, v, "pair_sum_norm");
  Rat spread = space.dist(x, y) - space.dist(u, v);
  if (spread < 0) spread = -spread;
  Rat raw = (space.dist(x, v) + space.dist(u, y) + spread) /
            std::max(space.dist(x, y), space.dist(u, v));
  PairNormReport report;
  report.attained_by_cap = raw > 2;
  report.value = report.attained_by_cap ? Rat(2) : raw;
  report.epsilon_star = Rat(2) - report.value;
  return report;
}

/// ||m_xy - m_uv||, via m_uv = -m_vu.
inline Rat pair_distance(const FiniteMetricSpace& space, int x, int y, int u, int v) {
  return pair_sum_norm(space, x, y, v, u).value;
}

struct CycleReport {
  Rat lhs;    // sum d(x_{k_j}, y_{k_{j+1}})
  Rat rhs;    // sum d(x_{k_j}, y_{k_j})
  Rat slack;  // lhs - rhs; >= 0 whenever the combination has norm 1
};

namespace detail {
inline void require_cycle(const std::vector<MoleculeTerm>& terms,
                          const std::vector<std::size_t>& cycle) {
  if (terms.empty()) throw std::invalid_argument("cycle: presentation is empty");
  if (cycle.size() < 2 || cycle.front() != cycle.back())
    throw std::invalid_argument("cycle: index list must close (k_1 = k_{m+1})");
  for (std::size_t k : cycle)
    if (k >= terms.size()) throw std::invalid_argument("cycle: index out of range");
}
}  // namespace detail

/// Evaluates the cycle inequality for a presentation and a closed index list
/// k_1 .. k_{m+1} with k_1 = k_{m+1} (0-based indices into the terms).
inline CycleReport cycle_inequality(const FiniteMetricSpace& space,
                                    const std::vector<MoleculeTerm>& terms,
                                    const std::vector<std::size_t>& cycle) {
  detail::require_cycle(terms, cycle);
  CycleReport rep{Rat(0), Rat(0), Rat(0)};
  for (std::size_t j = 0; j + 1 < cycle.size(); ++j) {
    const MoleculeTerm& cur = terms[cycle[j]];
    const MoleculeTerm& next = terms[cycle[j + 1]];
    rep.lhs += space.dist(cur.x, next.y);
    rep.rhs += space.dist(cur.x, cur.y);
  }
  rep.slack = rep.lhs - rep.rhs;
  return rep;
}

/// Rewrites a convex combination along a zero-slack cycle: each cycle term
/// sheds lambda_0 * d(x_i,y_i) of weight, and the cross molecules
/// m_{x_{k_j} y_{k_{j+1}}} pick it up. The expanded measure is unchanged and
/// the total weight is preserved. Cycle indices must be pairwise distinct
/// (apart from the closing repeat); repeated indices are rejected.
inline std::vector<MoleculeTerm> rerepresent(const FiniteMetricSpace& space,
                                             const std::vector<MoleculeTerm>& terms,
                                             const std::vector<std::size_t>& cycle) {
  CycleReport rep = cycle_inequality(space, terms, cycle);
  if (rep.slack != 0)
    throw std::invalid_argument("rerepresent: cycle slack must be exactly zero");
  std::set<std::size_t> seen(cycle.begin(), cycle.end() - 1);
  if (seen.size() + 1 != cycle.size())
    throw std::invalid_argument("rerepresent: cycle indices must be pairwise distinct");

  Rat lambda0;
  bool first = true;
  for (const MoleculeTerm& t : terms) {
    Rat ratio = t.weight / space.dist(t.x, t.y);
    if (first || ratio < lambda0) lambda0 = ratio;
    first = false;
  }

  // Merge by ordered pair so coinciding molecules collapse into one term.
  std::map<std::pair<int, int>, Rat> merged;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    Rat w = terms[i].weight;
    if (seen.count(i)) w -= lambda0 * space.dist(terms[i].x, terms[i].y);
    if (w > 0) merged[{terms[i].x, terms[i].y}] += w;
  }
  for (std::size_t j = 0; j + 1 < cycle.size(); ++j) {
    const MoleculeTerm& cur = terms[cycle[j]];
    const MoleculeTerm& next = terms[cycle[j + 1]];
    if (cur.x == next.y) continue;
    merged[{cur.x, next.y}] += lambda0 * space.dist(cur.x, next.y);
  }

  std::vector<MoleculeTerm> out;
  out.reserve(merged.size());
  for (const auto& [pair, w] : merged) out.push_back({pair.first, pair.second, w});
  std::sort(out.begin(), out.end(), [&](const MoleculeTerm& a, const MoleculeTerm& b) {
    if (a.x != b.x) return space.id_less(a.x, b.x);
    return space.id_less(a.y, b.y);
  });
  return out;
}

/// lambda_max(u,v) = max{lambda in [0,1] : ||mu - lambda m_uv|| <= 1 - lambda},
/// computed exactly as a joint LP over the transport plan and lambda. The
/// element is a member of M(mu) iff lambda_max > 0; at the optimum with
/// lambda_max < 1 the residual has norm exactly 1.
inline Rat membership_lambda_max(const FiniteMetricSpace& space, const FreeElement& el,
                                 int u, int v) {
  detail::require_distinct(space, u, v, "membership_lambda_max");
  std::vector<int> nodes = support(el);
  if (std::find(nodes.begin(), nodes.end(), u) == nodes.end()) nodes.push_back(u);
  if (std::find(nodes.begin(), nodes.end(), v) == nodes.end()) nodes.push_back(v);
  std::sort(nodes.begin(), nodes.end(),
            [&](int a, int b) { return space.id_less(a, b); });
  const std::size_t k = nodes.size();

  // Variables: gamma_{ab} over ordered pairs (k*(k-1)), then lambda, then two
  // slacks (cost row, lambda <= 1). Constraints: conservation per node, the
  // cost budget, the lambda bound.
  std::vector<std::pair<int, int>> arcs;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      if (a != b) arcs.emplace_back(static_cast<int>(a), static_cast<int>(b));
  const std::size_t nv = arcs.size();
  const std::size_t lambda_ix = nv;
  const std::size_t n_all = nv + 3;

  LpProblem lp;
  lp.c.assign(n_all, Rat(0));
  lp.c[lambda_ix] = 1;
  lp.A.assign(k + 2, std::vector<Rat>(n_all, Rat(0)));
  lp.b.assign(k + 2, Rat(0));
  const Rat& duv = space.dist(u, v);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t e = 0; e < nv; ++e) {
      if (arcs[e].first == static_cast<int>(a)) lp.A[a][e] += 1;
      if (arcs[e].second == static_cast<int>(a)) lp.A[a][e] -= 1;
    }
    if (nodes[a] == u) lp.A[a][lambda_ix] += Rat(1) / duv;
    if (nodes[a] == v) lp.A[a][lambda_ix] -= Rat(1) / duv;
    lp.b[a] = el.masses[nodes[a]];
  }
  for (std::size_t e = 0; e < nv; ++e)
    lp.A[k][e] = space.dist(nodes[arcs[e].first], nodes[arcs[e].second]);
  lp.A[k][lambda_ix] = 1;
  lp.A[k][nv + 1] = 1;
  lp.b[k] = 1;
  lp.A[k + 1][lambda_ix] = 1;
  lp.A[k + 1][nv + 2] = 1;
  lp.b[k + 1] = 1;

  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw std::logic_error("membership_lambda_max: LP must have an optimum");
  return sol.objective;
}

struct MuMember {
  int u;
  int v;
  Rat lambda;            // the maximal lambda, in (0,1]
  FreeElement residual;  // nu with mu = lambda m_uv + (1-lambda) nu, ||nu|| = 1
};

struct MuSet {
  std::vector<MuMember> members;                 // ordered pairs, sorted by id
  std::vector<std::pair<int, int>> candidates;   // the pairs that were tested
};

/// M(mu) over candidate pairs. Default candidates are the support points of
/// mu together with all presentation endpoints; all_pairs sweeps the whole
/// space. Membership is orientation-aware.
inline MuSet mu_set(const FiniteMetricSpace& space, const FreeElement& el,
                    bool all_pairs = false) {
  if (norm(space, el).value != 1)
    throw std::invalid_argument("mu_set: element must have norm exactly 1");
  std::vector<int> pts;
  if (all_pairs) {
    pts = space.points_by_id();
  } else {
    std::vector<int> sup = support(el);
    std::set<int> s(sup.begin(), sup.end());
    if (el.presentation)
      for (const MoleculeTerm& t : *el.presentation) {
        s.insert(t.x);
        s.insert(t.y);
      }
    pts.assign(s.begin(), s.end());
    std::sort(pts.begin(), pts.end(),
              [&](int a, int b) { return space.id_less(a, b); });
  }

  MuSet out;
  for (int u : pts)
    for (int v : pts) {
      if (u == v) continue;
      out.candidates.emplace_back(u, v);
      Rat lambda = membership_lambda_max(space, el, u, v);
      if (lambda > 0) {
        MuMember member{u, v, lambda, {}};
        if (lambda < 1) {
          member.residual =
              scale(Rat(1) / (Rat(1) - lambda),
                    subtract(el, scale(lambda, molecule(space, u, v))));
        } else {
          member.residual = molecule(space, u, v);  // mu = m_uv; any unit nu works
        }
        out.members.push_back(std::move(member));
      }
    }
  return out;
}

namespace detail {
inline const std::vector<MoleculeTerm>& presentation_of(const FreeElement& el,
                                                        const char* what) {
  if (!el.presentation || el.presentation->empty())
    throw std::invalid_argument(std::string(what) + ": element carries no presentation");
  return *el.presentation;
}

inline void require_convex_weights(const std::vector<MoleculeTerm>& terms,
                                   const char* what) {
  Rat sum = 0;
  for (const MoleculeTerm& t : terms) sum += t.weight;
  if (sum != 1)
    throw std::invalid_argument(std::string(what) +
                                ": presentation weights must sum to 1");
}
}  // namespace detail

/// A norm-one function f with f(mu) = 1 such that, over the presentation
/// index pairs (i,j) with x_i != y_j, f(m_{x_i y_j}) = 1 holds exactly when
/// m_{x_i y_j} is in M(mu). Starts from the dual potential g; for each
/// excluded pair whose g is tight, the equality-reachable index set B is
/// closed from the pair's second index, the points of B are lifted by half
/// the minimal strict gap, and the lift is McShane-extended; f averages the
/// per-pair functions.
inline LipschitzFunction support_function(const FiniteMetricSpace& space,
                                          const FreeElement& el) {
  const auto& terms = detail::presentation_of(el, "support_function");
  detail::require_convex_weights(terms, "support_function");
  NormCertificate cert = norm(space, el);
  if (cert.value != 1)
    throw std::invalid_argument("support_function: element must have norm exactly 1");
  const LipschitzFunction& g = cert.potential;
  const std::size_t n = terms.size();

  auto tight = [&](std::size_t i, std::size_t j) {
    // Equality relation i -> j; trivially true when the points coincide.
    return g.values[terms[i].x] - g.values[terms[j].y] ==
           space.dist(terms[i].x, terms[j].y);
  };

  std::vector<std::pair<std::size_t, std::size_t>> excluded;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (terms[i].x == terms[j].y) continue;
      if (membership_lambda_max(space, el, terms[i].x, terms[j].y) == 0)
        excluded.emplace_back(i, j);
    }
  if (excluded.empty()) return g;

  // Points of the presentation; the perturbation acts on them only.
  std::set<int> m0;
  for (const MoleculeTerm& t : terms) {
    m0.insert(t.x);
    m0.insert(t.y);
  }
  std::optional<Rat> min_gap;
  for (int p : m0)
    for (int q : m0) {
      if (p == q) continue;
      Rat gap = space.dist(p, q) - (g.values[p] - g.values[q]);
      if (gap > 0 && (!min_gap || gap < *min_gap)) min_gap = gap;
    }
  if (!min_gap)
    throw std::logic_error("support_function: no strict pair although A is nonempty");
  Rat delta = *min_gap / 2;

  std::vector<LipschitzFunction> hs;
  for (const auto& [k1, k2] : excluded) {
    if (!tight(k1, k2)) {
      hs.push_back(g);
      continue;
    }
    // B = closure of {k2} under the equality relation (chains are anchored
    // at the fixed first edge (k1,k2), which is tight in this branch).
    std::vector<char> in_b(n, 0);
    std::vector<std::size_t> queue{k2};
    in_b[k2] = 1;
    while (!queue.empty()) {
      std::size_t i = queue.back();
      queue.pop_back();
      for (std::size_t j = 0; j < n; ++j)
        if (!in_b[j] && tight(i, j)) {
          in_b[j] = 1;
          queue.push_back(j);
        }
    }
    if (in_b[k1])
      throw std::logic_error(
          "support_function: excluded pair is equality-reachable; membership "
          "and cycle structure disagree");
    std::set<int> c;
    for (std::size_t i = 0; i < n; ++i)
      if (in_b[i]) {
        c.insert(terms[i].x);
        c.insert(terms[i].y);
      }
    std::map<int, Rat> partial;
    for (int p : m0)
      partial.emplace(p, c.count(p) ? Rat(g.values[p] + delta) : g.values[p]);
    hs.push_back(mcshane_extend(space, partial, Rat(1)));
  }

  LipschitzFunction f = zero_function(space);
  for (const LipschitzFunction& h : hs)
    for (int p = 0; p < space.size(); ++p) f.values[p] += h.values[p];
  Rat count = static_cast<long>(hs.size());
  for (int p = 0; p < space.size(); ++p) f.values[p] /= count;
  Rat shift = f.values[space.base()];
  for (Rat& v : f.values) v -= shift;

  if (pairing(f, el) != 1)
    throw std::logic_error("support_function: constructed f does not attain 1");
  return f;
}

/// The kernel (d(x,y)/2) * (d(y,p) - d(x,p)) / (d(x,p) + d(y,p)); 1-Lipschitz,
/// equal to +d/2 at x and -d/2 at y.
inline Rat jrz_kernel(const FiniteMetricSpace& space, int x, int y, int p) {
  detail::require_distinct(space, x, y, "jrz_kernel");
  return space.dist(x, y) / 2 * (space.dist(y, p) - space.dist(x, p)) /
         (space.dist(x, p) + space.dist(y, p));
}

struct SupportingSlice {
  LipschitzFunction f;
  Rat delta;  // every alpha in (0, delta) satisfies the short-molecule bound
};

/// The slice function f_mu built from the support function g: per index i the
/// envelope h_i(p) = max_j (g(x_i)-g(y_j)) d(x_i,p)/(d(x_i,p)+d(y_j,p)), and
/// f_mu(p) = max_i (g(x_i) - h_i(p)), shifted at the base point. delta is the
/// supremum of valid thresholds: min over strict pairs of the gap ratio
/// 1 - (g(x_i)-g(y_j))/d(x_i,y_j), capped at 1.
inline SupportingSlice f_mu(const FiniteMetricSpace& space, const FreeElement& el) {
  const auto& terms = detail::presentation_of(el, "f_mu");
  detail::require_convex_weights(terms, "f_mu");
  LipschitzFunction g = support_function(space, el);
  const std::size_t n = terms.size();

  LipschitzFunction f;
  f.values.resize(space.size());
  for (int p = 0; p < space.size(); ++p) {
    std::optional<Rat> best;
    for (std::size_t i = 0; i < n; ++i) {
      std::optional<Rat> h;  // h_i(p)
      for (std::size_t j = 0; j < n; ++j) {
        if (terms[i].x == terms[j].y) continue;
        Rat denom = space.dist(terms[i].x, p) + space.dist(terms[j].y, p);
        Rat val = (g.values[terms[i].x] - g.values[terms[j].y]) *
                  space.dist(terms[i].x, p) / denom;
        if (!h || val > *h) h = val;
      }
      Rat candidate = g.values[terms[i].x] - *h;
      if (!best || candidate > *best) best = candidate;
    }
    f.values[p] = *best;
  }
  Rat shift = f.values[space.base()];
  for (Rat& v : f.values) v -= shift;

  std::optional<Rat> delta;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (terms[i].x == terms[j].y) continue;
      const Rat& d = space.dist(terms[i].x, terms[j].y);
      Rat diff = g.values[terms[i].x] - g.values[terms[j].y];
      if (diff < d) {
        Rat ratio = Rat(1) - diff / d;
        if (!delta || ratio < *delta) delta = ratio;
      }
    }
  SupportingSlice out;
  out.f = std::move(f);
  out.delta = delta ? std::min(*delta, Rat(1)) : Rat(1);

  if (pairing(out.f, el) != 1)
    throw std::logic_error("f_mu: constructed function does not attain 1");
  return out;
}

}  // namespace lipfree
