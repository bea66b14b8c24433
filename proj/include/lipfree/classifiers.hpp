#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lipfree/free_element.hpp"
#include "lipfree/metric_space.hpp"
#include "lipfree/molecule_calculus.hpp"
#include "lipfree/norm.hpp"

namespace lipfree {

/// S(f, alpha) = {mu in the unit ball : f(mu) > 1 - alpha} for a norm-one f.
struct Slice {
  LipschitzFunction f;
  Rat alpha;
  std::string id;
};

inline Slice make_slice(const FiniteMetricSpace& space, LipschitzFunction f,
                        const Rat& alpha, std::string id = {}) {
  if (alpha <= 0 || alpha >= 1)
    throw std::invalid_argument("slice: alpha must lie in (0,1)");
  if (lipschitz_constant(space, f) != 1)
    throw std::invalid_argument("slice: function must have Lipschitz constant 1");
  return Slice{std::move(f), alpha, std::move(id)};
}

inline bool slice_contains(const Slice& slice, const FreeElement& el) {
  return pairing(slice.f, el) > 1 - slice.alpha;
}

inline bool slice_contains_molecule(const FiniteMetricSpace& space, const Slice& slice,
                                    int u, int v) {
  return molecule_pairing(space, slice.f, u, v) > 1 - slice.alpha;
}

/// Finite-space denting test: m_uv is denting iff the segment is trivial.
/// (Delta-segments stabilize to [u,v] and balls shrink to points on a finite
/// space, so the slice criterion collapses to [u,v] = {u,v}.)
inline bool is_denting(const FiniteMetricSpace& space, int u, int v) {
  return segment(space, u, v).size() == 2;
}

/// All unordered denting pairs {u,v}, each reported as (min-id, max-id),
/// sorted. Both orientations of a pair are denting together.
inline std::vector<std::pair<int, int>> denting_set(const FiniteMetricSpace& space) {
  std::vector<int> order = space.points_by_id();
  std::vector<std::pair<int, int>> out;
  for (std::size_t a = 0; a < order.size(); ++a)
    for (std::size_t b = a + 1; b < order.size(); ++b)
      if (is_denting(space, order[a], order[b]))
        out.emplace_back(order[a], order[b]);
  return out;
}

struct PairDistance {
  int u;
  int v;
  Rat distance;
};

struct DaugavetVerdict {
  bool is_daugavet;  // over the non-excluded denting orientations
  std::optional<PairDistance> offending;          // first non-excluded failure
  std::vector<std::pair<int, int>> denting_pairs; // unordered
  std::vector<PairDistance> distances;            // every orientation
  std::vector<PairDistance> excluded_failures;    // failures among exclusions
};

/// Distance-to-every-denting-molecule test. `exclude` lists orientations to
/// ignore in the verdict (truncations of infinite examples make the tested
/// molecule itself denting; excluding it separates that artifact from real
/// failures). Distances use the pair-norm closed form when el is a single
/// molecule and the flow solver otherwise.
inline DaugavetVerdict is_daugavet(const FiniteMetricSpace& space, const FreeElement& el,
                                   const std::vector<std::pair<int, int>>& exclude = {}) {
  if (norm(space, el).value != 1)
    throw std::invalid_argument("is_daugavet: element must have norm exactly 1");
  const bool single_molecule =
      el.presentation && el.presentation->size() == 1 &&
      (*el.presentation)[0].weight == 1;
  std::set<std::pair<int, int>> excluded(exclude.begin(), exclude.end());

  DaugavetVerdict verdict;
  verdict.is_daugavet = true;
  verdict.denting_pairs = denting_set(space);
  for (const auto& [a, b] : verdict.denting_pairs) {
    for (auto [u, v] : {std::pair{a, b}, std::pair{b, a}}) {
      Rat dist;
      if (single_molecule) {
        const MoleculeTerm& t = (*el.presentation)[0];
        dist = pair_distance(space, t.x, t.y, u, v);
      } else {
        dist = norm(space, subtract(el, molecule(space, u, v))).value;
      }
      verdict.distances.push_back({u, v, dist});
      if (dist != 2) {
        if (excluded.count({u, v})) {
          verdict.excluded_failures.push_back({u, v, dist});
        } else {
          if (verdict.is_daugavet) verdict.offending = PairDistance{u, v, dist};
          verdict.is_daugavet = false;
        }
      }
    }
  }
  return verdict;
}

struct RadiiViolation {
  int u;
  int v;
  Rat r_plus_s;
  Rat bound;     // 2 - 2(r+s)
  Rat distance;  // ||el - m_uv||
};

struct ConditionIiiReport {
  std::vector<RadiiViolation> violations;
  std::size_t pairs_checked = 0;
};

/// For every ordered pair, the strongest finite-space instance of the
/// segment-cover condition: distance must be >= 2 - 2(r+s)_min. Violations
/// exist exactly when the element fails the Daugavet test.
inline ConditionIiiReport condition_iii_check(const FiniteMetricSpace& space,
                                              const FreeElement& el) {
  if (norm(space, el).value != 1)
    throw std::invalid_argument("condition_iii_check: element must have norm 1");
  ConditionIiiReport report;
  std::vector<int> order = space.points_by_id();
  for (std::size_t a = 0; a < order.size(); ++a)
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      BallCover cover = min_enclosing_radii(space, order[a], order[b]);
      Rat bound = Rat(2) - 2 * cover.r_plus_s;
      for (auto [u, v] : {std::pair{order[a], order[b]}, std::pair{order[b], order[a]}}) {
        ++report.pairs_checked;
        if (bound <= 0) continue;  // vacuous
        Rat dist = norm(space, subtract(el, molecule(space, u, v))).value;
        if (dist < bound)
          report.violations.push_back({u, v, cover.r_plus_s, bound, dist});
      }
    }
  return report;
}

namespace detail {

struct EmptysetStep {
  int x;
  int y;
  Rat delta_next;
};

/// One shrink step: under seg_delta(u,v) within B(u,r) u B(v,s), produces
/// (x,y) with x in B(u,r), y in B(v,s), a nested delta'-segment around (x,y)
/// inside seg_delta(u,v), and seg_delta'(x,y) within B(x,eps) u B(y,eps).
/// Radii are found exactly, so the "just outside the shrunken ball" choice
/// is the argmax point itself.
inline EmptysetStep emptyset_step(const FiniteMetricSpace& space, int u, int v,
                                  const Rat& r, const Rat& s, Rat delta,
                                  const Rat& eps) {
  if (delta > eps / 2) delta = eps / 2;
  std::vector<int> seg = delta_segment(space, u, v, delta);

  Rat r_prime = 0;
  int x = u;
  for (int p : seg) {
    if (space.dist(v, p) <= s) continue;
    if (space.dist(u, p) > r_prime) {
      r_prime = space.dist(u, p);
      x = p;
    }
  }
  if (r_prime <= eps) x = u;

  Rat gamma = (space.dist(u, v) + delta - space.dist(u, x) - space.dist(x, v)) / 2;
  std::vector<int> seg2 = delta_segment(space, x, v, gamma);

  Rat s_prime = 0;
  int y = v;
  for (int p : seg2) {
    if (space.dist(u, p) <= r_prime) continue;
    if (space.dist(v, p) > s_prime) {
      s_prime = space.dist(v, p);
      y = p;
    }
  }
  if (s_prime <= eps) y = v;

  Rat gap2 = space.dist(x, v) + gamma - space.dist(x, y) - space.dist(y, v);
  Rat gap3 = space.dist(u, v) + delta - space.dist(u, x) - space.dist(v, y) -
             space.dist(x, y);
  return {x, y, std::min(gap2, gap3) / 2};
}

}  // namespace detail

struct DescentResult {
  int x;
  int y;
};

/// Iterated shrink steps until the segment trivializes: returns a denting
/// pair with x in B(u,r) and y in B(v,s). Requires r+s < d(u,v) and the
/// cover precondition seg_delta(u,v) within B(u,r) u B(v,s) (checked; the
/// offending point is named otherwise). Terminates because the shrink radii
/// fall below the minimal positive distance, after which every ball is a
/// single point.
inline DescentResult denting_descent(const FiniteMetricSpace& space, int u, int v,
                                     const Rat& r, const Rat& s, const Rat& delta) {
  detail::require_distinct(space, u, v, "denting_descent");
  if (r < 0 || s < 0) throw std::invalid_argument("denting_descent: radii must be >= 0");
  if (delta <= 0) throw std::invalid_argument("denting_descent: delta must be positive");
  if (r + s >= space.dist(u, v))
    throw std::invalid_argument("denting_descent: requires r + s < d(u,v)");
  for (int p : delta_segment(space, u, v, delta))
    if (space.dist(u, p) > r && space.dist(v, p) > s)
      throw std::invalid_argument(
          "denting_descent: precondition fails, delta-segment point " + space.id(p) +
          " is outside both balls");

  int x = u, y = v;
  Rat cur_r = r, cur_s = s, cur_delta = delta;
  Rat eps = (space.dist(u, v) - r - s) / 3;
  for (int guard = 0; guard < 10000; ++guard) {
    if (is_denting(space, x, y)) {
      if (space.dist(u, x) > r || space.dist(v, y) > s)
        throw std::logic_error("denting_descent: descent left the prescribed balls");
      return {x, y};
    }
    detail::EmptysetStep step =
        detail::emptyset_step(space, x, y, cur_r, cur_s, cur_delta, eps);
    x = step.x;
    y = step.y;
    cur_r = cur_s = eps;
    eps = std::min(Rat(step.delta_next / 7), Rat(space.dist(x, y) / 5));
    cur_delta = eps;
  }
  throw std::logic_error("denting_descent: did not terminate");
}

struct WitnessResult {
  bool found;
  int u;
  int v;
  Rat distance;  // ||el - m_uv|| at the returned pair
  Rat length;    // d(u,v)
  std::size_t starts_tried = 0;
};

/// Replays the slice-witness iteration: from each admissible start pair in
/// the slice (scanned in id order), either the current pair is 2-eps far
/// from el, or a delta-segment point outside both eps/4-shrunken balls
/// continues the descent with geometrically shrinking length. The first far
/// witness wins; if every start dead-ends, the terminal pair with the
/// largest distance is reported (found = false). Every returned pair lies in
/// the slice.
inline WitnessResult daugavet_witness_search(const FiniteMetricSpace& space,
                                             const FreeElement& el, const Slice& slice,
                                             const Rat& eps) {
  if (eps <= 0 || eps >= 2)
    throw std::invalid_argument("daugavet_witness_search: eps must lie in (0,2)");
  if (!slice_contains(slice, el))
    throw std::invalid_argument("daugavet_witness_search: slice does not contain el");
  std::optional<Rat> gamma = space.min_positive_distance();
  if (!gamma) throw std::invalid_argument("daugavet_witness_search: one-point space");

  const Rat threshold = Rat(2) - eps;
  const Rat one_minus_alpha = Rat(1) - slice.alpha;
  std::vector<int> order = space.points_by_id();

  auto distance_to = [&](int u, int v) {
    return norm(space, subtract(el, molecule(space, u, v))).value;
  };

  std::optional<WitnessResult> best_terminal;
  std::size_t starts = 0;

  for (int u0 : order)
    for (int v0 : order) {
      if (u0 == v0) continue;
      if (!slice_contains_molecule(space, slice, u0, v0)) continue;
      ++starts;

      const Rat d0 = space.dist(u0, v0);
      const Rat q0 = molecule_pairing(space, slice.f, u0, v0) / one_minus_alpha;
      // shrink factor with the tentative delta = eps/8
      const Rat c0 = Rat(1) - eps / 8;
      int n = 0;
      Rat reach = d0;
      while (reach >= *gamma) {
        reach *= c0;
        ++n;
      }
      // (1+delta)^n < q0 via (1+t)^n <= 1 + (2^n - 1) t for t <= 1
      Rat two_pow_n = 1;
      for (int i = 0; i < n; ++i) two_pow_n *= 2;
      Rat delta = std::min({Rat(eps / 8), Rat(1), Rat((q0 - 1) / two_pow_n)});
      Rat pow = 1;  // (1+delta)^{n-k}
      for (int i = 0; i < n; ++i) pow *= 1 + delta;

      int u = u0, v = v0;
      std::optional<WitnessResult> terminal;
      for (int k = 0; k <= n; ++k) {
        Rat dist = distance_to(u, v);
        if (dist >= threshold) {
          WitnessResult res{true, u, v, dist, space.dist(u, v), starts};
          return res;
        }
        if (k == n) {
          terminal = WitnessResult{false, u, v, dist, space.dist(u, v), starts};
          break;
        }
        const Rat duv = space.dist(u, v);
        const Rat ball = eps / 4 * duv;
        const Rat next_pow = pow / (1 + delta);
        int chosen_u = -1, chosen_v = -1;
        for (int p : delta_segment(space, u, v, delta * duv)) {
          if (space.dist(u, p) <= ball || space.dist(v, p) <= ball) continue;
          if (slice.f.values[u] - slice.f.values[p] >
              one_minus_alpha * next_pow * space.dist(u, p)) {
            chosen_u = u;
            chosen_v = p;
          } else {
            chosen_u = p;
            chosen_v = v;
          }
          break;  // first candidate in id order
        }
        if (chosen_u < 0) {
          terminal = WitnessResult{false, u, v, dist, duv, starts};
          break;
        }
        if (slice.f.values[chosen_u] - slice.f.values[chosen_v] <=
            one_minus_alpha * next_pow * space.dist(chosen_u, chosen_v))
          throw std::logic_error("daugavet_witness_search: dichotomy failed");
        u = chosen_u;
        v = chosen_v;
        pow = next_pow;
      }
      if (terminal &&
          (!best_terminal || terminal->distance > best_terminal->distance))
        best_terminal = terminal;
    }

  if (!best_terminal)
    throw std::invalid_argument("daugavet_witness_search: slice contains no molecule");
  best_terminal->starts_tried = starts;
  return *best_terminal;
}

struct ScanRow {
  std::string slice_id;
  Rat alpha;
  Rat min_length;
  int witness_u;
  int witness_v;
};

/// For each slice containing el, the exact minimum of d(u,v) over molecules
/// in the slice, with the lexicographically first minimizing pair. The decay
/// of this minimum across a discretization family is the Delta diagnostic; a
/// single finite space never certifies a Delta point by itself.
inline std::vector<ScanRow> delta_scan(const FiniteMetricSpace& space,
                                       const FreeElement& el,
                                       const std::vector<Slice>& slices) {
  std::vector<ScanRow> rows;
  std::vector<int> order = space.points_by_id();
  for (const Slice& slice : slices) {
    if (!slice_contains(slice, el))
      throw std::invalid_argument("delta_scan: slice " + slice.id +
                                  " does not contain the element");
    std::optional<ScanRow> best;
    for (int u : order)
      for (int v : order) {
        if (u == v) continue;
        if (!slice_contains_molecule(space, slice, u, v)) continue;
        if (!best || space.dist(u, v) < best->min_length) {
          best = ScanRow{slice.id, slice.alpha, space.dist(u, v), u, v};
        }
      }
    if (!best)
      throw std::logic_error("delta_scan: slice contains no molecule");
    rows.push_back(*best);
  }
  return rows;
}

struct SliceFamilyOptions {
  std::vector<Rat> alphas;
  std::uint64_t seed = 0;
  std::size_t random_count = 4;
};

/// Deterministic slice family around an element: the dual potential of its
/// norm certificate, the two supporting-function constructions when a
/// presentation is attached, and seeded random McShane envelopes from
/// two-point assignments, each normalized to Lipschitz constant 1 and kept
/// only when the slice contains el.
inline std::vector<Slice> make_slices(const FiniteMetricSpace& space,
                                      const FreeElement& el,
                                      const SliceFamilyOptions& options) {
  if (options.alphas.empty())
    throw std::invalid_argument("make_slices: need at least one alpha");
  NormCertificate cert = norm(space, el);
  if (cert.value != 1)
    throw std::invalid_argument("make_slices: element must have norm exactly 1");

  std::vector<std::pair<std::string, LipschitzFunction>> funcs;
  funcs.emplace_back("dual", cert.potential);
  if (el.presentation && !el.presentation->empty()) {
    Rat weight_sum = 0;
    for (const MoleculeTerm& t : *el.presentation) weight_sum += t.weight;
    if (weight_sum == 1) {
      funcs.emplace_back("fmu", f_mu(space, el).f);
      funcs.emplace_back("support", support_function(space, el));
    }
  }
  std::mt19937_64 rng(options.seed);
  const int size = space.size();
  for (std::size_t i = 0; i < options.random_count && size >= 2; ++i) {
    int p = static_cast<int>(rng() % size);
    int q = static_cast<int>(rng() % size);
    if (p == q) q = (q + 1) % size;
    std::map<int, Rat> partial{{p, space.dist(p, q)}, {q, Rat(0)}};
    LipschitzFunction f = mcshane_extend(space, partial, Rat(1));
    Rat lc = lipschitz_constant(space, f);
    for (Rat& val : f.values) val /= lc;
    funcs.emplace_back("random" + std::to_string(i), std::move(f));
  }

  std::vector<Slice> out;
  for (const auto& [name, f] : funcs) {
    if (lipschitz_constant(space, f) != 1) continue;
    for (const Rat& alpha : options.alphas) {
      if (alpha <= 0 || alpha >= 1)
        throw std::invalid_argument("make_slices: alpha must lie in (0,1)");
      Slice slice{f, alpha, name + "-" + rat_string(alpha)};
      if (slice_contains(slice, el)) out.push_back(std::move(slice));
    }
  }
  return out;
}

}  // namespace lipfree
