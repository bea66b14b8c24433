#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lipfree/metric_space.hpp"
#include "lipfree/rational.hpp"

namespace lipfree {

/// One term of a molecule combination: weight * (delta_x - delta_y) / d(x,y).
struct MoleculeTerm {
  int x;
  int y;
  Rat weight;  // > 0
};

/// A finitely supported signed measure with total mass zero, indexed by the
/// points of one space. When constructed from molecules the combination is
/// kept: several operations depend on the presentation, not just the measure.
struct FreeElement {
  std::vector<Rat> masses;
  std::optional<std::vector<MoleculeTerm>> presentation;
};

inline FreeElement zero_element(const FiniteMetricSpace& space) {
  FreeElement el;
  el.masses.assign(space.size(), Rat(0));
  el.presentation = std::vector<MoleculeTerm>{};
  return el;
}

inline Rat total_mass(const FreeElement& el) {
  Rat sum = 0;
  for (const Rat& m : el.masses) sum += m;
  return sum;
}

inline bool is_zero_element(const FreeElement& el) {
  for (const Rat& m : el.masses)
    if (m != 0) return false;
  return true;
}

/// m_xy = (delta_x - delta_y) / d(x,y).
inline FreeElement molecule(const FiniteMetricSpace& space, int x, int y) {
  if (x == y) throw std::invalid_argument("molecule requires distinct points");
  detail::require_distinct(space, x, y, "molecule");
  FreeElement el = zero_element(space);
  const Rat& d = space.dist(x, y);
  el.masses[x] = Rat(1) / d;
  el.masses[y] = Rat(-1) / d;
  el.presentation = std::vector<MoleculeTerm>{{x, y, Rat(1)}};
  return el;
}

/// Expands sum_i weight_i * m_{x_i y_i} and keeps the presentation. Weights
/// need not sum to 1; the empty list is the zero element.
inline FreeElement combine(const FiniteMetricSpace& space,
                           const std::vector<MoleculeTerm>& terms) {
  FreeElement el = zero_element(space);
  for (const MoleculeTerm& t : terms) {
    detail::require_distinct(space, t.x, t.y, "combine");
    if (t.weight <= 0) throw std::invalid_argument("combine: weights must be positive");
    const Rat& d = space.dist(t.x, t.y);
    el.masses[t.x] += t.weight / d;
    el.masses[t.y] -= t.weight / d;
  }
  el.presentation = terms;
  return el;
}

inline FreeElement add(const FreeElement& a, const FreeElement& b) {
  if (a.masses.size() != b.masses.size())
    throw std::invalid_argument("add: elements live on different spaces");
  FreeElement out;
  out.masses.resize(a.masses.size());
  for (std::size_t i = 0; i < a.masses.size(); ++i)
    out.masses[i] = a.masses[i] + b.masses[i];
  if (a.presentation && b.presentation) {
    auto terms = *a.presentation;
    terms.insert(terms.end(), b.presentation->begin(), b.presentation->end());
    out.presentation = std::move(terms);
  }
  return out;
}

/// Scaling keeps the presentation when possible: negative factors flip each
/// term's orientation (m_yx = -m_xy).
inline FreeElement scale(const Rat& c, const FreeElement& el) {
  FreeElement out;
  out.masses.resize(el.masses.size());
  for (std::size_t i = 0; i < el.masses.size(); ++i) out.masses[i] = c * el.masses[i];
  if (el.presentation) {
    std::vector<MoleculeTerm> terms;
    if (c > 0) {
      for (const MoleculeTerm& t : *el.presentation) terms.push_back({t.x, t.y, c * t.weight});
    } else if (c < 0) {
      for (const MoleculeTerm& t : *el.presentation) terms.push_back({t.y, t.x, -c * t.weight});
    }
    out.presentation = std::move(terms);
  }
  return out;
}

inline FreeElement subtract(const FreeElement& a, const FreeElement& b) {
  return add(a, scale(Rat(-1), b));
}

/// Checks the FreeElement invariants: zero total mass and, when a
/// presentation is attached, exact agreement of its expansion with masses.
inline void check_element(const FiniteMetricSpace& space, const FreeElement& el) {
  if (static_cast<int>(el.masses.size()) != space.size())
    throw std::invalid_argument("element size does not match the space");
  if (total_mass(el) != 0)
    throw std::invalid_argument("element total mass is not zero");
  if (el.presentation) {
    std::vector<Rat> expanded(space.size(), Rat(0));
    for (const MoleculeTerm& t : *el.presentation) {
      detail::require_distinct(space, t.x, t.y, "presentation");
      if (t.weight <= 0)
        throw std::invalid_argument("presentation weights must be positive");
      const Rat& d = space.dist(t.x, t.y);
      expanded[t.x] += t.weight / d;
      expanded[t.y] -= t.weight / d;
    }
    for (int i = 0; i < space.size(); ++i)
      if (expanded[i] != el.masses[i])
        throw std::invalid_argument("presentation does not expand to the stored masses");
  }
}

inline std::vector<int> support(const FreeElement& el) {
  std::vector<int> out;
  for (std::size_t i = 0; i < el.masses.size(); ++i)
    if (el.masses[i] != 0) out.push_back(static_cast<int>(i));
  return out;
}

/// The dual object: exact value per point, vanishing at the base point.
struct LipschitzFunction {
  std::vector<Rat> values;
};

inline LipschitzFunction zero_function(const FiniteMetricSpace& space) {
  return LipschitzFunction{std::vector<Rat>(space.size(), Rat(0))};
}

inline Rat pairing(const LipschitzFunction& f, const FreeElement& el) {
  if (f.values.size() != el.masses.size())
    throw std::invalid_argument("pairing: function and element size mismatch");
  Rat sum = 0;
  for (std::size_t i = 0; i < el.masses.size(); ++i)
    if (el.masses[i] != 0) sum += el.masses[i] * f.values[i];
  return sum;
}

/// (f(u) - f(v)) / d(u,v), the pairing against m_uv without building it.
inline Rat molecule_pairing(const FiniteMetricSpace& space, const LipschitzFunction& f,
                            int u, int v) {
  detail::require_distinct(space, u, v, "molecule_pairing");
  return (f.values.at(u) - f.values.at(v)) / space.dist(u, v);
}

inline Rat lipschitz_constant(const FiniteMetricSpace& space,
                              const LipschitzFunction& f) {
  if (static_cast<int>(f.values.size()) != space.size())
    throw std::invalid_argument("lipschitz_constant: size mismatch");
  Rat best = 0;
  for (int p = 0; p < space.size(); ++p)
    for (int q = p + 1; q < space.size(); ++q) {
      Rat diff = f.values[p] - f.values[q];
      if (diff < 0) diff = -diff;
      Rat ratio = diff / space.dist(p, q);
      if (ratio > best) best = ratio;
    }
  return best;
}

enum class ExtensionKind {
  MinEnvelope,  // f(p) = min_q partial(q) + L d(p,q); the largest extension
  MaxEnvelope,  // f(p) = max_q partial(q) - L d(p,q); the smallest extension
};

/// McShane-Whitney extension of a partial assignment, shifted to vanish at
/// the base point. Rejects assignments that are not L-Lipschitz on their
/// domain. Default is the min-envelope; MaxEnvelope selects the other bound.
inline LipschitzFunction mcshane_extend(const FiniteMetricSpace& space,
                                        const std::map<int, Rat>& partial, const Rat& L,
                                        ExtensionKind kind = ExtensionKind::MinEnvelope) {
  if (L <= 0) throw std::invalid_argument("mcshane_extend: L must be positive");
  if (partial.empty()) throw std::invalid_argument("mcshane_extend: empty domain");
  for (const auto& [p, val] : partial) {
    if (p < 0 || p >= space.size())
      throw std::invalid_argument("mcshane_extend: domain point out of range");
    for (const auto& [q, wal] : partial) {
      if (p == q) continue;
      Rat diff = val - wal;
      if (diff < 0) diff = -diff;
      if (diff > L * space.dist(p, q))
        throw std::invalid_argument(
            "mcshane_extend: assignment is not L-Lipschitz on its domain (" +
            space.id(p) + "," + space.id(q) + ")");
    }
  }
  LipschitzFunction f;
  f.values.resize(space.size());
  for (int p = 0; p < space.size(); ++p) {
    std::optional<Rat> best;
    for (const auto& [q, val] : partial) {
      Rat candidate = kind == ExtensionKind::MinEnvelope
                          ? Rat(val + L * space.dist(p, q))
                          : Rat(val - L * space.dist(p, q));
      if (!best || (kind == ExtensionKind::MinEnvelope ? candidate < *best
                                                       : candidate > *best))
        best = candidate;
    }
    f.values[p] = *best;
  }
  Rat shift = f.values[space.base()];
  for (Rat& v : f.values) v -= shift;
  return f;
}

}  // namespace lipfree
