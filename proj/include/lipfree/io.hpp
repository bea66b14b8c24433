#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lipfree/classifiers.hpp"
#include "lipfree/free_element.hpp"
#include "lipfree/metric_space.hpp"
#include "lipfree/molecule_calculus.hpp"
#include "lipfree/norm.hpp"

namespace lipfree {

using nlohmann::json;

/// Malformed input (unparseable files, missing points, bad rationals).
/// The CLI maps this to exit code 2; mathematical "false" verdicts are 1.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

inline Rat parse_rat_or_throw(const json& j, const std::string& context) {
  if (!j.is_string())
    throw FormatError(context + ": rationals must be strings like \"p/q\"");
  auto r = parse_rat(j.get<std::string>());
  if (!r) throw FormatError(context + ": cannot parse rational '" +
                            j.get<std::string>() + "'");
  return *r;
}

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

inline std::string fnv1a64_hex(std::string_view data) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Space files: {"points":[{"id":..,"label":[a,b]?},..],"base":..,"dist":[[..]]}
// The matrix is read as given (full, row-major); symmetry and the other
// axioms are validate()'s job, not the reader's assumption.
// ---------------------------------------------------------------------------

inline json space_to_json(const FiniteMetricSpace& space) {
  json points = json::array();
  for (int i = 0; i < space.size(); ++i) {
    json p;
    p["id"] = space.id(i);
    if (space.label(i))
      p["label"] = {rat_string(space.label(i)->x), rat_string(space.label(i)->y)};
    points.push_back(p);
  }
  json dist = json::array();
  for (int i = 0; i < space.size(); ++i) {
    json row = json::array();
    for (int j = 0; j < space.size(); ++j) row.push_back(rat_string(space.dist(i, j)));
    dist.push_back(row);
  }
  json out;
  out["points"] = points;
  out["base"] = space.id(space.base());
  out["dist"] = dist;
  if (!space.meta().empty()) out["meta"] = space.meta();
  return out;
}

inline FiniteMetricSpace space_from_json(const json& j) {
  if (!j.is_object() || !j.contains("points") || !j.contains("base") ||
      !j.contains("dist"))
    throw FormatError("space: need points, base and dist");
  std::vector<std::string> ids;
  std::vector<std::optional<PointLabel>> labels;
  for (const json& p : j.at("points")) {
    if (!p.contains("id") || !p.at("id").is_string())
      throw FormatError("space: every point needs a string id");
    ids.push_back(p.at("id").get<std::string>());
    if (p.contains("label")) {
      const json& l = p.at("label");
      if (!l.is_array() || l.size() != 2)
        throw FormatError("space: labels are [a, b] pairs");
      labels.push_back(PointLabel{parse_rat_or_throw(l[0], "space label"),
                                  parse_rat_or_throw(l[1], "space label")});
    } else {
      labels.push_back(std::nullopt);
    }
  }
  const std::size_t n = ids.size();
  const json& dj = j.at("dist");
  if (!dj.is_array() || dj.size() != n)
    throw FormatError("space: dist must be an n-by-n matrix");
  std::vector<std::vector<Rat>> dist;
  for (const json& row : dj) {
    if (!row.is_array() || row.size() != n)
      throw FormatError("space: dist must be an n-by-n matrix");
    std::vector<Rat> r;
    for (const json& cell : row) r.push_back(parse_rat_or_throw(cell, "space dist"));
    dist.push_back(std::move(r));
  }
  std::string base_id = j.at("base").get<std::string>();
  int base = -1;
  for (std::size_t i = 0; i < n; ++i)
    if (ids[i] == base_id) base = static_cast<int>(i);
  if (base < 0) throw FormatError("space: base point '" + base_id + "' is not declared");
  std::map<std::string, std::string> meta;
  if (j.contains("meta"))
    for (auto it = j.at("meta").begin(); it != j.at("meta").end(); ++it)
      meta[it.key()] = it.value().get<std::string>();
  try {
    return FiniteMetricSpace(std::move(ids), std::move(labels), std::move(dist), base,
                             std::move(meta));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("space: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Elements: {"masses": {...}} or {"molecules": [{"x":..,"y":..,"w":..},..]}
// ---------------------------------------------------------------------------

inline json element_to_json(const FiniteMetricSpace& space, const FreeElement& el) {
  json out;
  if (el.presentation) {
    json mols = json::array();
    for (const MoleculeTerm& t : *el.presentation)
      mols.push_back({{"x", space.id(t.x)},
                      {"y", space.id(t.y)},
                      {"w", rat_string(t.weight)}});
    out["molecules"] = mols;
  }
  json masses = json::object();
  for (int i = 0; i < space.size(); ++i)
    if (el.masses[i] != 0) masses[space.id(i)] = rat_string(el.masses[i]);
  out["masses"] = masses;
  return out;
}

inline int point_or_throw(const FiniteMetricSpace& space, const std::string& id,
                          const std::string& context) {
  auto ix = space.index_of(id);
  if (!ix) throw FormatError(context + ": unknown point '" + id + "'");
  return *ix;
}

inline FreeElement element_from_json(const FiniteMetricSpace& space, const json& j) {
  if (j.contains("molecules")) {
    std::vector<MoleculeTerm> terms;
    for (const json& m : j.at("molecules")) {
      if (!m.contains("x") || !m.contains("y") || !m.contains("w"))
        throw FormatError("element: molecule terms need x, y and w");
      terms.push_back({point_or_throw(space, m.at("x").get<std::string>(), "element"),
                       point_or_throw(space, m.at("y").get<std::string>(), "element"),
                       parse_rat_or_throw(m.at("w"), "element weight")});
    }
    FreeElement el;
    try {
      el = combine(space, terms);
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("element: ") + e.what());
    }
    if (j.contains("masses")) {
      FreeElement check = el;
      check.presentation.reset();
      for (int i = 0; i < space.size(); ++i) check.masses[i] = 0;
      for (auto it = j.at("masses").begin(); it != j.at("masses").end(); ++it)
        check.masses[point_or_throw(space, it.key(), "element")] =
            parse_rat_or_throw(it.value(), "element mass");
      for (int i = 0; i < space.size(); ++i)
        if (check.masses[i] != el.masses[i])
          throw FormatError("element: masses disagree with the molecule expansion");
    }
    return el;
  }
  if (!j.contains("masses")) throw FormatError("element: need masses or molecules");
  FreeElement el = zero_element(space);
  el.presentation.reset();
  for (auto it = j.at("masses").begin(); it != j.at("masses").end(); ++it)
    el.masses[point_or_throw(space, it.key(), "element")] =
        parse_rat_or_throw(it.value(), "element mass");
  if (total_mass(el) != 0) throw FormatError("element: total mass must be zero");
  return el;
}

// ---------------------------------------------------------------------------
// Functions: {"values": {"p0": "0", ...}}
// ---------------------------------------------------------------------------

inline json function_to_json(const FiniteMetricSpace& space,
                             const LipschitzFunction& f) {
  json values = json::object();
  for (int i = 0; i < space.size(); ++i) values[space.id(i)] = rat_string(f.values[i]);
  return json{{"values", values}};
}

inline LipschitzFunction function_from_json(const FiniteMetricSpace& space,
                                            const json& j) {
  if (!j.contains("values")) throw FormatError("function: need values");
  LipschitzFunction f = zero_function(space);
  for (auto it = j.at("values").begin(); it != j.at("values").end(); ++it)
    f.values[point_or_throw(space, it.key(), "function")] =
        parse_rat_or_throw(it.value(), "function value");
  if (f.values[space.base()] != 0)
    throw FormatError("function: must vanish at the base point");
  return f;
}

// ---------------------------------------------------------------------------
// Report values: fractions rendered "p/q" plus a display-only decimal.
// ---------------------------------------------------------------------------

inline json report_value(const Rat& r) {
  return json{{"value", fraction_string(r)}, {"decimal_display_only", decimal_string(r)}};
}

inline json certificate_to_json(const FiniteMetricSpace& space,
                                const NormCertificate& cert) {
  json flow = json::array();
  for (const FlowEdge& e : cert.flow)
    flow.push_back({{"from", space.id(e.from)},
                    {"to", space.id(e.to)},
                    {"amount", fraction_string(e.amount)}});
  return json{{"value", fraction_string(cert.value)},
              {"decimal_display_only", decimal_string(cert.value)},
              {"flow", flow},
              {"potential", function_to_json(space, cert.potential)}};
}

inline json pair_norm_to_json(const PairNormReport& r) {
  return json{{"value", fraction_string(r.value)},
              {"decimal_display_only", decimal_string(r.value)},
              {"epsilon_star", fraction_string(r.epsilon_star)},
              {"attained_by_cap", r.attained_by_cap}};
}

inline json muset_to_json(const FiniteMetricSpace& space, const MuSet& ms) {
  json members = json::array();
  for (const MuMember& m : ms.members)
    members.push_back({{"u", space.id(m.u)},
                       {"v", space.id(m.v)},
                       {"lambda", fraction_string(m.lambda)},
                       {"residual", element_to_json(space, m.residual)}});
  json candidates = json::array();
  for (const auto& [u, v] : ms.candidates)
    candidates.push_back({{"u", space.id(u)}, {"v", space.id(v)}});
  return json{{"members", members}, {"candidates", candidates}};
}

inline json verdict_to_json(const FiniteMetricSpace& space,
                            const DaugavetVerdict& verdict) {
  json distances = json::array();
  for (const PairDistance& pd : verdict.distances)
    distances.push_back({{"u", space.id(pd.u)},
                         {"v", space.id(pd.v)},
                         {"distance", fraction_string(pd.distance)}});
  json dents = json::array();
  for (const auto& [a, b] : verdict.denting_pairs)
    dents.push_back({{"u", space.id(a)}, {"v", space.id(b)}});
  json excluded = json::array();
  for (const PairDistance& pd : verdict.excluded_failures)
    excluded.push_back({{"u", space.id(pd.u)},
                        {"v", space.id(pd.v)},
                        {"distance", fraction_string(pd.distance)}});
  json out{{"is_daugavet", verdict.is_daugavet},
           {"denting_set", dents},
           {"distances", distances},
           {"excluded_failures", excluded}};
  if (verdict.offending)
    out["offending"] = {{"u", space.id(verdict.offending->u)},
                        {"v", space.id(verdict.offending->v)},
                        {"distance", fraction_string(verdict.offending->distance)}};
  return out;
}

inline json condition_iii_to_json(const FiniteMetricSpace& space,
                                  const ConditionIiiReport& report) {
  json violations = json::array();
  for (const RadiiViolation& v : report.violations)
    violations.push_back({{"u", space.id(v.u)},
                          {"v", space.id(v.v)},
                          {"r_plus_s", fraction_string(v.r_plus_s)},
                          {"bound", fraction_string(v.bound)},
                          {"distance", fraction_string(v.distance)}});
  return json{{"violations", violations}, {"pairs_checked", report.pairs_checked}};
}

inline json scan_rows_to_json(const FiniteMetricSpace& space,
                              const std::vector<ScanRow>& rows) {
  json out = json::array();
  for (const ScanRow& row : rows)
    out.push_back({{"slice", row.slice_id},
                   {"alpha", fraction_string(row.alpha)},
                   {"min_length", fraction_string(row.min_length)},
                   {"witness_u", space.id(row.witness_u)},
                   {"witness_v", space.id(row.witness_v)}});
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw FormatError("cannot parse JSON in " + path);
  return j;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lipfree
