// Command-line surface for the Lipschitz-free space toolkit. Every verb
// prints a JSON report with an embedded run manifest (delta-profile emits
// CSV with the manifest as a comment line). Exit codes: 0 success, 1 when a
// predicate verb answers "false", 2 for input/format/usage errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lipfree/classifiers.hpp"
#include "lipfree/free_element.hpp"
#include "lipfree/generators.hpp"
#include "lipfree/io.hpp"
#include "lipfree/metric_space.hpp"
#include "lipfree/molecule_calculus.hpp"
#include "lipfree/norm.hpp"
#include "lipfree/version.hpp"

namespace {

using lipfree::FiniteMetricSpace;
using lipfree::FormatError;
using lipfree::FreeElement;
using lipfree::json;
using lipfree::Rat;

constexpr int kExitOk = 0;
constexpr int kExitFalse = 1;
constexpr int kExitFormat = 2;

json g_manifest;              // built up by each verb before computing
std::string g_out_path;       // --out target; empty means stdout

void manifest_begin(const std::string& command) {
  g_manifest = json::object();
  g_manifest["command"] = command;
  g_manifest["version"] = lipfree::kVersion;
  g_manifest["pivot_rule"] =
      lipfree::pivot_rule_from_env() == lipfree::PivotRule::Bland ? "bland" : "dantzig";
  g_manifest["params"] = json::object();
  g_manifest["inputs"] = json::object();
}

void manifest_param(const std::string& key, const std::string& value) {
  g_manifest["params"][key] = value;
}

void manifest_input_file(const std::string& key, const std::string& path,
                         const std::string& content) {
  g_manifest["inputs"][key] = {{"path", path},
                               {"fnv1a64", lipfree::fnv1a64_hex(content)}};
}

void emit(const std::string& text) {
  if (g_out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(g_out_path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + g_out_path);
    out << text;
  }
}

void emit_report(const json& result) {
  json report{{"manifest", g_manifest}, {"result", result}};
  emit(report.dump(2) + "\n");
}

FiniteMetricSpace load_space(const std::string& path) {
  std::string content = lipfree::read_file(path);
  manifest_input_file("space", path, content);
  json j = json::parse(content, nullptr, false);
  if (j.is_discarded()) throw FormatError("cannot parse JSON in " + path);
  return lipfree::space_from_json(j);
}

// Element specs: a JSON file path or the shorthand "mol:U,V".
FreeElement load_element(const FiniteMetricSpace& space, const std::string& spec) {
  if (spec.rfind("mol:", 0) == 0) {
    std::string rest = spec.substr(4);
    auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw FormatError("element shorthand is mol:U,V");
    int u = lipfree::point_or_throw(space, rest.substr(0, comma), "element");
    int v = lipfree::point_or_throw(space, rest.substr(comma + 1), "element");
    if (u == v) throw FormatError("element: molecule needs distinct points");
    manifest_param("element", spec);
    return lipfree::molecule(space, u, v);
  }
  std::string content = lipfree::read_file(spec);
  manifest_input_file("element", spec, content);
  json j = json::parse(content, nullptr, false);
  if (j.is_discarded()) throw FormatError("cannot parse JSON in " + spec);
  return lipfree::element_from_json(space, j);
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(csv);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  return out;
}

std::pair<int, int> parse_pair(const FiniteMetricSpace& space, const std::string& spec) {
  auto parts = split_list(spec);
  if (parts.size() != 2) throw FormatError("pair must be 'U,V'");
  int u = lipfree::point_or_throw(space, parts[0], "pair");
  int v = lipfree::point_or_throw(space, parts[1], "pair");
  return {u, v};
}

Rat parse_rat_arg(const std::string& s, const std::string& what) {
  auto r = lipfree::parse_rat(s);
  if (!r) throw FormatError(what + ": cannot parse rational '" + s + "'");
  return *r;
}

int cmd_gen(const std::string& kind, int depth, int k, int n, std::uint64_t seed,
            const std::string& scheme) {
  manifest_begin("gen");
  manifest_param("kind", kind);
  FiniteMetricSpace space = [&]() -> FiniteMetricSpace {
    if (kind == "example32") {
      manifest_param("depth", std::to_string(depth));
      return lipfree::gen_example32(depth);
    }
    if (kind == "example46") {
      manifest_param("step_exponent", std::to_string(k));
      return lipfree::gen_example46(k);
    }
    if (kind == "random") {
      manifest_param("n", std::to_string(n));
      manifest_param("seed", std::to_string(seed));
      manifest_param("scheme", scheme);
      lipfree::RandomScheme s = scheme == "euclidean-snap"
                                    ? lipfree::RandomScheme::EuclideanSnap
                                    : lipfree::RandomScheme::ShortestPath;
      if (scheme != "euclidean-snap" && scheme != "shortest-path")
        throw FormatError("gen: scheme must be shortest-path or euclidean-snap");
      return lipfree::gen_random(n, seed, s);
    }
    throw FormatError("gen: kind must be example32, example46 or random");
  }();
  emit(lipfree::space_to_json(space).dump(2) + "\n");
  return kExitOk;
}

int cmd_validate(const std::string& space_path) {
  manifest_begin("validate");
  FiniteMetricSpace space = load_space(space_path);
  auto violation = lipfree::validate(space);
  json result;
  result["ok"] = !violation;
  if (violation) {
    const char* kinds[] = {"nonzero_diagonal", "nonpositive_off_diagonal",
                           "asymmetry", "triangle"};
    json v{{"axiom", kinds[static_cast<int>(violation->kind)]},
           {"message", violation->message}};
    json witnesses = json::array();
    witnesses.push_back(space.id(violation->p));
    witnesses.push_back(space.id(violation->q));
    if (violation->r >= 0) witnesses.push_back(space.id(violation->r));
    v["witnesses"] = witnesses;
    result["violation"] = v;
  }
  emit_report(result);
  return violation ? kExitFalse : kExitOk;
}

int cmd_norm(const std::string& space_path, const std::string& element_spec) {
  manifest_begin("norm");
  FiniteMetricSpace space = load_space(space_path);
  FreeElement el = load_element(space, element_spec);
  lipfree::NormCertificate cert = lipfree::norm(space, el);
  emit_report(lipfree::certificate_to_json(space, cert));
  return kExitOk;
}

int cmd_pairnorm(const std::string& space_path, const std::string& tuple) {
  manifest_begin("pairnorm");
  manifest_param("pair", tuple);
  FiniteMetricSpace space = load_space(space_path);
  auto parts = split_list(tuple);
  if (parts.size() != 4) throw FormatError("pairnorm: --pair must be 'X,Y,U,V'");
  int x = lipfree::point_or_throw(space, parts[0], "pairnorm");
  int y = lipfree::point_or_throw(space, parts[1], "pairnorm");
  int u = lipfree::point_or_throw(space, parts[2], "pairnorm");
  int v = lipfree::point_or_throw(space, parts[3], "pairnorm");
  auto report = lipfree::pair_sum_norm(space, x, y, u, v);
  json result = lipfree::pair_norm_to_json(report);
  result["pair_distance"] =
      lipfree::fraction_string(lipfree::pair_distance(space, x, y, u, v));
  emit_report(result);
  return kExitOk;
}

int cmd_denting(const std::string& space_path, const std::string& pair_spec) {
  manifest_begin("denting");
  FiniteMetricSpace space = load_space(space_path);
  if (!pair_spec.empty()) {
    manifest_param("pair", pair_spec);
    auto [u, v] = parse_pair(space, pair_spec);
    if (u == v) throw FormatError("denting: endpoints must be distinct");
    bool denting = lipfree::is_denting(space, u, v);
    json seg = json::array();
    for (int p : lipfree::segment(space, u, v)) seg.push_back(space.id(p));
    emit_report(json{{"is_denting", denting}, {"segment", seg}});
    return denting ? kExitOk : kExitFalse;
  }
  json pairs = json::array();
  for (const auto& [a, b] : lipfree::denting_set(space))
    pairs.push_back({{"u", space.id(a)}, {"v", space.id(b)}});
  emit_report(json{{"denting_set", pairs}});
  return kExitOk;
}

int cmd_daugavet(const std::string& space_path, const std::string& element_spec,
                 const std::vector<std::string>& exclude) {
  manifest_begin("daugavet");
  FiniteMetricSpace space = load_space(space_path);
  FreeElement el = load_element(space, element_spec);
  std::vector<std::pair<int, int>> excluded;
  for (const std::string& e : exclude) {
    manifest_param("exclude:" + e, e);
    excluded.push_back(parse_pair(space, e));
  }
  lipfree::DaugavetVerdict verdict = lipfree::is_daugavet(space, el, excluded);
  emit_report(lipfree::verdict_to_json(space, verdict));
  return verdict.is_daugavet ? kExitOk : kExitFalse;
}

int cmd_muset(const std::string& space_path, const std::string& element_spec,
              bool all_pairs) {
  manifest_begin("muset");
  manifest_param("all_pairs", all_pairs ? "true" : "false");
  FiniteMetricSpace space = load_space(space_path);
  FreeElement el = load_element(space, element_spec);
  emit_report(lipfree::muset_to_json(space, lipfree::mu_set(space, el, all_pairs)));
  return kExitOk;
}

int cmd_witness(const std::string& space_path, const std::string& element_spec,
                const std::string& alpha_s, const std::string& eps_s,
                const std::string& slice_path) {
  manifest_begin("witness");
  manifest_param("alpha", alpha_s);
  manifest_param("eps", eps_s);
  FiniteMetricSpace space = load_space(space_path);
  FreeElement el = load_element(space, element_spec);
  Rat alpha = parse_rat_arg(alpha_s, "witness alpha");
  Rat eps = parse_rat_arg(eps_s, "witness eps");
  lipfree::LipschitzFunction f;
  if (slice_path.empty()) {
    f = lipfree::norm(space, el).potential;  // dual-potential slice
  } else {
    std::string content = lipfree::read_file(slice_path);
    manifest_input_file("slice", slice_path, content);
    json j = json::parse(content, nullptr, false);
    if (j.is_discarded()) throw FormatError("cannot parse JSON in " + slice_path);
    f = lipfree::function_from_json(space, j);
  }
  lipfree::Slice slice;
  try {
    slice = lipfree::make_slice(space, std::move(f), alpha, "cli");
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  lipfree::WitnessResult res = lipfree::daugavet_witness_search(space, el, slice, eps);
  json result{{"found", res.found},
              {"u", space.id(res.u)},
              {"v", space.id(res.v)},
              {"distance", lipfree::fraction_string(res.distance)},
              {"length", lipfree::fraction_string(res.length)},
              {"starts_tried", res.starts_tried}};
  emit_report(result);
  return res.found ? kExitOk : kExitFalse;
}

int cmd_descent(const std::string& space_path, const std::string& pair_spec,
                const std::string& r_s, const std::string& s_s,
                const std::string& delta_s) {
  manifest_begin("descent");
  manifest_param("pair", pair_spec);
  manifest_param("r", r_s);
  manifest_param("s", s_s);
  manifest_param("delta", delta_s);
  FiniteMetricSpace space = load_space(space_path);
  auto [u, v] = parse_pair(space, pair_spec);
  lipfree::DescentResult res = lipfree::denting_descent(
      space, u, v, parse_rat_arg(r_s, "descent r"), parse_rat_arg(s_s, "descent s"),
      parse_rat_arg(delta_s, "descent delta"));
  emit_report(json{{"x", space.id(res.x)},
                   {"y", space.id(res.y)},
                   {"is_denting", true},
                   {"d_u_x", lipfree::fraction_string(space.dist(u, res.x))},
                   {"d_v_y", lipfree::fraction_string(space.dist(v, res.y))}});
  return kExitOk;
}

int cmd_report_example32(int depth) {
  manifest_begin("report-example32");
  manifest_param("depth", std::to_string(depth));
  FiniteMetricSpace space = lipfree::gen_example32(depth);
  int x = *space.index_of("x");
  int y = *space.index_of("y");
  FreeElement el = lipfree::molecule(space, x, y);

  lipfree::DaugavetVerdict verdict =
      lipfree::is_daugavet(space, el, {{x, y}, {y, x}});

  json z_rows = json::array();
  for (int n = 1; n <= depth - 2; ++n) {
    Rat level = Rat(1) / Rat(lipfree::Int(1) << (n + 2));
    std::string z_id = lipfree::rat_string(Rat(1, 2)) + "_" + lipfree::rat_string(level);
    auto z = space.index_of(z_id);
    if (!z) throw std::logic_error("report-example32: missing z point " + z_id);
    Rat delta = Rat(1) / Rat(lipfree::Int(1) << n);
    auto seg = lipfree::delta_segment(space, x, y, delta);
    bool in_seg = std::find(seg.begin(), seg.end(), *z) != seg.end();
    bool outside = space.dist(x, *z) > Rat(1, 2) && space.dist(y, *z) > Rat(1, 2);
    z_rows.push_back({{"n", n},
                      {"z", z_id},
                      {"d_x_z", lipfree::fraction_string(space.dist(x, *z))},
                      {"d_y_z", lipfree::fraction_string(space.dist(y, *z))},
                      {"in_delta_segment", in_seg},
                      {"outside_balls", outside}});
  }

  json result;
  result["space"] = space.meta();
  result["verdict"] = lipfree::verdict_to_json(space, verdict);
  result["fails_only_by_excluded"] =
      verdict.is_daugavet && !verdict.excluded_failures.empty();
  result["z_witnesses"] = z_rows;
  emit_report(result);
  return kExitOk;
}

lipfree::LipschitzFunction named_slice_function(const FiniteMetricSpace& space,
                                                const std::string& name,
                                                const FreeElement& el) {
  if (name == "dual") return lipfree::norm(space, el).potential;
  if (name != "balanced" && name != "halfslope")
    throw FormatError("delta-profile: slice must be balanced, halfslope, dual or file:PATH");
  // Column functions on the two-column family: balanced is -b on the left
  // column and b-1 on the right; halfslope halves the vertical rate.
  lipfree::LipschitzFunction f = lipfree::zero_function(space);
  for (int p = 0; p < space.size(); ++p) {
    const auto& label = space.label(p);
    if (!label) throw FormatError("delta-profile: named slices need labeled points");
    const Rat& a = label->x;
    const Rat& b = label->y;
    if (name == "balanced")
      f.values[p] = a == 0 ? Rat(-b) : Rat(b - 1);
    else
      f.values[p] = a == 0 ? Rat(-b / 2) : Rat(b / 2 - 1);
  }
  return f;
}

int cmd_delta_profile(const std::string& family, const std::string& steps_csv,
                      const std::string& element_spec, const std::string& slice_spec,
                      const std::string& alphas_csv) {
  manifest_begin("delta-profile");
  manifest_param("family", family);
  manifest_param("steps", steps_csv);
  manifest_param("element", element_spec);
  manifest_param("slice", slice_spec);
  manifest_param("alphas", alphas_csv);
  if (family != "example46")
    throw FormatError("delta-profile: family must be example46");
  auto steps = split_list(steps_csv);
  if (steps.empty()) throw FormatError("delta-profile: need at least one step");
  auto alpha_strs = split_list(alphas_csv);
  if (alpha_strs.empty()) throw FormatError("delta-profile: need at least one alpha");
  std::vector<Rat> alphas;
  for (const std::string& a : alpha_strs) {
    Rat alpha = parse_rat_arg(a, "delta-profile alpha");
    if (alpha <= 0 || alpha >= 1)
      throw FormatError("delta-profile: alphas must lie in (0,1)");
    alphas.push_back(alpha);
  }

  std::ostringstream csv;
  csv << "# manifest: " << g_manifest.dump() << "\n";
  csv << "space_id,step,slice_id,alpha,min_length,witness_u,witness_v\n";
  for (const std::string& step_s : steps) {
    int k = 0;
    try {
      k = std::stoi(step_s);
    } catch (...) {
      throw FormatError("delta-profile: steps must be integers");
    }
    FiniteMetricSpace space = lipfree::gen_example46(k);
    Rat step = Rat(1) / Rat(lipfree::Int(1) << k);

    FreeElement el;
    if (element_spec == "balanced") {
      el = lipfree::combine(space, {{*space.index_of("x1"), *space.index_of("y1"), Rat(1, 2)},
                                    {*space.index_of("x2"), *space.index_of("y2"), Rat(1, 2)}});
    } else if (element_spec.rfind("file:", 0) == 0) {
      el = load_element(space, element_spec.substr(5));
    } else {
      el = load_element(space, element_spec);
    }
    if (lipfree::norm(space, el).value != 1)
      throw FormatError("delta-profile: element must have norm 1 in every family member");

    lipfree::LipschitzFunction f;
    if (slice_spec.rfind("file:", 0) == 0) {
      if (steps.size() != 1)
        throw FormatError("delta-profile: slice files only work with a single step");
      std::string content = lipfree::read_file(slice_spec.substr(5));
      manifest_input_file("slice", slice_spec.substr(5), content);
      json j = json::parse(content, nullptr, false);
      if (j.is_discarded()) throw FormatError("cannot parse slice JSON");
      f = lipfree::function_from_json(space, j);
    } else {
      f = named_slice_function(space, slice_spec, el);
    }

    for (const Rat& alpha : alphas) {
      lipfree::Slice slice;
      try {
        slice = lipfree::make_slice(space, f, alpha, slice_spec);
      } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
      }
      std::vector<lipfree::ScanRow> rows;
      try {
        rows = lipfree::delta_scan(space, el, {slice});
      } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
      }
      for (const lipfree::ScanRow& row : rows) {
        csv << space.meta().at("id") << "," << lipfree::fraction_string(step) << ","
            << row.slice_id << "," << lipfree::fraction_string(row.alpha) << ","
            << lipfree::fraction_string(row.min_length) << ","
            << space.id(row.witness_u) << "," << space.id(row.witness_v) << "\n";
      }
    }
  }
  emit(csv.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact extremal geometry of Lipschitz-free spaces over finite "
               "metric spaces"};
  app.require_subcommand(1);
  app.add_option("--out", g_out_path, "Write the report to a file instead of stdout");

  auto* gen = app.add_subcommand("gen", "Generate a space file");
  std::string gen_kind, gen_scheme = "shortest-path";
  int gen_depth = 1, gen_k = 1, gen_n = 4;
  std::uint64_t gen_seed = 0;
  gen->add_option("--kind", gen_kind, "example32 | example46 | random")->required();
  gen->add_option("--depth", gen_depth, "example32 truncation depth");
  gen->add_option("--k", gen_k, "example46 step exponent (step = 1/2^k)");
  gen->add_option("--n", gen_n, "random: point count");
  gen->add_option("--seed", gen_seed, "random: seed");
  gen->add_option("--scheme", gen_scheme, "random: shortest-path | euclidean-snap");

  auto* val = app.add_subcommand("validate", "Check the metric axioms of a space file");
  std::string val_space;
  val->add_option("space", val_space, "space JSON file")->required();

  auto* nrm = app.add_subcommand("norm", "Exact free-space norm with certificates");
  std::string nrm_space, nrm_element;
  nrm->add_option("--space", nrm_space)->required();
  nrm->add_option("--element", nrm_element, "element file or mol:U,V")->required();

  auto* pn = app.add_subcommand("pairnorm", "Closed-form ||m_xy + m_uv||");
  std::string pn_space, pn_tuple;
  pn->add_option("--space", pn_space)->required();
  pn->add_option("--pair", pn_tuple, "X,Y,U,V")->required();

  auto* dent = app.add_subcommand("denting", "Denting pairs of the unit ball");
  std::string dent_space, dent_pair;
  dent->add_option("--space", dent_space)->required();
  dent->add_option("--pair", dent_pair, "U,V (omit to list all denting pairs)");

  auto* daug = app.add_subcommand("daugavet", "Distance-to-denting-points test");
  std::string daug_space, daug_element;
  std::vector<std::string> daug_exclude;
  daug->add_option("--space", daug_space)->required();
  daug->add_option("--element", daug_element)->required();
  daug->add_option("--exclude", daug_exclude, "orientation U,V to ignore (repeatable)");

  auto* mus = app.add_subcommand("muset", "Molecule membership set M(mu)");
  std::string mus_space, mus_element;
  bool mus_all = false;
  mus->add_option("--space", mus_space)->required();
  mus->add_option("--element", mus_element)->required();
  mus->add_flag("--all-pairs", mus_all, "sweep every ordered pair of the space");

  auto* wit = app.add_subcommand("witness", "Slice witness search");
  std::string wit_space, wit_element, wit_alpha, wit_eps, wit_slice;
  wit->add_option("--space", wit_space)->required();
  wit->add_option("--element", wit_element)->required();
  wit->add_option("--alpha", wit_alpha)->required();
  wit->add_option("--eps", wit_eps)->required();
  wit->add_option("--slice-file", wit_slice, "function JSON (default: dual potential)");

  auto* desc = app.add_subcommand("descent", "Denting descent inside two balls");
  std::string desc_space, desc_pair, desc_r, desc_s, desc_delta;
  desc->add_option("--space", desc_space)->required();
  desc->add_option("--pair", desc_pair, "U,V")->required();
  desc->add_option("--r", desc_r)->required();
  desc->add_option("--s", desc_s)->required();
  desc->add_option("--delta", desc_delta)->required();

  auto* rep = app.add_subcommand("report-example32",
                                 "One-shot denting/distance report on the ladder space");
  int rep_depth = 1;
  rep->add_option("--depth", rep_depth)->required();

  auto* prof = app.add_subcommand("delta-profile",
                                  "Min molecule length per slice across a family (CSV)");
  std::string prof_family = "example46", prof_steps, prof_element, prof_slice,
              prof_alphas;
  prof->add_option("--family", prof_family, "example46");
  prof->add_option("--steps", prof_steps, "comma list of step exponents")->required();
  prof->add_option("--element", prof_element, "balanced | mol:U,V | file:PATH")
      ->required();
  prof->add_option("--slice", prof_slice, "balanced | halfslope | dual | file:PATH")
      ->required();
  prof->add_option("--alphas", prof_alphas, "comma list of rationals in (0,1)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitFormat;
  }

  try {
    if (*gen) return cmd_gen(gen_kind, gen_depth, gen_k, gen_n, gen_seed, gen_scheme);
    if (*val) return cmd_validate(val_space);
    if (*nrm) return cmd_norm(nrm_space, nrm_element);
    if (*pn) return cmd_pairnorm(pn_space, pn_tuple);
    if (*dent) return cmd_denting(dent_space, dent_pair);
    if (*daug) return cmd_daugavet(daug_space, daug_element, daug_exclude);
    if (*mus) return cmd_muset(mus_space, mus_element, mus_all);
    if (*wit) return cmd_witness(wit_space, wit_element, wit_alpha, wit_eps, wit_slice);
    if (*desc) return cmd_descent(desc_space, desc_pair, desc_r, desc_s, desc_delta);
    if (*rep) return cmd_report_example32(rep_depth);
    if (*prof)
      return cmd_delta_profile(prof_family, prof_steps, prof_element, prof_slice,
                               prof_alphas);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitFormat;
  }
  return kExitFormat;
}
