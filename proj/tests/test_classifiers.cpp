#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "lipfree/classifiers.hpp"
#include "lipfree/generators.hpp"
#include "oracles.hpp"

using namespace lipfree;

namespace {

using PairSet = std::set<std::pair<std::string, std::string>>;

PairSet named(const FiniteMetricSpace& space,
              const std::vector<std::pair<int, int>>& pairs) {
  PairSet out;
  for (const auto& [a, b] : pairs) {
    std::string ia = space.id(a), ib = space.id(b);
    out.insert({std::min(ia, ib), std::max(ia, ib)});
  }
  return out;
}

// Closed-form denting classification of the ladder truncation: horizontal
// neighbours on every level, consecutive heights on the two boundary
// columns, and the corner pair itself (a truncation artifact).
PairSet predicted_ladder_denting(int depth) {
  PairSet out;
  auto id_of = [](const Rat& a, const Rat& b) -> std::string {
    if (b == 0) return a == 0 ? "x" : "y";
    return rat_string(a) + "_" + rat_string(b);
  };
  for (int n = 1; n <= depth; ++n) {
    Rat level = Rat(1) / Rat(Int(1) << n);
    for (int k = 0; k < (1 << n); ++k) {
      std::string u = id_of(Rat(k) / Rat(Int(1) << n), level);
      std::string v = id_of(Rat(k + 1) / Rat(Int(1) << n), level);
      out.insert({std::min(u, v), std::max(u, v)});
    }
  }
  for (const Rat& col : {Rat(0), Rat(1)}) {
    std::vector<Rat> heights{Rat(0)};
    for (int n = depth; n >= 1; --n) heights.push_back(Rat(1) / Rat(Int(1) << n));
    for (std::size_t i = 0; i + 1 < heights.size(); ++i) {
      std::string u = id_of(col, heights[i]);
      std::string v = id_of(col, heights[i + 1]);
      out.insert({std::min(u, v), std::max(u, v)});
    }
  }
  out.insert({"x", "y"});
  return out;
}

// Closed-form denting classification of the two-column space: same-column
// consecutive heights plus every cross-column pair.
PairSet predicted_two_column_denting(const FiniteMetricSpace& space) {
  PairSet out;
  for (int i = 0; i < space.size(); ++i)
    for (int j = i + 1; j < space.size(); ++j) {
      const auto& li = *space.label(i);
      const auto& lj = *space.label(j);
      bool denting;
      if (li.x != lj.x) {
        denting = true;  // cross-column: the only geodesic points are the ends
      } else {
        Rat gap = li.y > lj.y ? li.y - lj.y : lj.y - li.y;
        denting = gap * (space.size() / 2 - 1) == 1;  // consecutive heights
      }
      if (denting) {
        std::string a = space.id(i), b = space.id(j);
        out.insert({std::min(a, b), std::max(a, b)});
      }
    }
  return out;
}

}  // namespace

TEST_CASE("is_denting on the ladder") {
  SECTION("(x,y) is denting in every truncation") {
    for (int depth : {1, 2, 3}) {
      auto space = gen_example32(depth);
      CHECK(is_denting(space, *space.index_of("x"), *space.index_of("y")));
    }
  }
  SECTION("horizontal neighbours at level 1") {
    auto space = gen_example32(1);
    CHECK(is_denting(space, *space.index_of("0_1/2"), *space.index_of("1/2_1/2")));
  }
  SECTION("level-2 points half a level apart are separated by the midpoint") {
    auto space = gen_example32(2);
    int u = *space.index_of("1/4_1/4");
    int v = *space.index_of("3/4_1/4");
    CHECK_FALSE(is_denting(space, u, v));
    auto seg = segment(space, u, v);
    CHECK(std::find(seg.begin(), seg.end(), *space.index_of("1/2_1/4")) != seg.end());
  }
  SECTION("symmetry") {
    auto space = gen_example32(2);
    for (int u = 0; u < space.size(); ++u)
      for (int v = u + 1; v < space.size(); ++v)
        CHECK(is_denting(space, u, v) == is_denting(space, v, u));
  }
}

TEST_CASE("denting_set matches brute force and the closed forms") {
  SECTION("two-point space") {
    auto space = gen_random(2, 1);
    auto dents = denting_set(space);
    REQUIRE(dents.size() == 1);
  }
  SECTION("ladder truncations") {
    for (int depth : {1, 2, 3}) {
      auto space = gen_example32(depth);
      auto lib = named(space, denting_set(space));
      auto brute = named(space, oracles::brute_force_denting_pairs(space));
      CHECK(lib == brute);
      CHECK(lib == predicted_ladder_denting(depth));
    }
  }
  SECTION("two-column discretizations") {
    for (int k : {1, 2, 3}) {
      auto space = gen_example46(k);
      auto lib = named(space, denting_set(space));
      CHECK(lib == named(space, oracles::brute_force_denting_pairs(space)));
      CHECK(lib == predicted_two_column_denting(space));
    }
  }
  SECTION("random spaces agree with brute force") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto space = gen_random(7, 4242 + seed);
      CHECK(named(space, denting_set(space)) ==
            named(space, oracles::brute_force_denting_pairs(space)));
    }
  }
}

TEST_CASE("is_daugavet on the ladder molecule") {
  auto space = gen_example32(2);
  int x = *space.index_of("x"), y = *space.index_of("y");
  auto el = molecule(space, x, y);
  SECTION("fails only through itself") {
    auto verdict = is_daugavet(space, el);
    CHECK_FALSE(verdict.is_daugavet);
    REQUIRE(verdict.offending);
    CHECK(verdict.offending->distance < 2);
    CHECK(space.id(verdict.offending->u) == "x");
    CHECK(space.id(verdict.offending->v) == "y");
    CHECK(verdict.offending->distance == 0);
  }
  SECTION("with +-m_xy excluded every denting distance is exactly 2") {
    auto verdict = is_daugavet(space, el, {{x, y}, {y, x}});
    CHECK(verdict.is_daugavet);
    CHECK_FALSE(verdict.offending);
    // only the self orientation fails: ||m_xy - m_yx|| = 2||m_xy|| = 2 passes
    REQUIRE(verdict.excluded_failures.size() == 1);
    CHECK(verdict.excluded_failures[0].u == x);
    CHECK(verdict.excluded_failures[0].v == y);
    CHECK(verdict.excluded_failures[0].distance == 0);
    for (const auto& pd : verdict.distances) {
      bool self = (pd.u == x && pd.v == y) || (pd.u == y && pd.v == x);
      if (!self) CHECK(pd.distance == 2);
    }
  }
}

TEST_CASE("is_daugavet on the two-column space at step 1/8") {
  auto space = gen_example46(3);
  int x1 = *space.index_of("x1"), y2 = *space.index_of("y2");
  auto verdict = is_daugavet(space, molecule(space, x1, y2));
  CHECK_FALSE(verdict.is_daugavet);
  REQUIRE(verdict.offending);
  int p = *space.index_of("0_1/2");
  int q = *space.index_of("0_5/8");
  bool found = false;
  for (const auto& pd : verdict.distances)
    if (pd.u == p && pd.v == q) {
      found = true;
      CHECK(pd.distance == Rat(7, 4));
    }
  CHECK(found);
}

TEST_CASE("condition_iii_check") {
  SECTION("ladder molecule violates through its own denting pair") {
    auto space = gen_example32(1);
    int x = *space.index_of("x"), y = *space.index_of("y");
    auto report = condition_iii_check(space, molecule(space, x, y));
    REQUIRE_FALSE(report.violations.empty());
    bool self_violation = false;
    for (const auto& v : report.violations)
      if (v.u == x && v.v == y && v.bound == 2 && v.distance == 0) self_violation = true;
    CHECK(self_violation);
    SECTION("the half-covered pair needs distance >= 1 and gets 1 and 2") {
      int mid = *space.index_of("1/2_1/2");
      auto cover = min_enclosing_radii(space, x, mid);
      CHECK(cover.r_plus_s == Rat(1, 2));
      CHECK(pair_distance(space, x, y, x, mid) == 1);
      CHECK(pair_distance(space, x, y, mid, x) == 2);
      for (const auto& v : report.violations) {
        CHECK_FALSE((v.u == x && v.v == mid));
        CHECK_FALSE((v.u == mid && v.v == x));
      }
    }
  }
  SECTION("cover sums stay below 1, so no pair is vacuous on a metric space") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto space = gen_random(6, 999 + seed);
      for (int u = 0; u < space.size(); ++u)
        for (int v = u + 1; v < space.size(); ++v)
          CHECK(min_enclosing_radii(space, u, v).r_plus_s < 1);
    }
  }
}

TEST_CASE("denting_descent") {
  SECTION("already-denting input returns immediately") {
    auto space = gen_example46(2);
    int x1 = *space.index_of("x1"), y1 = *space.index_of("y1");
    auto res = denting_descent(space, x1, y1, Rat(1, 4), Rat(1, 4), Rat(1, 8));
    CHECK(res.x == x1);
    CHECK(res.y == y1);
  }
  SECTION("ladder pair (x,(1/2,1/2)) descends to a denting pair inside the balls") {
    auto space = gen_example32(1);
    int x = *space.index_of("x");
    int mid = *space.index_of("1/2_1/2");
    auto res = denting_descent(space, x, mid, Rat(3, 5), Rat(3, 10), Rat(1, 20));
    CHECK(is_denting(space, res.x, res.y));
    CHECK(space.dist(x, res.x) <= Rat(3, 5));
    CHECK(space.dist(mid, res.y) <= Rat(3, 10));
  }
  SECTION("precondition violations name the offending point") {
    auto space = gen_example32(1);
    int x = *space.index_of("x");
    int mid = *space.index_of("1/2_1/2");
    CHECK_THROWS_WITH(denting_descent(space, x, mid, Rat(1, 10), Rat(1, 10), Rat(1, 20)),
                      Catch::Matchers::ContainsSubstring("0_1/2"));
    CHECK_THROWS_AS(denting_descent(space, x, mid, Rat(2, 3), Rat(1, 2), Rat(1, 20)),
                    std::invalid_argument);
  }
  SECTION("random preconditioned instances stay denting and ball-constrained") {
    int used = 0;
    for (std::uint64_t seed = 1; used < 40 && seed < 300; ++seed) {
      auto space = gen_random(7, 31000 + seed);
      for (int u = 0; u < space.size() && used < 40; ++u)
        for (int v = u + 1; v < space.size(); ++v) {
          auto cover = min_enclosing_radii(space, u, v);
          if (cover.r_plus_s >= 1) continue;
          Rat r = cover.r * space.dist(u, v);
          Rat s = cover.s * space.dist(u, v);
          auto gap = segment_gap(space, u, v);
          Rat delta = gap ? *gap / 2 : Rat(1);
          auto res = denting_descent(space, u, v, r, s, delta);
          CHECK(is_denting(space, res.x, res.y));
          CHECK(space.dist(u, res.x) <= r);
          CHECK(space.dist(v, res.y) <= s);
          ++used;
          break;
        }
    }
    REQUIRE(used >= 25);
  }
}

TEST_CASE("daugavet_witness_search") {
  SECTION("two-point space dead-ends with the only molecule as the short pair") {
    auto space = gen_random(2, 5);
    auto el = molecule(space, 0, 1);
    auto cert = norm(space, el);
    Slice slice = make_slice(space, cert.potential, Rat(1, 4), "dual");
    auto res = daugavet_witness_search(space, el, slice, Rat(1, 4));
    CHECK_FALSE(res.found);
    CHECK(res.length >= *space.min_positive_distance());
    CHECK(slice_contains_molecule(space, slice, res.u, res.v));
  }
  SECTION("ladder depth 3: the dual slice holds a far witness") {
    auto space = gen_example32(3);
    int x = *space.index_of("x"), y = *space.index_of("y");
    auto el = molecule(space, x, y);
    Slice slice = make_slice(space, norm(space, el).potential, Rat(1, 4), "dual");
    auto res = daugavet_witness_search(space, el, slice, Rat(1, 4));
    REQUIRE(res.found);
    CHECK(res.distance >= Rat(7, 4));
    CHECK(slice_contains_molecule(space, slice, res.u, res.v));
    // exhaustive confirmation
    bool exists = false;
    for (int u = 0; u < space.size(); ++u)
      for (int v = 0; v < space.size(); ++v) {
        if (u == v || !slice_contains_molecule(space, slice, u, v)) continue;
        if (norm(space, subtract(el, molecule(space, u, v))).value >= Rat(7, 4))
          exists = true;
      }
    CHECK(exists);
  }
  SECTION("rejects slices that miss the element") {
    auto space = gen_example46(2);
    int x1 = *space.index_of("x1"), y1 = *space.index_of("y1");
    auto el = molecule(space, x1, y1);
    auto other = norm(space, molecule(space, y1, x1)).potential;
    Slice slice = make_slice(space, other, Rat(1, 8), "away");
    CHECK_THROWS_AS(daugavet_witness_search(space, el, slice, Rat(1, 2)),
                    std::invalid_argument);
  }
}

TEST_CASE("delta_scan on the two-column family") {
  auto space = gen_example46(2);
  int x1 = *space.index_of("x1"), y1 = *space.index_of("y1");
  int x2 = *space.index_of("x2"), y2 = *space.index_of("y2");
  auto balanced = combine(space, {{x1, y1, Rat(1, 2)}, {x2, y2, Rat(1, 2)}});

  LipschitzFunction fbal = zero_function(space);
  LipschitzFunction fhalf = zero_function(space);
  for (int p = 0; p < space.size(); ++p) {
    const auto& label = *space.label(p);
    fbal.values[p] = label.x == 0 ? Rat(-label.y) : Rat(label.y - 1);
    fhalf.values[p] = label.x == 0 ? Rat(-label.y / 2) : Rat(label.y / 2 - 1);
  }

  SECTION("balanced slice: min length is the step") {
    Slice s = make_slice(space, fbal, Rat(1, 10), "balanced");
    auto rows = delta_scan(space, balanced, {s});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].min_length == Rat(1, 4));
  }
  SECTION("half-slope slice around m_x1y1: min length stays 1") {
    Slice s = make_slice(space, fhalf, Rat(1, 4), "halfslope");
    auto rows = delta_scan(space, molecule(space, x1, y1), {s});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].min_length == 1);
  }
  SECTION("alpha near 1 reaches the global minimal distance") {
    Slice s = make_slice(space, fbal, Rat(99, 100), "wide");
    auto rows = delta_scan(space, balanced, {s});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].min_length == *space.min_positive_distance());
  }
  SECTION("slices not containing the element are rejected") {
    Slice s = make_slice(space, fhalf, Rat(1, 10), "halfslope");
    CHECK_THROWS_AS(delta_scan(space, balanced, {s}), std::invalid_argument);
  }
}

TEST_CASE("make_slices") {
  auto space = gen_example46(2);
  int x1 = *space.index_of("x1"), y1 = *space.index_of("y1");
  int x2 = *space.index_of("x2"), y2 = *space.index_of("y2");
  auto el = combine(space, {{x1, y1, Rat(1, 2)}, {x2, y2, Rat(1, 2)}});
  SliceFamilyOptions options;
  options.alphas = {Rat(1, 10), Rat(1, 4)};
  options.seed = 7;
  auto slices = make_slices(space, el, options);
  REQUIRE_FALSE(slices.empty());
  SECTION("every slice contains the element; dual and fmu families present") {
    bool has_dual = false, has_fmu = false, has_support = false;
    for (const auto& s : slices) {
      CHECK(slice_contains(s, el));
      CHECK(lipschitz_constant(space, s.f) == 1);
      if (s.id.rfind("dual", 0) == 0) has_dual = true;
      if (s.id.rfind("fmu", 0) == 0) has_fmu = true;
      if (s.id.rfind("support", 0) == 0) has_support = true;
    }
    CHECK(has_dual);
    CHECK(has_fmu);
    CHECK(has_support);
  }
  SECTION("same seed, same slices") {
    auto again = make_slices(space, el, options);
    REQUIRE(again.size() == slices.size());
    for (std::size_t i = 0; i < slices.size(); ++i) {
      CHECK(again[i].id == slices[i].id);
      CHECK(again[i].f.values == slices[i].f.values);
    }
  }
}

TEST_CASE("a slice containing a convex combination contains a constituent molecule") {
  std::mt19937_64 rng(606);
  int used = 0;
  for (std::uint64_t seed = 1; used < 20 && seed < 200; ++seed) {
    auto space = gen_random(6, 51000 + seed);
    auto el = oracles::random_unit_combination(space, rng);
    if (!el) continue;
    ++used;
    SliceFamilyOptions options;
    options.alphas = {Rat(1, 5)};
    options.seed = seed;
    for (const auto& slice : make_slices(space, *el, options)) {
      bool constituent_in_slice = false;
      for (const MoleculeTerm& t : *el->presentation)
        if (slice_contains_molecule(space, slice, t.x, t.y)) constituent_in_slice = true;
      CHECK(constituent_in_slice);
    }
  }
  REQUIRE(used >= 10);
}

TEST_CASE("daugavet verdict against the cover condition on random molecules") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    auto space = gen_random(5, 61000 + seed);
    auto el = molecule(space, 0, static_cast<int>(1 + seed % 4));
    auto verdict = is_daugavet(space, el);
    auto report = condition_iii_check(space, el);
    if (verdict.is_daugavet) {
      CHECK(report.violations.empty());
    } else {
      REQUIRE(verdict.offending);
      Rat confirmed =
          norm(space, subtract(el, molecule(space, verdict.offending->u,
                                            verdict.offending->v)))
              .value;
      CHECK(confirmed == verdict.offending->distance);
      CHECK(confirmed < 2);
      CHECK_FALSE(report.violations.empty());
    }
  }
}
