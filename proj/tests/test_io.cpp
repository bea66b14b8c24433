#include <catch2/catch_amalgamated.hpp>

#include "lipfree/generators.hpp"
#include "lipfree/io.hpp"

using namespace lipfree;

TEST_CASE("rational parsing and rendering") {
  CHECK(*parse_rat("3/4") == Rat(3, 4));
  CHECK(*parse_rat("-3/6") == Rat(-1, 2));
  CHECK(*parse_rat("7") == 7);
  CHECK(*parse_rat("+2/8") == Rat(1, 4));
  CHECK(*parse_rat("0") == 0);
  CHECK_FALSE(parse_rat("1/0"));
  CHECK_FALSE(parse_rat("1.5"));
  CHECK_FALSE(parse_rat(""));
  CHECK_FALSE(parse_rat("a/b"));
  CHECK_FALSE(parse_rat("1/2/3"));
  CHECK_FALSE(parse_rat(" 1"));

  CHECK(rat_string(Rat(3, 4)) == "3/4");
  CHECK(rat_string(Rat(2)) == "2");
  CHECK(fraction_string(Rat(2)) == "2/1");
  CHECK(fraction_string(Rat(0)) == "0/1");
  CHECK(fraction_string(Rat(-1, 2)) == "-1/2");
  CHECK(decimal_string(Rat(1, 4)) == "0.250000");
  CHECK(decimal_string(Rat(-7, 2)) == "-3.500000");
}

TEST_CASE("space JSON round trip") {
  auto space = gen_example46(2);
  json j = space_to_json(space);
  auto back = space_from_json(j);
  REQUIRE(back.size() == space.size());
  CHECK(back.id(back.base()) == space.id(space.base()));
  for (int i = 0; i < space.size(); ++i) {
    CHECK(back.id(i) == space.id(i));
    REQUIRE(back.label(i));
    CHECK(back.label(i)->x == space.label(i)->x);
    for (int k = 0; k < space.size(); ++k) CHECK(back.dist(i, k) == space.dist(i, k));
  }
  CHECK(back.meta().at("kind") == "example46");
}

TEST_CASE("space reader keeps asymmetric input for validate to flag") {
  json j{{"points", json::array({json{{"id", "a"}}, json{{"id", "b"}}})},
         {"base", "a"},
         {"dist", json::array({json::array({"0", "1"}), json::array({"2", "0"})})}};
  auto space = space_from_json(j);
  auto v = validate(space);
  REQUIRE(v);
  CHECK(v->kind == MetricViolation::Kind::Asymmetry);
}

TEST_CASE("space reader rejects structural garbage") {
  json base{{"points", json::array({json{{"id", "a"}}, json{{"id", "b"}}})},
            {"base", "a"},
            {"dist", json::array({json::array({"0", "1"}), json::array({"1", "0"})})}};
  SECTION("missing base point") {
    json j = base;
    j["base"] = "zzz";
    CHECK_THROWS_AS(space_from_json(j), FormatError);
  }
  SECTION("ragged matrix") {
    json j = base;
    j["dist"] = json::array({json::array({"0", "1"}), json::array({"1"})});
    CHECK_THROWS_AS(space_from_json(j), FormatError);
  }
  SECTION("bad rational") {
    json j = base;
    j["dist"][0][1] = "1.5";
    CHECK_THROWS_AS(space_from_json(j), FormatError);
  }
  SECTION("numbers instead of strings") {
    json j = base;
    j["dist"][0][1] = 1;
    CHECK_THROWS_AS(space_from_json(j), FormatError);
  }
}

TEST_CASE("element JSON: masses, molecules, and cross-checks") {
  auto space = gen_example46(2);
  int x1 = *space.index_of("x1"), y1 = *space.index_of("y1");
  int x2 = *space.index_of("x2"), y2 = *space.index_of("y2");
  auto el = combine(space, {{x1, y1, Rat(1, 2)}, {x2, y2, Rat(1, 2)}});

  SECTION("round trip keeps masses and presentation") {
    json j = element_to_json(space, el);
    auto back = element_from_json(space, j);
    CHECK(back.masses == el.masses);
    REQUIRE(back.presentation);
    CHECK(back.presentation->size() == 2);
  }
  SECTION("masses-only form loses the presentation but keeps the measure") {
    json j = element_to_json(space, el);
    j.erase("molecules");
    auto back = element_from_json(space, j);
    CHECK(back.masses == el.masses);
    CHECK_FALSE(back.presentation);
  }
  SECTION("mismatched masses against molecules rejected") {
    json j = element_to_json(space, el);
    j["masses"][space.id(x1)] = "9";
    CHECK_THROWS_AS(element_from_json(space, j), FormatError);
  }
  SECTION("nonzero total mass rejected") {
    json j{{"masses", json{{space.id(x1), "1"}}}};
    CHECK_THROWS_AS(element_from_json(space, j), FormatError);
  }
  SECTION("unknown point rejected") {
    json j{{"masses", json{{"nope", "1"}}}};
    CHECK_THROWS_AS(element_from_json(space, j), FormatError);
  }
}

TEST_CASE("function JSON round trip and base-point check") {
  auto space = gen_example46(1);
  LipschitzFunction f = zero_function(space);
  for (int p = 0; p < space.size(); ++p)
    f.values[p] = space.dist(space.base(), p);
  json j = function_to_json(space, f);
  auto back = function_from_json(space, j);
  CHECK(back.values == f.values);
  j["values"][space.id(space.base())] = "1";
  CHECK_THROWS_AS(function_from_json(space, j), FormatError);
}

TEST_CASE("certificate JSON carries value, flow and potential") {
  auto space = gen_example46(2);
  auto el = molecule(space, *space.index_of("x1"), *space.index_of("y1"));
  auto cert = norm(space, el);
  json j = certificate_to_json(space, cert);
  CHECK(j.at("value") == "1/1");
  CHECK(j.at("flow").size() == cert.flow.size());
  CHECK(j.contains("potential"));
}

TEST_CASE("fnv1a64 is stable") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("lipfree") == fnv1a64_hex("lipfree"));
  CHECK(fnv1a64_hex("a") != fnv1a64_hex("b"));
}
