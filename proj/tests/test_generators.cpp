#include <catch2/catch_amalgamated.hpp>

#include "lipfree/generators.hpp"
#include "lipfree/metric_space.hpp"

using namespace lipfree;

TEST_CASE("ladder generator") {
  SECTION("cardinality is 2^(depth+1) + depth") {
    for (int depth = 1; depth <= 5; ++depth)
      CHECK(gen_example32(depth).size() == (1 << (depth + 1)) + depth);
  }
  SECTION("depth 1 has the five expected points and d(x,(1/2,1/2)) = 1") {
    auto space = gen_example32(1);
    REQUIRE(space.size() == 5);
    for (const char* id : {"x", "y", "0_1/2", "1/2_1/2", "1_1/2"})
      CHECK(space.index_of(id));
    CHECK(space.dist(*space.index_of("x"), *space.index_of("1/2_1/2")) == 1);
  }
  SECTION("d(x,y) = 1 on the base level") {
    auto space = gen_example32(3);
    CHECK(space.dist(*space.index_of("x"), *space.index_of("y")) == 1);
  }
  SECTION("depth 4 contains z = (1/2,1/16) equidistant from the corners") {
    auto space = gen_example32(4);
    int x = *space.index_of("x"), y = *space.index_of("y");
    int z = *space.index_of("1/2_1/16");
    CHECK(space.dist(x, z) == Rat(1, 2) + Rat(1, 16));
    CHECK(space.dist(y, z) == Rat(1, 2) + Rat(1, 16));
  }
  SECTION("the metric axioms hold (triangle asserted, not assumed)") {
    for (int depth = 1; depth <= 4; ++depth) CHECK_FALSE(validate(gen_example32(depth)));
  }
  SECTION("base point is x") {
    auto space = gen_example32(2);
    CHECK(space.id(space.base()) == "x");
  }
  SECTION("depth below 1 rejected") {
    CHECK_THROWS_AS(gen_example32(0), std::invalid_argument);
  }
}

TEST_CASE("two-column generator") {
  SECTION("corner distances are all 1") {
    for (int k = 1; k <= 4; ++k) {
      auto space = gen_example46(k);
      int x1 = *space.index_of("x1"), y1 = *space.index_of("y1");
      int x2 = *space.index_of("x2"), y2 = *space.index_of("y2");
      CHECK(space.dist(x1, y1) == 1);
      CHECK(space.dist(x1, y2) == 1);
      CHECK(space.dist(x2, y1) == 1);
      CHECK(space.dist(x2, y2) == 1);
    }
  }
  SECTION("step-1/4 column and cross distances") {
    auto space = gen_example46(2);
    CHECK(space.dist(*space.index_of("0_1/4"), *space.index_of("0_1/2")) == Rat(1, 4));
    CHECK(space.dist(*space.index_of("0_1/4"), *space.index_of("1_1/2")) == 1);
  }
  SECTION("every pair matches the max-metric formula") {
    for (int k = 1; k <= 3; ++k) {
      auto space = gen_example46(k);
      for (int i = 0; i < space.size(); ++i)
        for (int j = 0; j < space.size(); ++j) {
          const auto& a = *space.label(i);
          const auto& b = *space.label(j);
          Rat dx = a.x > b.x ? a.x - b.x : b.x - a.x;
          Rat dy = a.y > b.y ? a.y - b.y : b.y - a.y;
          CHECK(space.dist(i, j) == std::max(dx, dy));
        }
    }
  }
  SECTION("validates") {
    for (int k = 1; k <= 4; ++k) CHECK_FALSE(validate(gen_example46(k)));
  }
}

TEST_CASE("random generator") {
  SECTION("two points always validate") {
    for (std::uint64_t seed = 0; seed < 10; ++seed)
      CHECK_FALSE(validate(gen_random(2, seed)));
  }
  SECTION("same seed reproduces the space") {
    for (std::uint64_t seed : {1ull, 44ull, 1234567ull}) {
      auto a = gen_random(7, seed);
      auto b = gen_random(7, seed);
      for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) CHECK(a.dist(i, j) == b.dist(i, j));
    }
  }
  SECTION("shortest-path closure validates across 500 seeds") {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      auto space = gen_random(2 + seed % 7, seed);
      CHECK_FALSE(validate(space));
    }
  }
  SECTION("euclidean snapping validates too") {
    for (std::uint64_t seed = 0; seed < 100; ++seed)
      CHECK_FALSE(validate(gen_random(2 + seed % 6, seed, RandomScheme::EuclideanSnap)));
  }
  SECTION("provenance lands in the meta field") {
    auto space = gen_random(5, 42);
    CHECK(space.meta().at("kind") == "random");
    CHECK(space.meta().at("seed") == "42");
    CHECK(space.meta().at("scheme") == "shortest-path");
  }
  SECTION("fewer than two points rejected") {
    CHECK_THROWS_AS(gen_random(1, 0), std::invalid_argument);
  }
}
