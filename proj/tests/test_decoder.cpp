#include "doctest.h"

#include <memory>
#include <numeric>

#include "floodstore/decoder.hpp"
#include "oracles.hpp"

using namespace floodstore;

namespace {

Symbol byte(std::uint8_t b) { return Symbol(std::vector<std::uint8_t>{b}); }

Engine disseminated(std::size_t n, double side, std::size_t slots, std::uint64_t seed) {
  auto g = std::make_shared<const GeometricGraph>(
      generate_topology(n, side, default_radius(n, side), seed));
  std::vector<Symbol> readings;
  for (NodeId u = 0; u < n; ++u) readings.push_back(make_reading(seed, u, 8));
  EngineOptions options;
  options.variant = Dsa1{n};
  options.slots = slots;
  Engine e(g, std::move(readings), options, seed);
  e.disseminate();
  return e;
}

}  // namespace

TEST_CASE("two-variable system") {
  const Symbol a = byte(0x5a), b = byte(0x0f);
  const std::vector<Equation> eqs{{{0, 1}, a}, {{1}, b}};
  const auto out = gf2_solve(eqs, 2);
  CHECK(out.success);
  CHECK(out.rank == 2);
  CHECK(*out.recovered[0] == (a ^ b));
  CHECK(*out.recovered[1] == b);
  CHECK(consistent_with(out, eqs));
}

TEST_CASE("duplicate equations add no rank") {
  const std::vector<Equation> eqs{{{0, 1}, byte(3)}, {{0, 1}, byte(3)}, {{0, 1}, byte(3)}};
  const auto out = gf2_solve(eqs, 2);
  CHECK(out.rank == 1);
  CHECK_FALSE(out.success);
  CHECK(out.recovered_count == 0);
}

TEST_CASE("partially determined systems report only fixed variables") {
  // x0 fixed; x1 ^ x2 known but neither alone.
  const std::vector<Equation> eqs{{{0}, byte(1)}, {{1, 2}, byte(2)}, {{0, 1, 2}, byte(3)}};
  const auto out = gf2_solve(eqs, 3);
  CHECK(out.rank == 2);
  CHECK(out.recovered[0].has_value());
  CHECK_FALSE(out.recovered[1].has_value());
  CHECK_FALSE(out.recovered[2].has_value());
}

TEST_CASE("inconsistent systems signal corruption") {
  const std::vector<Equation> eqs{{{0}, byte(1)}, {{0}, byte(2)}};
  CHECK_THROWS_AS(gf2_solve(eqs, 1), CorruptionError);
  const std::vector<Equation> empty_support{{{}, byte(4)}};
  CHECK_THROWS_AS(gf2_solve(empty_support, 3), CorruptionError);
  const std::vector<Equation> out_of_range{{{5}, byte(4)}};
  CHECK_THROWS_AS(gf2_solve(out_of_range, 3), std::invalid_argument);
}

TEST_CASE("empty input") {
  const auto out = gf2_solve({}, 4);
  CHECK(out.rank == 0);
  CHECK_FALSE(out.success);
}

TEST_CASE("random small systems match exhaustive enumeration") {
  Rng rng(8);
  CHECK(oracle::solver_mismatches(300, rng) == 0);
}

TEST_CASE("solver is sound and rank-bounded on larger random systems") {
  Rng rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(150);
    std::vector<std::uint8_t> truth;
    const auto eqs = oracle::random_system(n, rng, &truth);
    const auto out = gf2_solve(eqs, n);
    CHECK(out.rank <= std::min(eqs.size(), n));
    CHECK(out.success == (out.rank == n));
    CHECK(consistent_with(out, eqs));
    for (std::size_t j = 0; j < n; ++j) {
      if (out.recovered[j]) CHECK(out.recovered[j]->bytes()[0] == truth[j]);
    }
  }
}

TEST_CASE("uniform choice picks distinct nodes") {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto ids = choose_uniform(40, 1 + rng.below(40), rng);
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
    CHECK(ids.back() < 40);
  }
  CHECK_THROWS_AS(choose_uniform(10, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(choose_uniform(10, 11, rng), std::invalid_argument);
}

TEST_CASE("querying every node always decodes") {
  const Engine e = disseminated(60, 1.5, 6, 2);
  Rng rng(1);
  const auto eqs = query_nodes(e, 60, rng);
  const auto out = gf2_solve(eqs, 60);
  CHECK(out.success);
  for (NodeId u = 0; u < 60; ++u) CHECK(*out.recovered[u] == e.reading(u));
  const auto trial = decode_trial(e, 1.0, rng);
  CHECK(trial.success);
  CHECK(trial.queried == 60);
}

TEST_CASE("a single node with one slot reveals only itself") {
  const Engine e = disseminated(30, 1.0, 1, 4);
  Rng rng(2);
  const auto eqs = query_nodes(e, 1, rng);
  REQUIRE(eqs.size() == 1);
  const auto out = gf2_solve(eqs, 30);
  CHECK_FALSE(out.success);
  CHECK(out.recovered_count == 1);
}

TEST_CASE("equation count equals nonempty slots of the queried nodes") {
  const Engine e = disseminated(50, 1.5, 5, 6);
  Rng rng(5);
  const auto ids = choose_uniform(50, 20, rng);
  std::size_t expected = 0;
  for (NodeId u : ids) {
    for (const auto& slot : e.node(u).buffer.slots()) expected += slot.empty() ? 0 : 1;
  }
  CHECK(collect_equations(e, ids).size() == expected);
}

TEST_CASE("decoding without dissemination rarely succeeds just above 1/m") {
  const std::size_t n = 200, m = 10;
  auto g = std::make_shared<const GeometricGraph>(generate_topology(n, 3.0, default_radius(n, 3.0), 1));
  std::vector<Symbol> readings;
  for (NodeId u = 0; u < n; ++u) readings.push_back(make_reading(1, u, 8));
  EngineOptions options;
  options.variant = Dsa1{n};
  options.slots = m;
  const Engine e(g, readings, options, 1);  // flood skipped: buffers hold only slot 0
  Rng rng(9);
  const auto out = decode_trial(e, 0.11, rng);
  CHECK_FALSE(out.success);
  CHECK(out.recovered_count == out.queried);
}

TEST_CASE("queried count rounds up eta * n") {
  CHECK(queried_count(0.3, 100) == 30);
  CHECK(queried_count(0.1, 100) == 10);
  CHECK(queried_count(0.25, 10) == 3);
  CHECK(queried_count(1.0, 7) == 7);
  CHECK(queried_count(0.001, 7) == 1);
  CHECK_THROWS_AS(queried_count(0.0, 7), std::invalid_argument);
  CHECK_THROWS_AS(queried_count(1.5, 7), std::invalid_argument);
}

TEST_CASE("region selection") {
  const auto g = GeometricGraph::from_positions({{0.1, 0.1}, {0.2, 0.1}, {0.9, 0.9}}, 1.0, 0.3);
  CHECK(choose_region(g, 0.1, 0.1, 0.15) == std::vector<NodeId>{0, 1});
  CHECK(choose_region(g, 0.5, 0.5, 0.0).empty());
  CHECK_THROWS_AS(choose_region(g, 0.5, 0.5, -1.0), std::invalid_argument);
}
