#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "floodstore/topology.hpp"
#include "oracles.hpp"

using namespace floodstore;

namespace {

GeometricGraph golden() { return load_topology(FLOODSTORE_TEST_DATA "/golden_topology_n100.txt"); }

void check_invariants(const GeometricGraph& g) {
  for (NodeId u = 0; u < g.size(); ++u) {
    const auto list = g.neighbors(u);
    CHECK(std::is_sorted(list.begin(), list.end()));
    CHECK(std::adjacent_find(list.begin(), list.end()) == list.end());
    for (NodeId v : list) {
      CHECK(v != u);
      CHECK(g.adjacent(v, u));
    }
    const Point& p = g.position(u);
    CHECK(p.x >= 0.0);
    CHECK(p.x <= g.side());
    CHECK(p.y >= 0.0);
    CHECK(p.y <= g.side());
  }
}

}  // namespace

TEST_CASE("two nodes within radius are adjacent") {
  // r exceeds the field diagonal, so any draw links the pair.
  const auto g = generate_topology(2, 1.0, 1.5, 42);
  CHECK(g.size() == 2);
  CHECK(g.adjacent(0, 1));
  CHECK(degree(g, 0) == 1);
}

TEST_CASE("opposite corners beyond radius are not adjacent") {
  const auto g = GeometricGraph::from_positions({{0.0, 0.0}, {1.0, 1.0}}, 1.0, 0.5);
  CHECK(g.edge_count() == 0);
  CHECK_FALSE(is_connected(g));
  CHECK(mean_degree(g) == 0.0);
  CHECK_THROWS_AS(generate_topology(2, 1.0, 0.01, 1), TopologyError);
}

TEST_CASE("distance exactly r is an edge") {
  const auto g = GeometricGraph::from_positions({{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}}, 1.0, 0.5);
  CHECK(g.adjacent(0, 1));
  CHECK(g.adjacent(1, 2));
  CHECK_FALSE(g.adjacent(0, 2));
  // path 0-1-2: degrees 1, 2, 1
  CHECK(mean_degree(g) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(is_connected(g));
}

TEST_CASE("coincident points are not linked") {
  const auto g = GeometricGraph::from_positions({{0.3, 0.3}, {0.3, 0.3}}, 1.0, 0.5);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("degree on small hand-built graphs") {
  const auto clique = GeometricGraph::from_positions(
      {{0.1, 0.1}, {0.2, 0.1}, {0.1, 0.2}, {0.2, 0.2}, {0.15, 0.15}}, 1.0, 0.5);
  for (NodeId u = 0; u < 5; ++u) CHECK(degree(clique, u) == 4);

  const auto isolated = GeometricGraph::from_positions({{0.0, 0.0}, {0.1, 0.0}, {0.9, 0.9}}, 1.0, 0.2);
  CHECK(degree(isolated, 2) == 0);
  CHECK(degree(isolated, 0) == 1);
  CHECK_THROWS_AS(degree(isolated, 3), std::out_of_range);

  const auto edgeless = GeometricGraph::from_positions({{0.0, 0.0}, {0.5, 0.5}, {1.0, 1.0}}, 1.0, 0.1);
  CHECK_FALSE(is_connected(edgeless));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(generate_topology(1, 1.0, 0.5, 1), InvalidParameter);
  CHECK_THROWS_AS(generate_topology(10, 0.0, 0.5, 1), InvalidParameter);
  CHECK_THROWS_AS(generate_topology(10, 1.0, 0.0, 1), InvalidParameter);
  CHECK_THROWS_AS(generate_topology(10, 1.0, -1.0, 1), InvalidParameter);
  CHECK_THROWS_AS(generate_topology(10, 1.0, std::nan(""), 1), InvalidParameter);
  CHECK_THROWS_AS(GeometricGraph::from_positions({{2.0, 0.0}}, 1.0, 0.5), InvalidParameter);
}

TEST_CASE("golden n=100 topology is reproduced") {
  const auto expected = golden();
  const auto g = generate_topology(100, 2.0, default_radius(100, 2.0), 20091);
  CHECK(g == expected);
  CHECK(is_connected(g));
  check_invariants(g);
}

TEST_CASE("radius law against pairwise oracle") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 99ULL}) {
    for (std::size_t n : {20UL, 150UL, 500UL}) {
      const auto g = generate_topology(n, 3.0, default_radius(n, 3.0), seed,
                                       Connectivity::allow_disconnected);
      check_invariants(g);
      const auto edges = oracle::pairwise_edges(g);
      CHECK(edges.size() == g.edge_count());
      for (auto [u, v] : edges) CHECK(g.adjacent(u, v));
      for (NodeId u = 0; u < g.size(); ++u) {
        const auto expected = std::count_if(edges.begin(), edges.end(), [u](const auto& e) {
          return e.first == u || e.second == u;
        });
        CHECK(degree(g, u) == static_cast<std::size_t>(expected));
      }
    }
  }
}

TEST_CASE("mean degree equals the recomputed degree sum") {
  const auto g = generate_topology(200, 2.0, default_radius(200, 2.0), 5);
  const auto edges = oracle::pairwise_edges(g);
  CHECK(std::abs(mean_degree(g) - 2.0 * static_cast<double>(edges.size()) / 200.0) <= 1e-12);
}

TEST_CASE("generation is deterministic per seed") {
  const auto a = generate_topology(300, 4.0, default_radius(300, 4.0), 77);
  const auto b = generate_topology(300, 4.0, default_radius(300, 4.0), 77);
  const auto c = generate_topology(300, 4.0, default_radius(300, 4.0), 78);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("generated graphs are connected") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(is_connected(generate_topology(100, 2.0, default_radius(100, 2.0), seed)));
  }
}

TEST_CASE("text format round-trips bit-exactly") {
  const auto g = generate_topology(64, 1.7, 0.45, 1234);
  std::stringstream buffer;
  write_topology(buffer, g);
  const auto back = read_topology(buffer);
  CHECK(back == g);

  std::stringstream again;
  write_topology(again, back);
  std::stringstream first;
  write_topology(first, g);
  CHECK(again.str() == first.str());
}

TEST_CASE("malformed topology text is rejected") {
  std::stringstream empty;
  CHECK_THROWS_AS(read_topology(empty), InvalidParameter);
  std::stringstream truncated("3 0x1p+0 0x1p-1 5\n0 0x0p+0 0x0p+0\n");
  CHECK_THROWS_AS(read_topology(truncated), InvalidParameter);
  std::stringstream bad_edge("2 0x1p+0 0x1p-1 5\n0 0x0p+0 0x0p+0\n1 0x1p-2 0x0p+0\n1 0\n");
  CHECK_THROWS_AS(read_topology(bad_edge), InvalidParameter);
}

TEST_CASE("hop distances") {
  const auto g = GeometricGraph::from_positions({{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}, {1.0, 1.0}},
                                                1.0, 0.5);
  const auto d = hop_distances(g, 0);
  CHECK(*d[1] == 1);
  CHECK(*d[2] == 2);
  CHECK_FALSE(d[3].has_value());
}
