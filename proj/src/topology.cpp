#include "floodstore/topology.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "floodstore/random.hpp"

namespace floodstore {

namespace {

void check_field(double side, double radius) {
  if (!(side > 0.0) || !std::isfinite(side)) {
    throw InvalidParameter("field side L must be positive and finite");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidParameter("connectivity radius r must be positive and finite");
  }
}

void check_positions(std::span<const Point> positions, double side) {
  for (const Point& p : positions) {
    if (!(p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side)) {
      throw InvalidParameter("node position outside [0,L]^2");
    }
  }
}

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    throw InvalidParameter("malformed number in topology file: " + token);
  }
  return v;
}

}  // namespace

GeometricGraph GeometricGraph::from_positions(std::vector<Point> positions, double side,
                                              double radius, std::uint64_t seed) {
  check_field(side, radius);
  check_positions(positions, side);
  GeometricGraph g;
  g.side_ = side;
  g.radius_ = radius;
  g.seed_ = seed;
  g.positions_ = std::move(positions);
  const std::size_t n = g.positions_.size();
  g.adjacency_.assign(n, {});
  const double r2 = radius * radius;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double d2 = squared_distance(g.positions_[u], g.positions_[v]);
      // Coincident points have distance 0 and are not linked.
      if (d2 > 0.0 && d2 <= r2) {
        g.adjacency_[u].push_back(static_cast<NodeId>(v));
        g.adjacency_[v].push_back(static_cast<NodeId>(u));
      }
    }
  }
  // Pairs are visited with u ascending, so every list is already sorted.
  return g;
}

GeometricGraph GeometricGraph::from_edges(std::vector<Point> positions, double side, double radius,
                                          std::uint64_t seed,
                                          std::span<const std::pair<NodeId, NodeId>> edges) {
  check_field(side, radius);
  check_positions(positions, side);
  GeometricGraph g;
  g.side_ = side;
  g.radius_ = radius;
  g.seed_ = seed;
  g.positions_ = std::move(positions);
  const std::size_t n = g.positions_.size();
  g.adjacency_.assign(n, {});
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw InvalidParameter("edge references unknown node");
    if (u == v) throw InvalidParameter("self-loop in edge list");
    g.adjacency_[u].push_back(v);
    g.adjacency_[v].push_back(u);
  }
  for (auto& list : g.adjacency_) {
    std::sort(list.begin(), list.end());
    if (std::adjacent_find(list.begin(), list.end()) != list.end()) {
      throw InvalidParameter("duplicate edge in edge list");
    }
  }
  return g;
}

const Point& GeometricGraph::position(NodeId u) const {
  if (u >= size()) throw std::out_of_range("node id out of range");
  return positions_[u];
}

std::span<const NodeId> GeometricGraph::neighbors(NodeId u) const {
  if (u >= size()) throw std::out_of_range("node id out of range");
  return adjacency_[u];
}

bool GeometricGraph::adjacent(NodeId u, NodeId v) const {
  const auto list = neighbors(u);
  return std::binary_search(list.begin(), list.end(), v);
}

std::size_t GeometricGraph::edge_count() const noexcept {
  std::size_t total = 0;
  for (const auto& list : adjacency_) total += list.size();
  return total / 2;
}

double default_radius(std::size_t n, double side) {
  if (n < 2) throw InvalidParameter("default radius needs n >= 2");
  const auto nd = static_cast<double>(n);
  return side * std::sqrt(2.0 * std::log(nd) / nd);
}

GeometricGraph generate_topology(std::size_t n, double side, double radius, std::uint64_t seed,
                                 Connectivity connectivity) {
  if (n < 2) throw InvalidParameter("node count n must be at least 2");
  if (n > std::numeric_limits<NodeId>::max()) throw InvalidParameter("node count n too large");
  check_field(side, radius);

  for (int attempt = 0; attempt < kMaxTopologyAttempts; ++attempt) {
    const std::uint64_t sub_seed = derive_seed(seed, "topology-attempt", attempt);
    Rng rng(sub_seed);
    std::vector<Point> positions(n);
    for (auto& p : positions) {
      p.x = rng.uniform01() * side;
      p.y = rng.uniform01() * side;
    }
    auto g = GeometricGraph::from_positions(std::move(positions), side, radius, sub_seed);
    if (connectivity == Connectivity::allow_disconnected || is_connected(g)) return g;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "no connected topology after %d attempts (n=%zu, L=%g, r=%g, seed=%" PRIu64 ")",
                kMaxTopologyAttempts, n, side, radius, seed);
  throw TopologyError(buf, seed);
}

std::size_t degree(const GeometricGraph& g, NodeId u) { return g.neighbors(u).size(); }

double mean_degree(const GeometricGraph& g) {
  if (g.size() == 0) throw InvalidParameter("mean degree of an empty graph");
  std::size_t sum = 0;
  for (NodeId u = 0; u < g.size(); ++u) sum += g.neighbors(u).size();
  return static_cast<double>(sum) / static_cast<double>(g.size());
}

std::vector<std::optional<std::size_t>> hop_distances(const GeometricGraph& g, NodeId source) {
  std::vector<std::optional<std::size_t>> dist(g.size());
  if (source >= g.size()) throw std::out_of_range("node id out of range");
  std::deque<NodeId> frontier{source};
  dist[source] = 0;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v : g.neighbors(u)) {
      if (!dist[v]) {
        dist[v] = *dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

bool is_connected(const GeometricGraph& g) {
  if (g.size() == 0) return true;
  const auto dist = hop_distances(g, 0);
  return std::all_of(dist.begin(), dist.end(), [](const auto& d) { return d.has_value(); });
}

void write_topology(std::ostream& out, const GeometricGraph& g) {
  out << g.size() << ' ' << hex_double(g.side()) << ' ' << hex_double(g.radius()) << ' '
      << g.seed() << '\n';
  for (NodeId u = 0; u < g.size(); ++u) {
    const Point& p = g.position(u);
    out << u << ' ' << hex_double(p.x) << ' ' << hex_double(p.y) << '\n';
  }
  for (NodeId u = 0; u < g.size(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (u < v) out << u << ' ' << v << '\n';
    }
  }
}

GeometricGraph read_topology(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidParameter("topology file is empty");
  std::istringstream header(line);
  std::size_t n = 0;
  std::string side_tok, radius_tok;
  std::uint64_t seed = 0;
  if (!(header >> n >> side_tok >> radius_tok >> seed)) {
    throw InvalidParameter("topology header must be 'n L r seed'");
  }
  const double side = parse_double(side_tok);
  const double radius = parse_double(radius_tok);

  std::vector<Point> positions(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw InvalidParameter("topology file truncated in node list");
    std::istringstream row(line);
    std::size_t id = 0;
    std::string xs, ys;
    if (!(row >> id >> xs >> ys) || id != i) {
      throw InvalidParameter("bad node line: " + line);
    }
    positions[i] = {parse_double(xs), parse_double(ys)};
  }

  std::vector<std::pair<NodeId, NodeId>> edges;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    NodeId u = 0, v = 0;
    if (!(row >> u >> v) || u >= v) throw InvalidParameter("bad edge line: " + line);
    edges.emplace_back(u, v);
  }
  return GeometricGraph::from_edges(std::move(positions), side, radius, seed, edges);
}

void save_topology(const std::string& path, const GeometricGraph& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_topology(out, g);
  if (!out) throw std::runtime_error("write failed: " + path);
}

GeometricGraph load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_topology(in);
}

}  // namespace floodstore
