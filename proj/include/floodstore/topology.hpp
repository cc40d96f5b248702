#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace floodstore {

using NodeId = std::uint32_t;

/// Thrown when generation or loading is given parameters outside the
/// documented domain.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when no connected topology could be drawn within the attempt budget.
class TopologyError : public std::runtime_error {
 public:
  TopologyError(const std::string& what, std::uint64_t seed)
      : std::runtime_error(what), seed_(seed) {}
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double squared_distance(const Point& a, const Point& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Immutable random geometric graph on [0,L]^2. Nodes u != v are adjacent
/// iff |p_u - p_v|^2 <= r^2. Adjacency lists are sorted and duplicate-free.
class GeometricGraph {
 public:
  /// Builds the unit-disk graph over explicit positions. No connectivity
  /// requirement; every position must lie in [0,L]^2.
  static GeometricGraph from_positions(std::vector<Point> positions, double side, double radius,
                                       std::uint64_t seed = 0);

  /// Builds a graph from an explicit edge list (used by the text loader).
  /// Edges must reference valid ids and contain no self-loops.
  static GeometricGraph from_edges(std::vector<Point> positions, double side, double radius,
                                   std::uint64_t seed,
                                   std::span<const std::pair<NodeId, NodeId>> edges);

  std::size_t size() const noexcept { return positions_.size(); }
  double side() const noexcept { return side_; }
  double radius() const noexcept { return radius_; }
  /// Seed that produced this graph (the accepted attempt's sub-seed for
  /// generated graphs).
  std::uint64_t seed() const noexcept { return seed_; }

  const Point& position(NodeId u) const;
  std::span<const Point> positions() const noexcept { return positions_; }
  std::span<const NodeId> neighbors(NodeId u) const;
  bool adjacent(NodeId u, NodeId v) const;
  std::size_t edge_count() const noexcept;

  friend bool operator==(const GeometricGraph&, const GeometricGraph&) = default;

 private:
  GeometricGraph() = default;

  double side_ = 0.0;
  double radius_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<Point> positions_;
  std::vector<std::vector<NodeId>> adjacency_;
};

/// Radius L*sqrt(2 ln(n) / n): the usual connectivity-threshold scaling for
/// uniform points on a square.
double default_radius(std::size_t n, double side);

enum class Connectivity { require, allow_disconnected };

/// Maximum number of sub-seeded draws before generation gives up.
inline constexpr int kMaxTopologyAttempts = 100;

/// Draws n i.i.d. uniform positions on [0,L]^2 and connects pairs within r.
/// With Connectivity::require, disconnected draws are rejected and redrawn
/// from derived sub-seeds; TopologyError after kMaxTopologyAttempts.
GeometricGraph generate_topology(std::size_t n, double side, double radius, std::uint64_t seed,
                                 Connectivity connectivity = Connectivity::require);

std::size_t degree(const GeometricGraph& g, NodeId u);

/// (1/n) * sum of degrees. The degree sum is exact; the division is the
/// only rounding step.
double mean_degree(const GeometricGraph& g);

/// True iff a BFS from node 0 reaches every node.
bool is_connected(const GeometricGraph& g);

/// Hop distances from `source`; unreachable nodes get std::nullopt.
std::vector<std::optional<std::size_t>> hop_distances(const GeometricGraph& g, NodeId source);

// Text format:
//   n L r seed
//   id x y          (n lines, hexadecimal float literals)
//   u v             (one line per edge, u < v)
void write_topology(std::ostream& out, const GeometricGraph& g);
GeometricGraph read_topology(std::istream& in);
void save_topology(const std::string& path, const GeometricGraph& g);
GeometricGraph load_topology(const std::string& path);

}  // namespace floodstore
