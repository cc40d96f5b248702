#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "floodstore/coding.hpp"
#include "floodstore/protocol.hpp"
#include "floodstore/random.hpp"

namespace floodstore {

/// Raised when elimination finds an equation reducing to 0 = nonzero. The
/// queried buffers disagree with each other, which means the engine
/// corrupted a slot.
class CorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// XOR of the symbols in `support` equals `value`.
struct Equation {
  std::vector<NodeId> support;
  Symbol value;
};

struct DecodeOutcome {
  std::vector<std::optional<Symbol>> recovered;  // indexed by NodeId
  std::size_t recovered_count = 0;
  std::size_t rank = 0;
  std::size_t equations = 0;
  std::size_t queried = 0;
  bool success = false;  // rank == n
};

/// Equations contributed by one node: one per nonempty slot.
std::vector<Equation> equations_of(const NodeBuffer& buffer);

/// h distinct nodes chosen uniformly without replacement.
std::vector<NodeId> choose_uniform(std::size_t n, std::size_t h, Rng& rng);

/// Nodes within `radius` of (x, y).
std::vector<NodeId> choose_region(const GeometricGraph& g, double x, double y, double radius);

std::vector<Equation> collect_equations(const Engine& engine, std::span<const NodeId> nodes);

/// Picks h nodes uniformly at random and returns their equations.
std::vector<Equation> query_nodes(const Engine& engine, std::size_t h, Rng& rng);

/// Gaussian elimination over GF(2) with symbol payloads carried along.
/// Reports every uniquely determined variable.
DecodeOutcome gf2_solve(std::span<const Equation> equations, std::size_t n);

/// True iff every equation whose support is fully recovered is satisfied by
/// the recovered symbols.
bool consistent_with(const DecodeOutcome& outcome, std::span<const Equation> equations);

/// Number of nodes queried at decoding ratio eta: ceil(eta * n), guarded
/// against representation error in eta.
std::size_t queried_count(double eta, std::size_t n);

DecodeOutcome decode_trial(const Engine& engine, double eta, Rng& rng);

}  // namespace floodstore
