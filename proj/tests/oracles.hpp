#pragma once

// Brute-force reference computations used only by the tests. None of these
// share code paths with the library routines they check.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "floodstore/coding.hpp"
#include "floodstore/decoder.hpp"
#include "floodstore/topology.hpp"

namespace oracle {

using floodstore::NodeId;

/// Every unordered pair with 0 < distance <= r, via sqrt.
inline std::vector<std::pair<NodeId, NodeId>> pairwise_edges(const floodstore::GeometricGraph& g) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  const auto pos = g.positions();
  for (NodeId u = 0; u < pos.size(); ++u) {
    for (NodeId v = u + 1; v < pos.size(); ++v) {
      const long double dx = pos[u].x - pos[v].x;
      const long double dy = pos[u].y - pos[v].y;
      const long double d2 = dx * dx + dy * dy;
      const long double r = g.radius();
      if (d2 > 0 && d2 <= r * r) edges.emplace_back(u, v);
    }
  }
  return edges;
}

/// b_v = |N(v) \ (N(u) ∪ {u})| summed over N(u), computed with std::set.
inline std::uint32_t dsa2_counter(const floodstore::GeometricGraph& g, NodeId u, double c_u) {
  std::set<NodeId> closed(g.neighbors(u).begin(), g.neighbors(u).end());
  closed.insert(u);
  std::size_t total = 0;
  for (NodeId v : g.neighbors(u)) {
    std::set<NodeId> outside;
    for (NodeId w : g.neighbors(v)) {
      if (!closed.contains(w)) outside.insert(w);
    }
    total += outside.size();
  }
  const std::size_t d = g.neighbors(u).size();
  return static_cast<std::uint32_t>(c_u * static_cast<double>(total / d));
}

struct BruteSolution {
  std::vector<std::optional<std::uint8_t>> determined;  // one-byte symbols
  bool consistent = true;
};

/// Enumerates all 2^n assignments per bit plane of one-byte symbols and keeps
/// the variables on which every consistent assignment agrees.
inline BruteSolution enumerate(const std::vector<floodstore::Equation>& eqs, std::size_t n) {
  BruteSolution out;
  out.determined.assign(n, std::uint8_t{0});
  std::vector<bool> fixed(n, true);
  for (int bit = 0; bit < 8; ++bit) {
    std::vector<std::optional<int>> agreed(n);
    std::vector<bool> varies(n, false);
    bool any = false;
    for (std::uint32_t x = 0; x < (1U << n); ++x) {
      bool ok = true;
      for (const auto& eq : eqs) {
        int parity = 0;
        for (NodeId id : eq.support) parity ^= (x >> id) & 1U;
        if (parity != ((eq.value.bytes()[0] >> bit) & 1)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      any = true;
      for (std::size_t j = 0; j < n; ++j) {
        const int b = (x >> j) & 1U;
        if (!agreed[j]) {
          agreed[j] = b;
        } else if (*agreed[j] != b) {
          varies[j] = true;
        }
      }
    }
    if (!any) {
      out.consistent = false;
      return out;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (varies[j]) fixed[j] = false;
      if (out.determined[j]) *out.determined[j] |= static_cast<std::uint8_t>(*agreed[j] << bit);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!fixed[j]) out.determined[j].reset();
  }
  return out;
}

/// Random consistent system over n one-byte variables.
template <class Rng>
std::vector<floodstore::Equation> random_system(std::size_t n, Rng& rng,
                                                std::vector<std::uint8_t>* truth = nullptr) {
  std::vector<std::uint8_t> values(n);
  for (auto& v : values) v = static_cast<std::uint8_t>(rng.next());
  const std::size_t count = static_cast<std::size_t>(rng.below(2 * n + 1));
  std::vector<floodstore::Equation> eqs;
  for (std::size_t i = 0; i < count; ++i) {
    floodstore::Equation eq;
    std::uint8_t acc = 0;
    // Sparse supports are the common case in stored slots.
    const double density = 0.1 + 0.5 * rng.uniform01();
    for (NodeId j = 0; j < n; ++j) {
      if (rng.uniform01() < density) {
        eq.support.push_back(j);
        acc ^= values[j];
      }
    }
    eq.value = floodstore::Symbol(std::vector<std::uint8_t>{acc});
    eqs.push_back(std::move(eq));
  }
  if (truth) *truth = values;
  return eqs;
}

/// Returns the number of mismatches between gf2_solve and enumeration.
template <class Rng>
std::size_t solver_mismatches(std::size_t systems, Rng& rng) {
  std::size_t mismatches = 0;
  for (std::size_t s = 0; s < systems; ++s) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.below(10));
    const auto eqs = random_system(n, rng);
    const auto expected = enumerate(eqs, n);
    const auto got = floodstore::gf2_solve(eqs, n);
    bool same = expected.consistent;
    for (std::size_t j = 0; same && j < n; ++j) {
      const bool solver_has = got.recovered[j].has_value();
      if (solver_has != expected.determined[j].has_value()) {
        same = false;
      } else if (solver_has && got.recovered[j]->bytes()[0] != *expected.determined[j]) {
        same = false;
      }
    }
    if (!same) ++mismatches;
  }
  return mismatches;
}

}  // namespace oracle
