#include "floodstore/decoder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace floodstore {

namespace {

struct Row {
  std::vector<std::uint64_t> bits;
  Symbol value;
  std::size_t pivot = 0;

  bool test(std::size_t col) const { return (bits[col / 64] >> (col % 64)) & 1U; }
  void flip(std::size_t col) { bits[col / 64] ^= std::uint64_t{1} << (col % 64); }

  // Lowest set column at or after `from`, or npos.
  std::size_t lowest(std::size_t from) const {
    for (std::size_t w = from / 64; w < bits.size(); ++w) {
      std::uint64_t word = bits[w];
      if (w == from / 64) word &= ~std::uint64_t{0} << (from % 64);
      if (word != 0) return w * 64 + static_cast<std::size_t>(std::countr_zero(word));
    }
    return npos;
  }

  void absorb(const Row& other) {
    for (std::size_t w = 0; w < bits.size(); ++w) bits[w] ^= other.bits[w];
    value ^= other.value;
  }

  std::size_t weight() const {
    std::size_t total = 0;
    for (auto word : bits) total += static_cast<std::size_t>(std::popcount(word));
    return total;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

}  // namespace

std::vector<Equation> equations_of(const NodeBuffer& buffer) {
  std::vector<Equation> out;
  for (const BufferSlot& slot : buffer.slots()) {
    if (!slot.empty()) out.push_back(Equation{slot.origins, slot.accumulator});
  }
  return out;
}

std::vector<NodeId> choose_uniform(std::size_t n, std::size_t h, Rng& rng) {
  if (h < 1 || h > n) throw std::invalid_argument("query size h must lie in [1, n]");
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), NodeId{0});
  for (std::size_t i = 0; i < h; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(h);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<NodeId> choose_region(const GeometricGraph& g, double x, double y, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("query region radius must be non-negative");
  const Point center{x, y};
  std::vector<NodeId> ids;
  for (NodeId u = 0; u < g.size(); ++u) {
    if (squared_distance(g.position(u), center) <= radius * radius) ids.push_back(u);
  }
  return ids;
}

std::vector<Equation> collect_equations(const Engine& engine, std::span<const NodeId> nodes) {
  std::vector<Equation> out;
  for (NodeId u : nodes) {
    auto eqs = equations_of(engine.node(u).buffer);
    std::move(eqs.begin(), eqs.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<Equation> query_nodes(const Engine& engine, std::size_t h, Rng& rng) {
  const auto ids = choose_uniform(engine.size(), h, rng);
  return collect_equations(engine, ids);
}

DecodeOutcome gf2_solve(std::span<const Equation> equations, std::size_t n) {
  const std::size_t words = (n + 63) / 64;
  std::vector<Row> basis;
  std::vector<std::ptrdiff_t> pivot_row(n, -1);
  std::size_t symbol_length = equations.empty() ? 0 : equations.front().value.size();

  for (const Equation& eq : equations) {
    Row row{std::vector<std::uint64_t>(words, 0), eq.value, 0};
    if (eq.value.size() != symbol_length) throw std::invalid_argument("mixed symbol lengths");
    for (NodeId id : eq.support) {
      if (id >= n) throw std::invalid_argument("equation support outside 0..n-1");
      row.flip(id);
    }
    std::size_t p = row.lowest(0);
    while (p != Row::npos && pivot_row[p] >= 0) {
      row.absorb(basis[static_cast<std::size_t>(pivot_row[p])]);
      p = row.lowest(p);
    }
    if (p == Row::npos) {
      if (!row.value.is_zero()) {
        throw CorruptionError("inconsistent equations: empty support with nonzero value");
      }
      continue;
    }
    row.pivot = p;
    pivot_row[p] = static_cast<std::ptrdiff_t>(basis.size());
    basis.push_back(std::move(row));
  }

  // Back-substitution to reduced row-echelon form, largest pivot first.
  // Rows only carry columns at or above their own pivot.
  std::vector<std::size_t> order(basis.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return basis[a].pivot > basis[b].pivot; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Row& reducer = basis[order[i]];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      Row& row = basis[order[j]];
      if (row.test(reducer.pivot)) row.absorb(reducer);
    }
  }

  DecodeOutcome out;
  out.recovered.assign(n, std::nullopt);
  out.rank = basis.size();
  out.equations = equations.size();
  for (const Row& row : basis) {
    if (row.weight() == 1) {
      out.recovered[row.pivot] = row.value;
      ++out.recovered_count;
    }
  }
  out.success = out.rank == n;
  return out;
}

bool consistent_with(const DecodeOutcome& outcome, std::span<const Equation> equations) {
  for (const Equation& eq : equations) {
    Symbol acc = Symbol::zero(eq.value.size());
    bool complete = true;
    for (NodeId id : eq.support) {
      if (id >= outcome.recovered.size() || !outcome.recovered[id]) {
        complete = false;
        break;
      }
      acc ^= *outcome.recovered[id];
    }
    if (complete && !(acc == eq.value)) return false;
  }
  return true;
}

std::size_t queried_count(double eta, std::size_t n) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("decoding ratio must lie in (0, 1]");
  const double raw = std::ceil(eta * static_cast<double>(n) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(raw), 1, n);
}

DecodeOutcome decode_trial(const Engine& engine, double eta, Rng& rng) {
  const std::size_t h = queried_count(eta, engine.size());
  const auto equations = query_nodes(engine, h, rng);
  DecodeOutcome out = gf2_solve(equations, engine.size());
  out.queried = h;
  return out;
}

}  // namespace floodstore
