#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "floodstore/topology.hpp"

namespace floodstore {

/// Raised when a buffer operation would break a slot invariant.
class BufferError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Fixed-length payload. All symbols in one simulation share a length.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

  static Symbol zero(std::size_t length) { return Symbol(std::vector<std::uint8_t>(length, 0)); }

  std::size_t size() const noexcept { return bytes_.size(); }
  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
  bool is_zero() const noexcept;

  /// Bytewise XOR. Throws std::invalid_argument on a length mismatch.
  Symbol& operator^=(const Symbol& other);
  friend Symbol operator^(Symbol a, const Symbol& b) { return a ^= b; }

  friend bool operator==(const Symbol&, const Symbol&) = default;

  std::string to_hex() const;

 private:
  std::vector<std::uint8_t> bytes_;
};

inline Symbol xor_symbols(const Symbol& a, const Symbol& b) { return a ^ b; }

/// Deterministic nonzero pseudorandom reading for `origin`.
Symbol make_reading(std::uint64_t seed, NodeId origin, std::size_t length);

/// Ideal Soliton mass at i for k source blocks: 1/k at i=1, 1/(i(i-1)) for
/// 2 <= i <= k, zero elsewhere.
double ideal_soliton_pmf(std::size_t k, std::size_t i);

/// Ideal Soliton CDF: 1/k + (1 - 1/i) for 1 <= i <= k.
double ideal_soliton_cdf(std::size_t k, std::size_t i);

/// Inverse-CDF draw from the Ideal Soliton distribution over 1..k. `u` must
/// lie in [0,1). Returns the smallest i with u < CDF(i).
std::size_t sample_ideal_soliton(std::size_t k, double u);

enum class PacketFlag : std::uint8_t { initial = 0, update = 1 };

struct Packet {
  NodeId origin = 0;
  Symbol data;
  std::uint32_t counter = 0;  // remaining hop budget
  PacketFlag flag = PacketFlag::initial;
};

Packet make_packet(NodeId origin, Symbol data, std::uint32_t counter);
/// Update packet carrying old ^ new.
Packet make_update_packet(NodeId origin, const Symbol& old_data, const Symbol& new_data,
                          std::uint32_t counter);

struct BufferSlot {
  Symbol accumulator;
  std::vector<NodeId> origins;  // sorted ascending

  bool empty() const noexcept { return origins.empty(); }
  bool contains(NodeId id) const;
};

/// m XOR-accumulator slots. Slot 0 holds the owner's reading and nothing
/// else; every foreign origin lives in at most one slot.
class NodeBuffer {
 public:
  NodeBuffer(std::size_t slots, NodeId owner, Symbol own_reading);

  std::size_t slot_count() const noexcept { return slots_.size(); }
  NodeId owner() const noexcept { return owner_; }
  const BufferSlot& slot(std::size_t index) const { return slots_.at(index); }
  std::span<const BufferSlot> slots() const noexcept { return slots_; }

  /// Slot holding `origin`, or -1 when it was never absorbed here.
  std::ptrdiff_t find_slot(NodeId origin) const;

  /// accumulator ^= packet.data. Initial packets register their origin in
  /// the slot; update packets must target the slot already holding it.
  void absorb(const Packet& packet, std::size_t slot);

  /// Replaces the owner's reading in slot 0.
  void rewrite_own(Symbol reading);

 private:
  NodeId owner_;
  std::vector<BufferSlot> slots_;
  std::unordered_map<NodeId, std::size_t> slot_of_;
};

/// Number of slots floor(M / c), at least 1 required.
std::size_t slot_count_for(std::size_t total_bytes, std::size_t slot_bytes);

}  // namespace floodstore
