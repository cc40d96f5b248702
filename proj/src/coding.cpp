#include "floodstore/coding.hpp"

#include <algorithm>
#include <cmath>

#include "floodstore/random.hpp"

namespace floodstore {

bool Symbol::is_zero() const noexcept {
  return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t b) { return b == 0; });
}

Symbol& Symbol::operator^=(const Symbol& other) {
  if (other.bytes_.size() != bytes_.size()) {
    throw std::invalid_argument("symbol length mismatch in xor");
  }
  for (std::size_t i = 0; i < bytes_.size(); ++i) bytes_[i] ^= other.bytes_[i];
  return *this;
}

std::string Symbol::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes_.size() * 2);
  for (std::uint8_t b : bytes_) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

Symbol make_reading(std::uint64_t seed, NodeId origin, std::size_t length) {
  std::vector<std::uint8_t> bytes(length);
  std::uint64_t state = derive_seed(seed, "reading", origin);
  for (std::size_t i = 0; i < length; ++i) {
    if (i % 8 == 0) state = mix64(state);
    bytes[i] = static_cast<std::uint8_t>(state >> (8 * (i % 8)));
  }
  if (length > 0 && std::all_of(bytes.begin(), bytes.end(), [](auto b) { return b == 0; })) {
    bytes[0] = 1;
  }
  return Symbol(std::move(bytes));
}

double ideal_soliton_pmf(std::size_t k, std::size_t i) {
  if (k == 0) throw std::invalid_argument("soliton needs k >= 1");
  if (i == 0 || i > k) return 0.0;
  if (i == 1) return 1.0 / static_cast<double>(k);
  const auto d = static_cast<double>(i);
  return 1.0 / (d * (d - 1.0));
}

double ideal_soliton_cdf(std::size_t k, std::size_t i) {
  if (k == 0) throw std::invalid_argument("soliton needs k >= 1");
  if (i == 0) return 0.0;
  if (i >= k) return 1.0;
  return 1.0 / static_cast<double>(k) + (1.0 - 1.0 / static_cast<double>(i));
}

std::size_t sample_ideal_soliton(std::size_t k, double u) {
  if (k == 0) throw std::invalid_argument("soliton needs k >= 1");
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("soliton draw needs u in [0,1)");
  if (k == 1) return 1;
  const double inv_k = 1.0 / static_cast<double>(k);
  if (u < inv_k) return 1;
  // Solve 1/k + 1 - 1/i > u for the smallest integer i, then settle any
  // rounding in the closed form against the CDF itself.
  const double bound = 1.0 / (1.0 + inv_k - u);
  auto i = static_cast<std::size_t>(std::min(std::floor(bound) + 1.0, static_cast<double>(k)));
  i = std::clamp<std::size_t>(i, 2, k);
  while (i > 2 && u < ideal_soliton_cdf(k, i - 1)) --i;
  while (i < k && u >= ideal_soliton_cdf(k, i)) ++i;
  return i;
}

Packet make_packet(NodeId origin, Symbol data, std::uint32_t counter) {
  return Packet{origin, std::move(data), counter, PacketFlag::initial};
}

Packet make_update_packet(NodeId origin, const Symbol& old_data, const Symbol& new_data,
                          std::uint32_t counter) {
  return Packet{origin, old_data ^ new_data, counter, PacketFlag::update};
}

bool BufferSlot::contains(NodeId id) const {
  return std::binary_search(origins.begin(), origins.end(), id);
}

NodeBuffer::NodeBuffer(std::size_t slots, NodeId owner, Symbol own_reading) : owner_(owner) {
  if (slots == 0) throw std::invalid_argument("a node buffer needs at least one slot");
  const std::size_t length = own_reading.size();
  slots_.resize(slots);
  for (auto& s : slots_) s.accumulator = Symbol::zero(length);
  slots_[0].accumulator = std::move(own_reading);
  slots_[0].origins = {owner};
  slot_of_.emplace(owner, 0);
}

std::ptrdiff_t NodeBuffer::find_slot(NodeId origin) const {
  const auto it = slot_of_.find(origin);
  return it == slot_of_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

void NodeBuffer::absorb(const Packet& packet, std::size_t slot) {
  if (slot >= slots_.size()) throw BufferError("slot index out of range");
  if (slot == 0) throw BufferError("slot 0 is reserved for the node's own reading");
  BufferSlot& target = slots_[slot];
  if (packet.flag == PacketFlag::initial) {
    if (slot_of_.contains(packet.origin)) {
      throw BufferError("origin " + std::to_string(packet.origin) + " already stored in buffer");
    }
    target.accumulator ^= packet.data;
    target.origins.insert(
        std::upper_bound(target.origins.begin(), target.origins.end(), packet.origin),
        packet.origin);
    slot_of_.emplace(packet.origin, slot);
  } else {
    if (!target.contains(packet.origin)) {
      throw BufferError("update for origin " + std::to_string(packet.origin) +
                        " not stored in slot " + std::to_string(slot));
    }
    target.accumulator ^= packet.data;
  }
}

void NodeBuffer::rewrite_own(Symbol reading) {
  if (reading.size() != slots_[0].accumulator.size()) {
    throw std::invalid_argument("symbol length mismatch in own-slot rewrite");
  }
  slots_[0].accumulator = std::move(reading);
}

std::size_t slot_count_for(std::size_t total_bytes, std::size_t slot_bytes) {
  if (slot_bytes == 0) throw std::invalid_argument("slot size c must be positive");
  const std::size_t m = total_bytes / slot_bytes;
  if (m == 0) throw std::invalid_argument("buffer size M must hold at least one slot of size c");
  return m;
}

}  // namespace floodstore
