#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <stdexcept>
#include <variant>
#include <vector>

#include "floodstore/coding.hpp"
#include "floodstore/random.hpp"
#include "floodstore/topology.hpp"

namespace floodstore {

/// Raised when an engine operation is called in the wrong phase or on a
/// node the protocol cannot serve (for example an isolated source).
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// DSA-I: every node knows the network size and sets its counter to
/// floor(n / d(u)).
struct Dsa1 {
  std::size_t n_known = 0;
};

/// DSA-II: counters are inferred from the two-hop neighbourhood and scaled
/// by c_u; no global size is used.
struct Dsa2 {
  double c_u = 2.0;
};

using AlgorithmVariant = std::variant<Dsa1, Dsa2>;

enum class RelayMode {
  single,      // one uniformly random neighbour per dequeued packet
  all_unseen,  // every neighbour that has not yet seen the origin
};

struct EngineOptions {
  AlgorithmVariant variant = Dsa1{};
  std::size_t slots = 1;
  RelayMode relay = RelayMode::single;
  /// Rounds allowed per run, as a multiple of n.
  std::size_t round_cap_factor = 50;
};

std::uint32_t init_counter_dsa1(std::size_t n, std::size_t degree);

/// c_u * floor((1/d(u)) * sum_{v in N(u)} b_v), floored to an integer, with
/// b_v = |N(v) \ (N(u) ∪ {u})|.
std::uint32_t infer_counter_dsa2(const GeometricGraph& g, NodeId u, double c_u);

/// Number of distinct nodes within two hops of u, excluding u.
std::size_t two_hop_count(const GeometricGraph& g, NodeId u);

struct InFlight {
  Packet packet;
  std::uint32_t hops = 0;  // links traversed by this copy so far
};

struct NodeState {
  NodeId id = 0;
  std::size_t acceptance_degree = 1;  // d_c, drawn from the Ideal Soliton
  std::uint32_t counter = 0;          // initial hop budget for this node's packets
  NodeBuffer buffer;
  std::vector<bool> seen;  // indexed by origin
  std::deque<InFlight> forward_queue;
};

struct DisseminationStats {
  std::uint64_t transmissions = 0;
  std::uint64_t rounds = 0;
  bool cap_hit = false;
  std::vector<std::uint64_t> absorbs_by_origin;
  std::vector<std::uint64_t> transmissions_by_origin;
  /// Relay-chain lengths: hops travelled by each copy when it stopped moving.
  std::uint64_t branches = 0;
  std::uint64_t branch_hops = 0;

  double mean_branch_length() const {
    return branches == 0 ? 0.0 : static_cast<double>(branch_hops) / static_cast<double>(branches);
  }
};

struct UpdateStats {
  std::uint64_t transmissions = 0;
  std::uint64_t rounds = 0;
  std::size_t slots_updated = 0;
  bool cap_hit = false;
};

/// One trial's protocol state. Owns its random stream; nothing is shared
/// with other engines except the immutable graph.
class Engine {
 public:
  Engine(std::shared_ptr<const GeometricGraph> graph, std::vector<Symbol> readings,
         EngineOptions options, std::uint64_t seed);

  const GeometricGraph& graph() const noexcept { return *graph_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const EngineOptions& options() const noexcept { return options_; }
  const NodeState& node(NodeId u) const { return nodes_.at(u); }
  /// Ground-truth current reading of `u`.
  const Symbol& reading(NodeId u) const { return readings_.at(u); }
  std::uint64_t round() const noexcept { return round_; }
  std::uint64_t transmissions() const noexcept { return transmissions_; }
  bool quiescent() const noexcept { return busy_nodes_ == 0; }
  const DisseminationStats& stats() const noexcept { return stats_; }

  /// Delivers the source's packet to every neighbour; each stores it with
  /// probability 1 and queues a relay copy if the counter allows.
  void initial_flood(NodeId source);
  void initial_flood_all();

  /// One synchronous round. Nodes holding packets at the start of the round
  /// each forward the head of their queue.
  void round_step();

  /// Runs rounds until quiescent. Requires every source to have flooded.
  DisseminationStats run_dissemination();

  /// initial_flood_all followed by run_dissemination.
  DisseminationStats disseminate();

  /// Replaces the source's reading and propagates old ^ new to every node
  /// holding the source in one of its slots. Runs to quiescence.
  UpdateStats apply_update(NodeId source, const Symbol& new_data);

  /// Slots whose accumulator differs from the XOR of the current readings
  /// of their origins.
  std::size_t audit() const;

 private:
  void enqueue(NodeId at, Packet packet, std::uint32_t hops);
  void deliver(NodeId to, const InFlight& copy);
  void deliver_update(NodeId to, const Packet& packet, std::uint32_t hops);
  std::size_t random_foreign_slot();
  std::uint64_t round_cap() const;
  void note_branch_end(std::uint32_t hops);

  std::shared_ptr<const GeometricGraph> graph_;
  EngineOptions options_;
  Rng rng_;
  std::vector<Symbol> readings_;
  std::vector<NodeState> nodes_;
  std::vector<bool> flooded_;
  std::size_t busy_nodes_ = 0;
  std::uint64_t round_ = 0;
  std::uint64_t transmissions_ = 0;
  DisseminationStats stats_;

  // Update propagation state, valid while apply_update runs.
  bool updating_ = false;
  std::vector<bool> update_applied_;
  std::vector<std::int64_t> update_best_forward_;
  UpdateStats update_stats_;
};

}  // namespace floodstore
