#include "floodstore/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace floodstore {

std::uint32_t init_counter_dsa1(std::size_t n, std::size_t degree) {
  if (degree == 0) throw ProtocolError("isolated node has no counter");
  return static_cast<std::uint32_t>(n / degree);
}

std::uint32_t infer_counter_dsa2(const GeometricGraph& g, NodeId u, double c_u) {
  if (!(c_u > 0.0) || !std::isfinite(c_u)) throw InvalidParameter("c_u must be positive");
  const auto nu = g.neighbors(u);
  if (nu.empty()) throw ProtocolError("isolated node has no counter");
  std::size_t sum = 0;
  for (NodeId v : nu) {
    for (NodeId w : g.neighbors(v)) {
      if (w != u && !std::binary_search(nu.begin(), nu.end(), w)) ++sum;
    }
  }
  const std::size_t mean_floor = sum / nu.size();
  return static_cast<std::uint32_t>(std::floor(c_u * static_cast<double>(mean_floor)));
}

std::size_t two_hop_count(const GeometricGraph& g, NodeId u) {
  std::vector<bool> mark(g.size(), false);
  mark[u] = true;
  std::size_t count = 0;
  for (NodeId v : g.neighbors(u)) {
    if (!mark[v]) {
      mark[v] = true;
      ++count;
    }
    for (NodeId w : g.neighbors(v)) {
      if (!mark[w]) {
        mark[w] = true;
        ++count;
      }
    }
  }
  return count;
}

Engine::Engine(std::shared_ptr<const GeometricGraph> graph, std::vector<Symbol> readings,
               EngineOptions options, std::uint64_t seed)
    : graph_(std::move(graph)), options_(options), rng_(seed), readings_(std::move(readings)) {
  if (!graph_) throw InvalidParameter("engine needs a graph");
  const std::size_t n = graph_->size();
  if (readings_.size() != n) throw InvalidParameter("need exactly one reading per node");
  if (options_.slots == 0) throw InvalidParameter("buffers need at least one slot");
  for (const auto& r : readings_) {
    if (r.size() != readings_.front().size()) {
      throw InvalidParameter("all readings must have the same length");
    }
  }
  if (const auto* dsa1 = std::get_if<Dsa1>(&options_.variant); dsa1 && dsa1->n_known != n) {
    throw InvalidParameter("DSA-I requires n_known to equal the network size");
  }
  if (const auto* dsa2 = std::get_if<Dsa2>(&options_.variant);
      dsa2 && (!(dsa2->c_u > 0.0) || !std::isfinite(dsa2->c_u))) {
    throw InvalidParameter("DSA-II scale c_u must be positive");
  }

  nodes_.reserve(n);
  for (NodeId u = 0; u < n; ++u) {
    const std::size_t d = graph_->neighbors(u).size();
    std::size_t soliton_k = n;
    std::uint32_t counter = 0;
    if (const auto* dsa2 = std::get_if<Dsa2>(&options_.variant)) {
      soliton_k = 1 + two_hop_count(*graph_, u);
      if (d > 0) counter = infer_counter_dsa2(*graph_, u, dsa2->c_u);
    } else if (d > 0) {
      counter = init_counter_dsa1(n, d);
    }
    NodeState state{u, sample_ideal_soliton(soliton_k, rng_.uniform01()), counter,
                    NodeBuffer(options_.slots, u, readings_[u]), std::vector<bool>(n, false), {}};
    state.seen[u] = true;
    nodes_.push_back(std::move(state));
  }
  flooded_.assign(n, false);
  stats_.absorbs_by_origin.assign(n, 0);
  stats_.transmissions_by_origin.assign(n, 0);
}

std::size_t Engine::random_foreign_slot() {
  return 1 + static_cast<std::size_t>(rng_.below(options_.slots - 1));
}

std::uint64_t Engine::round_cap() const {
  return static_cast<std::uint64_t>(options_.round_cap_factor) * nodes_.size();
}

void Engine::note_branch_end(std::uint32_t hops) {
  if (updating_) return;
  ++stats_.branches;
  stats_.branch_hops += hops;
}

void Engine::enqueue(NodeId at, Packet packet, std::uint32_t hops) {
  auto& queue = nodes_[at].forward_queue;
  if (queue.empty()) ++busy_nodes_;
  queue.push_back(InFlight{std::move(packet), hops});
}

void Engine::initial_flood(NodeId source) {
  if (source >= nodes_.size()) throw std::out_of_range("unknown source node");
  if (flooded_[source]) throw ProtocolError("source already flooded");
  const auto neighbors = graph_->neighbors(source);
  if (neighbors.empty()) throw ProtocolError("isolated source cannot flood");
  flooded_[source] = true;

  const std::uint32_t counter = nodes_[source].counter;
  for (NodeId v : neighbors) {
    ++transmissions_;
    ++stats_.transmissions;
    ++stats_.transmissions_by_origin[source];
    NodeState& target = nodes_[v];
    if (!target.seen[source]) {
      target.seen[source] = true;
      if (options_.slots > 1) {
        target.buffer.absorb(make_packet(source, readings_[source], counter),
                             random_foreign_slot());
        ++stats_.absorbs_by_origin[source];
      }
    }
    if (counter >= 1) {
      enqueue(v, make_packet(source, readings_[source], counter - 1), 1);
    } else {
      note_branch_end(1);
    }
  }
}

void Engine::initial_flood_all() {
  for (NodeId u = 0; u < nodes_.size(); ++u) {
    if (!flooded_[u]) initial_flood(u);
  }
}

void Engine::deliver(NodeId to, const InFlight& copy) {
  const Packet& packet = copy.packet;
  const std::uint32_t hops = copy.hops + 1;
  NodeState& target = nodes_[to];
  if (!target.seen[packet.origin]) {
    target.seen[packet.origin] = true;
    const double coin = rng_.uniform01();
    if (coin <= 1.0 / static_cast<double>(target.acceptance_degree) && options_.slots > 1) {
      target.buffer.absorb(packet, random_foreign_slot());
      ++stats_.absorbs_by_origin[packet.origin];
    }
  }
  if (packet.counter >= 1) {
    Packet relay = packet;
    relay.counter -= 1;
    enqueue(to, std::move(relay), hops);
  } else {
    note_branch_end(hops);
  }
}

void Engine::deliver_update(NodeId to, const Packet& packet, std::uint32_t hops) {
  if (!update_applied_[to]) {
    update_applied_[to] = true;
    const auto slot = nodes_[to].buffer.find_slot(packet.origin);
    if (slot > 0) {
      nodes_[to].buffer.absorb(packet, static_cast<std::size_t>(slot));
      ++update_stats_.slots_updated;
    }
  }
  if (packet.counter >= 1 &&
      static_cast<std::int64_t>(packet.counter) - 1 > update_best_forward_[to]) {
    update_best_forward_[to] = static_cast<std::int64_t>(packet.counter) - 1;
    Packet relay = packet;
    relay.counter -= 1;
    enqueue(to, std::move(relay), hops);
  }
}

void Engine::round_step() {
  if (quiescent()) throw ProtocolError("round_step on a quiescent engine");
  std::vector<NodeId> active;
  active.reserve(busy_nodes_);
  for (NodeId u = 0; u < nodes_.size(); ++u) {
    if (!nodes_[u].forward_queue.empty()) active.push_back(u);
  }

  for (NodeId u : active) {
    auto& queue = nodes_[u].forward_queue;
    InFlight copy = std::move(queue.front());
    queue.pop_front();
    if (queue.empty()) --busy_nodes_;

    const auto neighbors = graph_->neighbors(u);
    const NodeId origin = copy.packet.origin;
    if (updating_) {
      // Updates flood every neighbour so that each holder is reached.
      for (NodeId v : neighbors) {
        ++transmissions_;
        ++update_stats_.transmissions;
        deliver_update(v, copy.packet, copy.hops + 1);
      }
    } else if (options_.relay == RelayMode::single) {
      const NodeId v = neighbors[rng_.below(neighbors.size())];
      ++transmissions_;
      ++stats_.transmissions;
      ++stats_.transmissions_by_origin[origin];
      deliver(v, copy);
    } else {
      bool sent = false;
      for (NodeId v : neighbors) {
        if (nodes_[v].seen[origin]) continue;
        sent = true;
        ++transmissions_;
        ++stats_.transmissions;
        ++stats_.transmissions_by_origin[origin];
        deliver(v, copy);
      }
      if (!sent) note_branch_end(copy.hops);
    }
  }
  ++round_;
}

DisseminationStats Engine::run_dissemination() {
  if (std::find(flooded_.begin(), flooded_.end(), false) != flooded_.end()) {
    throw ProtocolError("run_dissemination before every source flooded");
  }
  const std::uint64_t cap = round_cap();
  std::uint64_t rounds = 0;
  while (!quiescent() && rounds < cap) {
    round_step();
    ++rounds;
  }
  stats_.rounds += rounds;
  stats_.cap_hit = !quiescent();
  return stats_;
}

DisseminationStats Engine::disseminate() {
  initial_flood_all();
  return run_dissemination();
}

UpdateStats Engine::apply_update(NodeId source, const Symbol& new_data) {
  if (source >= nodes_.size()) throw std::out_of_range("unknown source node");
  if (!flooded_[source] || !quiescent()) {
    throw ProtocolError("update before the source's dissemination completed");
  }
  if (new_data.size() != readings_[source].size()) {
    throw InvalidParameter("update symbol length mismatch");
  }
  const std::size_t n = nodes_.size();
  const std::uint32_t counter = nodes_[source].counter;
  const Packet packet = make_update_packet(source, readings_[source], new_data, counter);

  readings_[source] = new_data;
  nodes_[source].buffer.rewrite_own(new_data);

  updating_ = true;
  update_stats_ = {};
  update_applied_.assign(n, false);
  update_applied_[source] = true;
  update_best_forward_.assign(n, -1);
  update_best_forward_[source] = counter;

  for (NodeId v : graph_->neighbors(source)) {
    ++transmissions_;
    ++update_stats_.transmissions;
    deliver_update(v, packet, 1);
  }
  const std::uint64_t cap = round_cap();
  while (!quiescent() && update_stats_.rounds < cap) {
    round_step();
    ++update_stats_.rounds;
  }
  update_stats_.cap_hit = !quiescent();
  updating_ = false;
  return update_stats_;
}

std::size_t Engine::audit() const {
  std::size_t violations = 0;
  for (const NodeState& state : nodes_) {
    for (const BufferSlot& slot : state.buffer.slots()) {
      Symbol expected = Symbol::zero(slot.accumulator.size());
      for (NodeId origin : slot.origins) expected ^= readings_[origin];
      if (!(expected == slot.accumulator)) ++violations;
    }
  }
  return violations;
}

}  // namespace floodstore
