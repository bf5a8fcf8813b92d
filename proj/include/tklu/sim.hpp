#pragma once

// Deterministic discrete-event network simulator: random geometric
// topologies, shortest-hop routing and a latency model.

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "tklu/bytes.hpp"
#include "tklu/handshake.hpp"
#include "tklu/key_matrix.hpp"

namespace tklu {

struct Position {
  double x = 0;
  double y = 0;
};

class Topology {
public:
  /// Builds from an explicit undirected edge list (positions left at origin).
  static Topology from_edges(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges);

  std::size_t size() const noexcept { return adjacency_.size(); }
  double radio_range() const noexcept { return radio_range_; }
  const std::vector<Position>& positions() const noexcept { return positions_; }
  /// Sorted ascending.
  const std::vector<NodeId>& neighbors(NodeId i) const { return adjacency_.at(i); }
  std::size_t degree(NodeId i) const { return neighbors(i).size(); }
  bool adjacent(NodeId a, NodeId b) const;
  std::size_t edge_count() const;
  double mean_degree() const;
  std::size_t min_degree() const;
  std::size_t max_degree() const;
  bool connected() const;
  /// Generation attempts used by gen_topology (1 if the first draw was connected).
  std::uint32_t attempts() const noexcept { return attempts_; }

  /// Hop distances from `src`; unreachable entries are SIZE_MAX.
  std::vector<std::size_t> hop_distances(NodeId src) const;
  /// SHA-256 over the edge list, hex. Stable across runs for equal topologies.
  std::string fingerprint() const;

private:
  friend Topology gen_topology(std::size_t, double, std::uint64_t, std::uint32_t);
  Topology() = default;

  std::vector<Position> positions_;
  std::vector<std::vector<NodeId>> adjacency_;
  double radio_range_ = 0;
  std::uint32_t attempts_ = 1;
};

/// Uniform positions in the unit square, edges where distance <= radio_range.
/// Redraws with a derived seed until connected; throws Disconnected after
/// `max_attempts` draws.
Topology gen_topology(std::size_t n, double radio_range, std::uint64_t seed, std::uint32_t max_attempts = 1000);

/// Shortest path by hop count; among equal-length paths, the one taking the
/// smallest node id at each step. Throws Unreachable.
std::vector<NodeId> route(const Topology& topo, NodeId s, NodeId t);

/// Delivery delay = per_message + hops * per_hop + bytes * per_byte (seconds).
struct LatencyModel {
  std::string name = "custom";
  double per_message = 0;
  double per_hop = 0;
  double per_byte = 0;

  /// "zero", "mica2" (default) or "radio". Throws InvalidArgument otherwise.
  static LatencyModel preset(const std::string& name);
  static std::vector<std::string> preset_names();
  double delay(std::size_t hops, std::size_t bytes) const {
    return per_message + static_cast<double>(hops) * per_hop + static_cast<double>(bytes) * per_byte;
  }
};

struct SimMessage {
  std::uint64_t seq = 0;
  NodeId src = 0;
  NodeId dst = 0;
  Bytes payload;
  std::vector<NodeId> hop_path;
  double enqueue_time = 0;
  double deliver_time = 0;

  std::size_t hops() const noexcept { return hop_path.empty() ? 0 : hop_path.size() - 1; }
};

struct TraceEvent {
  double time = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::string type;
  std::size_t hops = 0;
  std::size_t bytes = 0;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct EventTrace {
  std::vector<TraceEvent> events;
  std::uint64_t messages = 0;
  std::uint64_t link_transmissions = 0;
  std::uint64_t bytes = 0;
  double completion_time = 0;

  /// Counters recomputed from `events` match the stored ones.
  bool consistent() const;
  std::string to_jsonl() const;
  /// Header plus one row: messages,link_transmissions,bytes,completion_time.
  std::string summary_csv() const;

  friend bool operator==(const EventTrace&, const EventTrace&) = default;
};

/// Single-threaded event queue ordered by (deliver time, sequence number).
class Scheduler {
public:
  using Handler = std::function<void(const SimMessage&)>;

  Scheduler(const Topology& topo, LatencyModel model) : topo_(&topo), model_(std::move(model)) {}

  double now() const noexcept { return now_; }
  const LatencyModel& model() const noexcept { return model_; }
  const Topology& topology() const noexcept { return *topo_; }

  /// Routes and enqueues; delivery at enqueue time + model delay.
  std::uint64_t send(NodeId src, NodeId dst, Bytes payload);
  /// Floods from `src` with duplicate suppression; every node forwards once.
  /// Returns the number of nodes reached, src excluded.
  std::size_t flood(NodeId src, const Bytes& payload);
  /// Delivers every pending message in order, advancing the clock.
  void run(const Handler& on_deliver = {});

  const EventTrace& trace() const noexcept { return trace_; }

private:
  struct Later {
    bool operator()(const SimMessage& a, const SimMessage& b) const {
      if (a.deliver_time != b.deliver_time) return a.deliver_time > b.deliver_time;
      return a.seq > b.seq;
    }
  };

  void enqueue(SimMessage msg);

  const Topology* topo_;
  LatencyModel model_;
  std::priority_queue<SimMessage, std::vector<SimMessage>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0;
  EventTrace trace_;
};

/// Link that runs each message to delivery before returning it, so protocol
/// steps execute one at a time and the clock measures their total duration.
class SimLink final : public Link {
public:
  explicit SimLink(Scheduler& sched) : sched_(&sched) {}

  Bytes carry(NodeId from, NodeId to, Bytes wire) override;
  void broadcast(NodeId from, Bytes wire) override;

  /// End-to-end messages carried (floods counted once).
  std::uint64_t messages() const noexcept { return messages_; }

private:
  Scheduler* sched_;
  std::uint64_t messages_ = 0;
};

}  // namespace tklu
