#include "tklu/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <random>
#include <sstream>

#include "tklu/errors.hpp"
#include "tklu/hash.hpp"
#include "tklu/wire.hpp"

namespace tklu {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

std::string type_name(const Bytes& payload) {
  try {
    return to_string(peek_type(payload));
  } catch (const Error&) {
    return "raw";
  }
}

std::string fmt_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

}  // namespace

// ---- topology ---------------------------------------------------------------

Topology Topology::from_edges(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  Topology t;
  t.positions_.assign(n, Position{});
  t.adjacency_.assign(n, {});
  for (auto [a, b] : edges) {
    if (a >= n || b >= n || a == b) throw Error(ErrorCode::InvalidArgument, "bad edge");
    t.adjacency_[a].push_back(b);
    t.adjacency_[b].push_back(a);
  }
  for (auto& adj : t.adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return t;
}

bool Topology::adjacent(NodeId a, NodeId b) const {
  const auto& adj = neighbors(a);
  return std::binary_search(adj.begin(), adj.end(), b);
}

std::size_t Topology::edge_count() const {
  std::size_t sum = 0;
  for (const auto& adj : adjacency_) sum += adj.size();
  return sum / 2;
}

double Topology::mean_degree() const {
  return adjacency_.empty() ? 0.0 : 2.0 * static_cast<double>(edge_count()) / static_cast<double>(size());
}

std::size_t Topology::min_degree() const {
  std::size_t m = kUnreached;
  for (const auto& adj : adjacency_) m = std::min(m, adj.size());
  return adjacency_.empty() ? 0 : m;
}

std::size_t Topology::max_degree() const {
  std::size_t m = 0;
  for (const auto& adj : adjacency_) m = std::max(m, adj.size());
  return m;
}

std::vector<std::size_t> Topology::hop_distances(NodeId src) const {
  std::vector<std::size_t> dist(size(), kUnreached);
  if (src >= size()) return dist;
  std::deque<NodeId> frontier{src};
  dist[src] = 0;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v : adjacency_[u]) {
      if (dist[v] == kUnreached) {
        dist[v] = dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

bool Topology::connected() const {
  if (size() <= 1) return true;
  const auto dist = hop_distances(0);
  return std::none_of(dist.begin(), dist.end(), [](std::size_t d) { return d == kUnreached; });
}

std::string Topology::fingerprint() const {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(size()));
  for (NodeId a = 0; a < size(); ++a) {
    for (NodeId b : adjacency_[a]) {
      if (a < b) {
        w.u32(a);
        w.u32(b);
      }
    }
  }
  return to_hex(hash_tag("TOPOLOGY", w.bytes()));
}

Topology gen_topology(std::size_t n, double radio_range, std::uint64_t seed, std::uint32_t max_attempts) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "topology needs at least one node");
  if (!(radio_range > 0) || radio_range > std::sqrt(2.0) + 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "radio range must lie in (0, sqrt(2)]");
  }
  for (std::uint32_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), attempt};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> coord(0.0, 1.0);
    Topology t;
    t.radio_range_ = radio_range;
    t.attempts_ = attempt + 1;
    t.positions_.resize(n);
    for (auto& p : t.positions_) {
      p.x = coord(rng);
      p.y = coord(rng);
    }
    t.adjacency_.assign(n, {});
    const double r2 = radio_range * radio_range;
    for (NodeId a = 0; a < n; ++a) {
      for (NodeId b = a + 1; b < n; ++b) {
        const double dx = t.positions_[a].x - t.positions_[b].x;
        const double dy = t.positions_[a].y - t.positions_[b].y;
        if (dx * dx + dy * dy <= r2) {
          t.adjacency_[a].push_back(b);
          t.adjacency_[b].push_back(a);
        }
      }
    }
    if (t.connected()) return t;
  }
  throw Error(ErrorCode::Disconnected, "no connected topology within " + std::to_string(max_attempts) + " attempts");
}

std::vector<NodeId> route(const Topology& topo, NodeId s, NodeId t) {
  if (s >= topo.size() || t >= topo.size()) throw Error(ErrorCode::UnknownNode, "route endpoint outside topology");
  const auto to_target = topo.hop_distances(t);
  if (to_target[s] == kUnreached) throw Error(ErrorCode::Unreachable, "no path " + std::to_string(s) + "->" + std::to_string(t));
  std::vector<NodeId> path{s};
  for (NodeId cur = s; cur != t;) {
    // Neighbours are sorted, so the first one a hop closer is the smallest id.
    for (NodeId v : topo.neighbors(cur)) {
      if (to_target[v] + 1 == to_target[cur]) {
        cur = v;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

// ---- latency / trace --------------------------------------------------------

LatencyModel LatencyModel::preset(const std::string& name) {
  if (name == "zero") return {"zero", 0, 0, 0};
  // One message ~ 0.07 s end to end: a 2-node pairwise exchange takes 0.21 s.
  if (name == "mica2") return {"mica2", 0.07, 0, 0};
  // 19.2 kbit/s radio: per-byte airtime plus fixed processing and per-hop costs.
  if (name == "radio") return {"radio", 0.02, 0.01, 8.0 / 19200.0};
  throw Error(ErrorCode::InvalidArgument, "unknown latency preset '" + name + "'");
}

std::vector<std::string> LatencyModel::preset_names() { return {"zero", "mica2", "radio"}; }

bool EventTrace::consistent() const {
  std::uint64_t links = 0, total_bytes = 0;
  double last = 0;
  for (const auto& e : events) {
    links += e.hops;
    total_bytes += e.bytes;
    last = std::max(last, e.time);
  }
  return messages == events.size() && link_transmissions == links && bytes == total_bytes && completion_time == last;
}

std::string EventTrace::to_jsonl() const {
  std::ostringstream out;
  for (const auto& e : events) {
    out << "{\"time\":" << fmt_time(e.time) << ",\"src\":" << e.src << ",\"dst\":" << e.dst << ",\"type\":\"" << e.type
        << "\",\"hops\":" << e.hops << ",\"bytes\":" << e.bytes << "}\n";
  }
  return out.str();
}

std::string EventTrace::summary_csv() const {
  std::ostringstream out;
  out << "messages,link_transmissions,bytes,completion_time\n";
  out << messages << ',' << link_transmissions << ',' << bytes << ',' << fmt_time(completion_time) << '\n';
  return out.str();
}

// ---- scheduler --------------------------------------------------------------

void Scheduler::enqueue(SimMessage msg) {
  msg.seq = next_seq_++;
  queue_.push(std::move(msg));
}

std::uint64_t Scheduler::send(NodeId src, NodeId dst, Bytes payload) {
  SimMessage msg;
  msg.src = src;
  msg.dst = dst;
  msg.hop_path = route(*topo_, src, dst);
  msg.enqueue_time = now_;
  msg.deliver_time = now_ + model_.delay(msg.hops(), payload.size());
  msg.payload = std::move(payload);
  const auto seq = next_seq_;
  enqueue(std::move(msg));
  return seq;
}

std::size_t Scheduler::flood(NodeId src, const Bytes& payload) {
  const auto dist = topo_->hop_distances(src);
  const double hop_delay = model_.delay(1, payload.size());
  // Each node's first copy arrives from its smallest-id neighbour one level closer.
  std::size_t reached = 0;
  for (NodeId v = 0; v < topo_->size(); ++v) {
    if (v == src || dist[v] == kUnreached) continue;
    for (NodeId u : topo_->neighbors(v)) {
      if (dist[u] + 1 == dist[v]) {
        SimMessage msg;
        msg.src = u;
        msg.dst = v;
        msg.hop_path = {u, v};
        msg.enqueue_time = now_;
        msg.deliver_time = now_ + static_cast<double>(dist[v]) * hop_delay;
        msg.payload = payload;
        enqueue(std::move(msg));
        ++reached;
        break;
      }
    }
  }
  return reached;
}

void Scheduler::run(const Handler& on_deliver) {
  while (!queue_.empty()) {
    SimMessage msg = queue_.top();
    queue_.pop();
    now_ = std::max(now_, msg.deliver_time);
    trace_.events.push_back({msg.deliver_time, msg.src, msg.dst, type_name(msg.payload), msg.hops(), msg.payload.size()});
    trace_.messages += 1;
    trace_.link_transmissions += msg.hops();
    trace_.bytes += msg.payload.size();
    trace_.completion_time = std::max(trace_.completion_time, msg.deliver_time);
    if (on_deliver) on_deliver(msg);
  }
}

Bytes SimLink::carry(NodeId from, NodeId to, Bytes wire) {
  Bytes delivered;
  sched_->send(from, to, std::move(wire));
  sched_->run([&](const SimMessage& m) { delivered = m.payload; });
  ++messages_;
  return delivered;
}

void SimLink::broadcast(NodeId from, Bytes wire) {
  sched_->flood(from, wire);
  sched_->run();
  ++messages_;
}

}  // namespace tklu
