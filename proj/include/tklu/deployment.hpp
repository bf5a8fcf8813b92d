#pragma once

// A simulated sensor field: base-station key material, per-node shares and
// key stores, established groups, and the scheduler all traffic goes through.

#include <map>
#include <memory>
#include <vector>

#include "tklu/ec.hpp"
#include "tklu/group_tree.hpp"
#include "tklu/key_matrix.hpp"
#include "tklu/key_store.hpp"
#include "tklu/sim.hpp"

namespace tklu {

struct DeploymentParams {
  std::size_t nodes = 12;
  std::uint64_t key_bound = std::uint64_t{1} << 30;  // q = smallest prime above this
  CurveParams curve;
  double radio_range = 0.5;
  std::uint64_t seed_topology = 1;
  std::uint64_t seed_protocol = 1;
  LatencyModel latency = LatencyModel::preset("mica2");
};

class Network {
public:
  /// Draws the topology from params.seed_topology and the key pool from
  /// params.seed_protocol.
  static std::unique_ptr<Network> create(const DeploymentParams& params);
  /// Uses a caller-supplied topology.
  static std::unique_ptr<Network> create(Topology topo, const DeploymentParams& params);

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  std::size_t size() const noexcept { return topo_.size(); }
  const Topology& topology() const noexcept { return topo_; }
  const CurveParams& curve() const noexcept { return curve_; }
  const MasterKeyMatrix& master() const noexcept { return master_; }
  const KeyShare& share(NodeId i) const { return shares_.at(i); }
  const KeyStore& store(NodeId i) const { return stores_.at(i); }
  KeyStore& store(NodeId i) { return stores_.at(i); }
  const std::vector<KeyStore>& stores() const noexcept { return stores_; }
  Scheduler& scheduler() noexcept { return sched_; }
  SimLink& link() noexcept { return link_; }
  Rng& rng() noexcept { return rng_; }

  bool revoked(NodeId i) const { return revoked_.at(i); }
  void mark_revoked(NodeId i) { revoked_.at(i) = true; }
  /// Base-station endpoint: lowest-id node that has not been revoked.
  NodeId sink() const;
  /// Tag key for sink notices.
  const Digest& sink_key() const noexcept { return sink_key_; }

  /// Runs the pairwise handshake (a initiates) and stores the key at both ends.
  SessionKey establish_pairwise(NodeId a, NodeId b);
  /// Pairwise keys for every adjacent pair, in (lower id, higher id) order.
  std::size_t establish_all_pairwise();
  SessionKey establish_path(NodeId a, NodeId b);
  /// Builds a group and stores each member's per-round keys. Returns the group id.
  std::uint32_t establish_group(const std::vector<NodeId>& members);

  const std::map<std::uint32_t, KeyTree>& groups() const noexcept { return groups_; }
  /// Replaces a group's tree and rewrites every member's group entries.
  void install_group(std::uint32_t id, KeyTree tree);
  void dissolve_group(std::uint32_t id);

private:
  Network(Topology topo, const DeploymentParams& params);

  Topology topo_;
  CurveParams curve_;
  MasterKeyMatrix master_;
  std::vector<KeyShare> shares_;
  std::vector<KeyStore> stores_;
  std::vector<bool> revoked_;
  std::map<std::uint32_t, KeyTree> groups_;
  std::uint32_t next_group_ = 1;
  Digest sink_key_{};
  Rng rng_;
  Scheduler sched_;
  SimLink link_;
};

}  // namespace tklu
