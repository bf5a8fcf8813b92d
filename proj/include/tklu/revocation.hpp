#pragma once

#include <cstdint>
#include <vector>

#include "tklu/deployment.hpp"

namespace tklu {

struct RevocationNotice {
  NodeId sender = 0;
  NodeId revoked = 0;
  Digest tag{};
};

Bytes encode(const RevocationNotice& m);
RevocationNotice decode_revocation(ByteView wire);
Digest revocation_tag(const Digest& sink_key, NodeId revoked);

struct RevocationReport {
  NodeId revoked = 0;
  std::size_t pairwise_removed = 0;  // neighbour entries dropped
  std::size_t path_removed = 0;
  std::vector<std::uint32_t> groups_rekeyed;  // new epoch per rekeyed group
  std::size_t groups_dissolved = 0;
  std::size_t broadcast_reached = 0;  // surviving nodes that received the sink notice
  std::size_t audit_removed = 0;      // leftovers caught by the network-wide audit
  std::size_t own_entries_cleared = 0;

  friend bool operator==(const RevocationReport&, const RevocationReport&) = default;
};

/// Neighbours drop pairwise keys, groups containing v are rekeyed by their
/// leader, path-key holders drop theirs, then the sink floods a notice and
/// every node audits its store. Throws UnknownNode.
RevocationReport revoke(Network& net, NodeId v);

std::uint32_t ceil_log2(std::uint64_t x);

/// k + ceil(log2 group_size).
std::uint64_t predicted_keys(std::uint64_t k, std::uint64_t group_size);

struct MemoryRow {
  NodeId node = 0;
  std::size_t degree = 0;
  std::size_t pairwise = 0;
  std::size_t group = 0;
  std::size_t path = 0;
  std::size_t group_size = 0;  // summed over the node's groups
  std::uint64_t prediction = 0;

  std::uint64_t actual() const noexcept { return pairwise + group; }
  bool exceeds() const noexcept { return actual() > prediction; }
};

/// One row per node. Prediction is degree plus ceil(log2 size) of each group
/// the node belongs to; path keys are counted but not predicted.
std::vector<MemoryRow> memory_report(const Network& net);

}  // namespace tklu
