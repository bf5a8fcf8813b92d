#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tklu/handshake.hpp"

namespace tklu {

/// Identifies one stored key. `subject` is the peer id for pairwise and path
/// keys and the group id for group keys; `level` is the setup round of a
/// group-level key (0 otherwise).
struct StoreKey {
  KeyKind kind = KeyKind::Pairwise;
  std::uint32_t subject = 0;
  std::uint32_t level = 0;

  friend auto operator<=>(const StoreKey&, const StoreKey&) = default;
};

struct StoredKey {
  Digest bytes{};
  std::vector<NodeId> peers;  // every node that holds this key, sorted
  std::uint32_t epoch = 0;

  friend bool operator==(const StoredKey&, const StoredKey&) = default;
};

/// A node's key chain.
class KeyStore {
public:
  explicit KeyStore(NodeId owner) : owner_(owner) {}

  NodeId owner() const noexcept { return owner_; }

  /// Throws InvalidArgument on a second pairwise key for the same neighbour.
  /// Path and group entries are overwritten.
  void put(const StoreKey& key, StoredKey value);
  /// False if nothing was stored under `key`.
  bool remove(const StoreKey& key);
  std::optional<StoredKey> get(const StoreKey& key) const;

  std::size_t count(KeyKind kind) const;
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<StoreKey, StoredKey>& entries() const noexcept { return entries_; }

  /// Removes every entry whose peer set contains `node`; returns how many per kind.
  std::map<KeyKind, std::size_t> purge(NodeId node);
  /// Removes every group-level entry for `group`.
  std::size_t remove_group(std::uint32_t group);
  bool references(NodeId node) const;

  void clear() { entries_.clear(); }

private:
  NodeId owner_;
  std::map<StoreKey, StoredKey> entries_;
};

}  // namespace tklu
