#include "tklu/key_store.hpp"

#include <algorithm>

namespace tklu {

void KeyStore::put(const StoreKey& key, StoredKey value) {
  if (key.kind == KeyKind::Pairwise && entries_.count(key)) {
    throw Error(ErrorCode::InvalidArgument, "pairwise key for neighbour " + std::to_string(key.subject) + " already stored");
  }
  std::sort(value.peers.begin(), value.peers.end());
  entries_.insert_or_assign(key, std::move(value));
}

bool KeyStore::remove(const StoreKey& key) { return entries_.erase(key) > 0; }

std::optional<StoredKey> KeyStore::get(const StoreKey& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::size_t KeyStore::count(KeyKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first.kind == kind; }));
}

std::map<KeyKind, std::size_t> KeyStore::purge(NodeId node) {
  std::map<KeyKind, std::size_t> removed;
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (std::binary_search(it->second.peers.begin(), it->second.peers.end(), node)) {
      ++removed[it->first.kind];
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
  return removed;
}

std::size_t KeyStore::remove_group(std::uint32_t group) {
  std::size_t n = 0;
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (it->first.kind == KeyKind::Group && it->first.subject == group) {
      it = entries_.erase(it);
      ++n;
    } else {
      ++it;
    }
  }
  return n;
}

bool KeyStore::references(NodeId node) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) {
    return std::binary_search(e.second.peers.begin(), e.second.peers.end(), node);
  });
}

}  // namespace tklu
