#include "tklu/revocation.hpp"

#include <algorithm>
#include <stdexcept>

#include "tklu/hash.hpp"
#include "tklu/wire.hpp"

namespace tklu {

Bytes encode(const RevocationNotice& m) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(MsgType::Revocation));
  w.u32(m.sender);
  w.u32(m.revoked);
  w.raw(m.tag);
  return std::move(w).take();
}

RevocationNotice decode_revocation(ByteView wire) {
  ByteReader r(wire);
  if (r.u8() != static_cast<std::uint8_t>(MsgType::Revocation)) {
    throw Error(ErrorCode::DecodeError, "not a revocation notice");
  }
  RevocationNotice m;
  m.sender = r.u32();
  m.revoked = r.u32();
  m.tag = r.digest();
  r.expect_end();
  return m;
}

Digest revocation_tag(const Digest& sink_key, NodeId revoked) {
  ByteWriter w;
  w.raw(sink_key);
  w.u32(revoked);
  return hash_tag(label::kRevoke, w.bytes());
}

namespace {

bool holds(const StoredKey& k, NodeId v) { return std::binary_search(k.peers.begin(), k.peers.end(), v); }

std::size_t drop_kind(KeyStore& store, KeyKind kind, NodeId v) {
  std::vector<StoreKey> doomed;
  for (const auto& [key, val] : store.entries()) {
    if (key.kind == kind && holds(val, v)) doomed.push_back(key);
  }
  for (const auto& key : doomed) store.remove(key);
  return doomed.size();
}

void distribute(Network& net, const KeyTree& tree, const GroupKey& expect) {
  const auto pub = tree.public_view();
  const NodeId leader = sponsor_of(tree, tree.root());
  const Bytes wire = encode_broadcast(tree.curve(), pub, tree.root(), leader);
  for (MemberId m : tree.members()) {
    PublicTree view = m == leader ? pub : decode_broadcast(net.link().carry(leader, m, wire), tree.curve());
    if (member_compute_key(tree.curve(), view, m, tree.leaf_secret(m)) != expect) {
      throw std::logic_error("member " + std::to_string(m) + " disagrees on rekeyed group key");
    }
  }
}

}  // namespace

RevocationReport revoke(Network& net, NodeId v) {
  if (v >= net.size()) throw Error(ErrorCode::UnknownNode, "no node " + std::to_string(v));
  RevocationReport rep;
  rep.revoked = v;
  net.mark_revoked(v);

  for (NodeId u : net.topology().neighbors(v)) {
    rep.pairwise_removed += drop_kind(net.store(u), KeyKind::Pairwise, v);
  }

  std::vector<std::uint32_t> affected;
  for (const auto& [id, tree] : net.groups()) {
    if (tree.contains(v)) affected.push_back(id);
  }
  for (auto id : affected) {
    const KeyTree& tree = net.groups().at(id);
    if (tree.size() == 1) {
      net.dissolve_group(id);
      ++rep.groups_dissolved;
      continue;
    }
    auto [next, key] = group_rekey(tree, v, net.rng());
    distribute(net, next, key);
    rep.groups_rekeyed.push_back(next.epoch());
    net.install_group(id, std::move(next));
  }

  for (NodeId u = 0; u < net.size(); ++u) {
    if (u != v) rep.path_removed += drop_kind(net.store(u), KeyKind::Path, v);
  }

  const NodeId sink = net.sink();
  const auto& nbrs = net.topology().neighbors(v);
  NodeId reporter = sink;
  for (NodeId u : nbrs) {
    if (!net.revoked(u)) {
      reporter = u;
      break;
    }
  }
  RevocationNotice notice{reporter, v, revocation_tag(net.sink_key(), v)};
  if (reporter != sink) net.link().carry(reporter, sink, encode(notice));

  notice.sender = sink;
  std::size_t reached = 1;  // the sink audits its own store
  for (const auto& [kind, c] : net.store(sink).purge(v)) rep.audit_removed += c;
  net.scheduler().flood(sink, encode(notice));
  net.scheduler().run([&](const SimMessage& msg) {
    if (msg.dst == v || net.revoked(msg.dst)) return;
    const auto got = decode_revocation(msg.payload);
    if (!tags_equal(got.tag, revocation_tag(net.sink_key(), got.revoked))) return;
    ++reached;
    for (const auto& [kind, c] : net.store(msg.dst).purge(got.revoked)) rep.audit_removed += c;
  });
  rep.broadcast_reached = reached;

  rep.own_entries_cleared = net.store(v).size();
  net.store(v).clear();
  return rep;
}

std::uint32_t ceil_log2(std::uint64_t x) {
  std::uint32_t r = 0;
  while (r < 64 && (std::uint64_t{1} << r) < x) ++r;
  return r;
}

std::uint64_t predicted_keys(std::uint64_t k, std::uint64_t group_size) { return k + ceil_log2(group_size); }

std::vector<MemoryRow> memory_report(const Network& net) {
  std::vector<MemoryRow> rows;
  for (NodeId i = 0; i < net.size(); ++i) {
    MemoryRow row;
    row.node = i;
    row.degree = net.topology().degree(i);
    const auto& st = net.store(i);
    row.pairwise = st.count(KeyKind::Pairwise);
    row.group = st.count(KeyKind::Group);
    row.path = st.count(KeyKind::Path);
    row.prediction = row.degree;
    for (const auto& [id, tree] : net.groups()) {
      if (tree.contains(i)) {
        row.group_size += tree.size();
        row.prediction += ceil_log2(tree.size());
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tklu
