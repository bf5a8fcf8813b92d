#include "tklu/deployment.hpp"

#include <algorithm>

#include "tklu/hash.hpp"

namespace tklu {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t{words[0]} << 32) | words[1];
}

}  // namespace

std::unique_ptr<Network> Network::create(const DeploymentParams& params) {
  return create(gen_topology(params.nodes, params.radio_range, params.seed_topology), params);
}

std::unique_ptr<Network> Network::create(Topology topo, const DeploymentParams& params) {
  return std::unique_ptr<Network>(new Network(std::move(topo), params));
}

Network::Network(Topology topo, const DeploymentParams& params)
    : topo_(std::move(topo)),
      curve_(params.curve),
      master_(gen_master(topo_.size(), smallest_prime_geq(params.key_bound), mix(params.seed_protocol, 1))),
      revoked_(topo_.size(), false),
      rng_(mix(params.seed_protocol, 2)),
      sched_(topo_, params.latency),
      link_(sched_) {
  for (NodeId i = 0; i < topo_.size(); ++i) {
    shares_.push_back(assign_share(master_, i));
    stores_.emplace_back(i);
  }
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(mix(params.seed_protocol, 3)));
  w.u32(static_cast<std::uint32_t>(mix(params.seed_protocol, 3) >> 32));
  sink_key_ = hash_tag(label::kSinkKey, w.bytes());
}

NodeId Network::sink() const {
  for (NodeId i = 0; i < size(); ++i) {
    if (!revoked_[i]) return i;
  }
  throw Error(ErrorCode::UnknownNode, "every node is revoked");
}

SessionKey Network::establish_pairwise(NodeId a, NodeId b) {
  auto res = run_pairwise(share(a), share(b), link_);
  stores_.at(a).put({KeyKind::Pairwise, b, 0}, {res.initiator_key.bytes, res.initiator_key.peers, 0});
  stores_.at(b).put({KeyKind::Pairwise, a, 0}, {res.responder_key.bytes, res.responder_key.peers, 0});
  return res.initiator_key;
}

std::size_t Network::establish_all_pairwise() {
  std::size_t count = 0;
  for (NodeId a = 0; a < size(); ++a) {
    for (NodeId b : topo_.neighbors(a)) {
      if (a < b) {
        establish_pairwise(a, b);
        ++count;
      }
    }
  }
  return count;
}

SessionKey Network::establish_path(NodeId a, NodeId b) {
  auto res = run_path(share(a), share(b), curve_, rng_, link_);
  stores_.at(a).put({KeyKind::Path, b, 0}, {res.initiator_key.bytes, res.initiator_key.peers, 0});
  stores_.at(b).put({KeyKind::Path, a, 0}, {res.responder_key.bytes, res.responder_key.peers, 0});
  return res.initiator_key;
}

std::uint32_t Network::establish_group(const std::vector<NodeId>& members) {
  auto built = build_group(members, [this](MemberId m) -> const KeyShare& { return share(m); }, curve_, rng_, link_);
  const auto id = next_group_++;
  install_group(id, std::move(built.tree));
  return id;
}

void Network::install_group(std::uint32_t id, KeyTree tree) {
  if (auto it = groups_.find(id); it != groups_.end()) {
    for (MemberId m : it->second.members()) stores_.at(m).remove_group(id);
  }
  for (MemberId m : tree.members()) {
    const auto path = tree.path_by_round(m);
    const auto keys = tree.round_keys(m);
    for (std::size_t level = 0; level < path.size(); ++level) {
      std::vector<MemberId> peers;
      // Members under the level's node share this key.
      std::vector<int> stack{path[level]};
      while (!stack.empty()) {
        const auto& n = tree.node(stack.back());
        stack.pop_back();
        if (n.is_leaf()) {
          peers.push_back(*n.member);
        } else {
          stack.push_back(n.left);
          stack.push_back(n.right);
        }
      }
      stores_.at(m).put({KeyKind::Group, id, static_cast<std::uint32_t>(level + 1)}, {keys[level], peers, tree.epoch()});
    }
  }
  groups_.insert_or_assign(id, std::move(tree));
}

void Network::dissolve_group(std::uint32_t id) {
  auto it = groups_.find(id);
  if (it == groups_.end()) return;
  for (MemberId m : it->second.members()) stores_.at(m).remove_group(id);
  groups_.erase(it);
}

}  // namespace tklu
