#pragma once

// Tree-based group key agreement on top of the pairwise exchange.
//
// Round 1 pairs members (M1,M2), (M3,M4), ... ; each pair runs the pairwise
// handshake and both leaves take secret s = H2S("GRPLEAF", pairwise key). A
// trailing odd member keeps a fresh random leaf secret. Later rounds merge
// adjacent groups; a merged node's secret is H2S("GRPNODE", s_left * B_right),
// where B = s * P is the public blinded key. A group carried through a round
// unchanged picks up the new round's label (T13 -> T22).

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tklu/ec.hpp"
#include "tklu/handshake.hpp"
#include "tklu/key_matrix.hpp"

namespace tklu {

using MemberId = NodeId;

/// Group coordinate T_{round,index}, both 1-based.
struct TreeLabel {
  std::uint16_t round = 0;
  std::uint16_t index = 0;

  std::string str() const;
  friend bool operator==(const TreeLabel&, const TreeLabel&) = default;
};

struct GroupNode {
  std::vector<TreeLabel> labels;  // every name this node has carried, oldest first
  std::optional<MemberId> member;  // set iff leaf
  int parent = -1;
  int left = -1;
  int right = -1;
  std::optional<Scalar> secret;  // absent in public views
  std::optional<CurvePoint> blinded;

  bool is_leaf() const noexcept { return member.has_value(); }
  /// First round in which this node was a group; 0 for unlabelled leaves.
  std::uint16_t first_round() const noexcept { return labels.empty() ? 0 : labels.front().round; }
};

struct GroupKey {
  Digest bytes{};
  std::uint32_t epoch = 0;
  std::vector<MemberId> members;

  friend bool operator==(const GroupKey&, const GroupKey&) = default;
};

struct RoundGroup {
  TreeLabel label;
  std::vector<MemberId> members;
};

/// Tree shape plus blinded keys: what sponsors broadcast. No secrets.
class PublicTree {
public:
  PublicTree(std::vector<GroupNode> nodes, int root, std::uint32_t epoch);

  const std::vector<GroupNode>& nodes() const noexcept { return nodes_; }
  std::vector<GroupNode>& mutable_nodes() noexcept { return nodes_; }
  const GroupNode& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  int root() const noexcept { return root_; }
  std::uint32_t epoch() const noexcept { return epoch_; }
  /// Leaf index of `m`, or -1.
  int leaf_of(MemberId m) const;
  /// Members left to right.
  std::vector<MemberId> members() const;

private:
  std::vector<GroupNode> nodes_;
  int root_;
  std::uint32_t epoch_;
};

/// Coordinator view of a group: full tree including every node secret.
class KeyTree {
public:
  KeyTree(CurveParams curve, std::vector<GroupNode> nodes, int root, std::uint32_t height, std::uint32_t epoch,
          std::vector<std::vector<RoundGroup>> rounds);

  const CurveParams& curve() const noexcept { return curve_; }
  const std::vector<GroupNode>& nodes() const noexcept { return nodes_; }
  const GroupNode& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  int root() const noexcept { return root_; }
  /// Number of setup rounds (ceil(log2 n) after build_group).
  std::uint32_t height() const noexcept { return height_; }
  std::uint32_t epoch() const noexcept { return epoch_; }
  /// Groups present after each setup round, round 1 first.
  const std::vector<std::vector<RoundGroup>>& rounds() const noexcept { return rounds_; }

  std::vector<MemberId> members() const;
  std::size_t size() const { return members().size(); }
  int leaf_of(MemberId m) const;
  bool contains(MemberId m) const { return leaf_of(m) >= 0; }
  const Scalar& leaf_secret(MemberId m) const;

  PublicTree public_view() const;
  GroupKey group_key() const;

  /// For rounds 1..height, the node holding the group `m` belonged to after
  /// that round. Its length is the number of group-level keys m stores.
  std::vector<int> path_by_round(MemberId m) const;
  /// Per-round keys of member m: H("GRPKEY", secret) for each path_by_round node.
  std::vector<Digest> round_keys(MemberId m) const;

private:
  friend std::pair<KeyTree, GroupKey> group_rekey(const KeyTree&, MemberId, Rng&);
  friend std::pair<KeyTree, GroupKey> group_join(const KeyTree&, MemberId, Rng&);

  CurveParams curve_;
  std::vector<GroupNode> nodes_;
  int root_;
  std::uint32_t height_;
  std::uint32_t epoch_;
  std::vector<std::vector<RoundGroup>> rounds_;
};

/// Coordinator's working set while the tree is being built.
struct GroupForest {
  CurveParams curve;
  std::vector<GroupNode> nodes;
  std::vector<int> groups;  // subtree roots, left to right
  std::uint16_t round = 0;
  std::vector<std::vector<RoundGroup>> history;
};

using ShareLookup = std::function<const KeyShare&(MemberId)>;

/// Sorted ascending, duplicates rejected. Throws InvalidArgument when empty.
std::vector<MemberId> order_members(std::vector<MemberId> ids);

/// Round 1: pairs (M1,M2), (M3,M4), ... run the pairwise handshake over `link`.
GroupForest leaf_pair_round(std::span<const MemberId> ordered, const ShareLookup& shares, const CurveParams& curve,
                            Rng& rng, Link& link);

/// One merge round. Each side's sponsor sends its subtree broadcast to every
/// member of the other side over `link`.
void merge_round(GroupForest& forest, Link& link);

struct BuildResult {
  KeyTree tree;
  std::vector<GroupKey> member_keys;  // in member order, each computed from the public tree
};

BuildResult build_group(std::span<const MemberId> members, const ShareLookup& shares, const CurveParams& curve, Rng& rng,
                        Link& link);

/// Walks from m's leaf to the root using only public blinded keys. Throws
/// MissingBlindedKey if a sibling's blinded key is absent.
GroupKey member_compute_key(const CurveParams& curve, const PublicTree& tree, MemberId m, const Scalar& leaf_secret);

/// Shallowest leaf under `subtree`, rightmost among ties.
MemberId sponsor_of(const PublicTree& tree, int subtree);
MemberId sponsor_of(const KeyTree& tree, int subtree);

/// Removes `leaving`; its sibling takes the parent's place and the sponsor of
/// that sibling subtree refreshes its leaf secret. New epoch, new key.
std::pair<KeyTree, GroupKey> group_rekey(const KeyTree& tree, MemberId leaving, Rng& rng);

/// Adds `joining` as a singleton merged with the current root.
std::pair<KeyTree, GroupKey> group_join(const KeyTree& tree, MemberId joining, Rng& rng);

/// type | sender | epoch u32 | count u32 | pre-order (label, blinded point).
/// Leaf labels: 0x00, member u32. Group labels: 0x01, round u16, index u16.
/// A missing blinded key is encoded as the identity.
Bytes encode_broadcast(const CurveParams& curve, const PublicTree& tree, int subtree, NodeId sender);
PublicTree decode_broadcast(ByteView wire, const CurveParams& curve);

}  // namespace tklu
