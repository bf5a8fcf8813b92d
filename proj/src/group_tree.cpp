#include "tklu/group_tree.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

#include "tklu/hash.hpp"

namespace tklu {

namespace {

constexpr int kMaxFreshAttempts = 400;
constexpr int kMaxFreshDraws = 64;

std::size_t order_width(const CurveParams& curve) { return (mpz_sizeinbase(curve.order.get_mpz_t(), 2) + 7) / 8; }

Scalar node_secret(const CurveParams& curve, const CurvePoint& shared) {
  return hash_to_scalar(curve, label::kGroupNode, encode_point(curve, shared));
}

Digest key_from_secret(const CurveParams& curve, const Scalar& secret) {
  ByteWriter w;
  encode_bigint(w, secret.value(), order_width(curve));
  return hash_tag(label::kGroupKey, w.bytes());
}

GroupNode make_leaf(const CurveParams& curve, MemberId m, Scalar secret) {
  GroupNode leaf;
  leaf.member = m;
  leaf.blinded = scalar_mul(curve, secret, curve.base);
  leaf.secret = std::move(secret);
  return leaf;
}

int sibling_of(std::span<const GroupNode> nodes, int i) {
  const auto& parent = nodes[static_cast<std::size_t>(nodes[static_cast<std::size_t>(i)].parent)];
  return parent.left == i ? parent.right : parent.left;
}

template <typename Nodes>
void collect_members(const Nodes& nodes, int i, std::vector<MemberId>& out) {
  const auto& n = nodes[static_cast<std::size_t>(i)];
  if (n.is_leaf()) {
    out.push_back(*n.member);
    return;
  }
  collect_members(nodes, n.left, out);
  collect_members(nodes, n.right, out);
}

template <typename Nodes>
int find_leaf(const Nodes& nodes, int root, MemberId m) {
  if (root < 0) return -1;
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.is_leaf()) {
      if (*n.member == m) return i;
    } else {
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }
  return -1;
}

MemberId sponsor_in(std::span<const GroupNode> nodes, int subtree) {
  // Level order, left child first: the last leaf seen on the first level that
  // has any leaf is the shallowest rightmost one.
  std::vector<int> level{subtree};
  while (!level.empty()) {
    std::optional<MemberId> rightmost;
    std::vector<int> next;
    for (int i : level) {
      const auto& n = nodes[static_cast<std::size_t>(i)];
      if (n.is_leaf()) {
        rightmost = *n.member;
      } else {
        next.push_back(n.left);
        next.push_back(n.right);
      }
    }
    if (rightmost) return *rightmost;
    level = std::move(next);
  }
  throw Error(ErrorCode::InvalidArgument, "empty subtree has no sponsor");
}

/// Secrets from `start` (holding `secret`) up to the root, using sibling blinded keys.
std::vector<Scalar> walk_up(const CurveParams& curve, std::span<const GroupNode> nodes, int start, Scalar secret) {
  std::vector<Scalar> out{secret};
  for (int cur = start; nodes[static_cast<std::size_t>(cur)].parent >= 0;
       cur = nodes[static_cast<std::size_t>(cur)].parent) {
    const auto& sib = nodes[static_cast<std::size_t>(sibling_of(nodes, cur))];
    if (!sib.blinded) throw Error(ErrorCode::MissingBlindedKey, "sibling blinded key missing");
    out.push_back(node_secret(curve, dh(curve, out.back(), *sib.blinded)));
  }
  return out;
}

void encode_subtree(ByteWriter& w, const CurveParams& curve, std::span<const GroupNode> nodes, int i) {
  const auto& n = nodes[static_cast<std::size_t>(i)];
  if (n.is_leaf()) {
    w.u8(0x00);
    w.u32(*n.member);
  } else {
    if (n.labels.empty()) throw std::logic_error("internal group node without a label");
    w.u8(0x01);
    w.u16(n.labels.back().round);
    w.u16(n.labels.back().index);
  }
  encode_point(w, curve, n.blinded.value_or(CurvePoint::identity()));
  if (!n.is_leaf()) {
    encode_subtree(w, curve, nodes, n.left);
    encode_subtree(w, curve, nodes, n.right);
  }
}

std::size_t subtree_size(std::span<const GroupNode> nodes, int i) {
  const auto& n = nodes[static_cast<std::size_t>(i)];
  return n.is_leaf() ? 1 : 1 + subtree_size(nodes, n.left) + subtree_size(nodes, n.right);
}

int decode_subtree(ByteReader& r, const CurveParams& curve, std::vector<GroupNode>& out, std::uint32_t& budget,
                   int parent) {
  if (budget == 0) throw Error(ErrorCode::DecodeError, "broadcast node count exceeded");
  --budget;
  GroupNode n;
  n.parent = parent;
  const auto kind = r.u8();
  if (kind == 0x00) {
    n.member = r.u32();
  } else if (kind == 0x01) {
    TreeLabel l;
    l.round = r.u16();
    l.index = r.u16();
    n.labels.push_back(l);
  } else {
    throw Error(ErrorCode::DecodeError, "bad tree label kind");
  }
  auto pt = decode_point(r, curve);
  if (!pt.infinity) n.blinded = std::move(pt);
  const bool leaf = n.is_leaf();
  const int idx = static_cast<int>(out.size());
  out.push_back(std::move(n));
  if (!leaf) {
    const int left = decode_subtree(r, curve, out, budget, idx);
    const int right = decode_subtree(r, curve, out, budget, idx);
    out[static_cast<std::size_t>(idx)].left = left;
    out[static_cast<std::size_t>(idx)].right = right;
  }
  return idx;
}

/// Copies the subtree under `root` into a fresh pre-order arena.
int compact_into(const std::vector<GroupNode>& src, int i, int parent, std::vector<GroupNode>& dst) {
  GroupNode n = src[static_cast<std::size_t>(i)];
  n.parent = parent;
  const int idx = static_cast<int>(dst.size());
  dst.push_back(n);
  if (!n.is_leaf()) {
    const int left = compact_into(src, n.left, idx, dst);
    const int right = compact_into(src, n.right, idx, dst);
    dst[static_cast<std::size_t>(idx)].left = left;
    dst[static_cast<std::size_t>(idx)].right = right;
  }
  return idx;
}

std::vector<GroupNode> strip_secrets(std::vector<GroupNode> nodes) {
  for (auto& n : nodes) n.secret.reset();
  return nodes;
}

}  // namespace

std::string TreeLabel::str() const {
  if (round < 10 && index < 10) return "T" + std::to_string(round) + std::to_string(index);
  return "T" + std::to_string(round) + "." + std::to_string(index);
}

// ---- PublicTree / KeyTree ---------------------------------------------------

PublicTree::PublicTree(std::vector<GroupNode> nodes, int root, std::uint32_t epoch)
    : nodes_(std::move(nodes)), root_(root), epoch_(epoch) {}

int PublicTree::leaf_of(MemberId m) const { return find_leaf(nodes_, root_, m); }

std::vector<MemberId> PublicTree::members() const {
  std::vector<MemberId> out;
  collect_members(nodes_, root_, out);
  return out;
}

KeyTree::KeyTree(CurveParams curve, std::vector<GroupNode> nodes, int root, std::uint32_t height, std::uint32_t epoch,
                 std::vector<std::vector<RoundGroup>> rounds)
    : curve_(std::move(curve)),
      nodes_(std::move(nodes)),
      root_(root),
      height_(height),
      epoch_(epoch),
      rounds_(std::move(rounds)) {}

std::vector<MemberId> KeyTree::members() const {
  std::vector<MemberId> out;
  collect_members(nodes_, root_, out);
  return out;
}

int KeyTree::leaf_of(MemberId m) const { return find_leaf(nodes_, root_, m); }

const Scalar& KeyTree::leaf_secret(MemberId m) const {
  const int leaf = leaf_of(m);
  if (leaf < 0) throw Error(ErrorCode::UnknownMember, "member " + std::to_string(m) + " not in group");
  return *node(leaf).secret;
}

PublicTree KeyTree::public_view() const { return PublicTree(strip_secrets(nodes_), root_, epoch_); }

GroupKey KeyTree::group_key() const { return GroupKey{key_from_secret(curve_, *node(root_).secret), epoch_, members()}; }

std::vector<int> KeyTree::path_by_round(MemberId m) const {
  int cur = leaf_of(m);
  if (cur < 0) throw Error(ErrorCode::UnknownMember, "member " + std::to_string(m) + " not in group");
  std::vector<int> up;
  for (; cur >= 0; cur = node(cur).parent) up.push_back(cur);
  std::vector<int> out;
  for (std::uint32_t r = 1; r <= height_; ++r) {
    int pick = up.front();
    for (int i : up) {
      if (node(i).first_round() <= r) pick = i;
    }
    out.push_back(pick);
  }
  return out;
}

std::vector<Digest> KeyTree::round_keys(MemberId m) const {
  std::vector<Digest> out;
  for (int i : path_by_round(m)) out.push_back(key_from_secret(curve_, *node(i).secret));
  return out;
}

// ---- setup ------------------------------------------------------------------

std::vector<MemberId> order_members(std::vector<MemberId> ids) {
  if (ids.empty()) throw Error(ErrorCode::InvalidArgument, "group needs at least one member");
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw Error(ErrorCode::InvalidArgument, "duplicate member id");
  return ids;
}

GroupForest leaf_pair_round(std::span<const MemberId> ordered, const ShareLookup& shares, const CurveParams& curve,
                            Rng& rng, Link& link) {
  if (ordered.empty()) throw Error(ErrorCode::InvalidArgument, "group needs at least one member");
  GroupForest forest{curve, {}, {}, 0, {}};
  auto add = [&](GroupNode n) {
    forest.nodes.push_back(std::move(n));
    return static_cast<int>(forest.nodes.size() - 1);
  };

  if (ordered.size() == 1) {
    forest.groups.push_back(add(make_leaf(curve, ordered[0], random_scalar(curve, rng))));
    return forest;
  }

  forest.round = 1;
  std::vector<RoundGroup> summary;
  std::uint16_t index = 1;
  for (std::size_t t = 0; t < ordered.size(); t += 2, ++index) {
    const TreeLabel label{1, index};
    if (t + 1 == ordered.size()) {
      auto leaf = make_leaf(curve, ordered[t], random_scalar(curve, rng));
      leaf.labels.push_back(label);
      forest.groups.push_back(add(std::move(leaf)));
      summary.push_back({label, {ordered[t]}});
      continue;
    }
    const MemberId a = ordered[t], b = ordered[t + 1];
    HandshakeResult hs;
    try {
      hs = run_pairwise(shares(a), shares(b), link);
    } catch (const Error& e) {
      throw Error(e.code(), "pairwise exchange M" + std::to_string(a) + "-M" + std::to_string(b) + " failed: " + e.what());
    }
    const auto s = hash_to_scalar(curve, label::kGroupLeaf, hs.initiator_key.bytes);
    const int la = add(make_leaf(curve, a, s));
    const int lb = add(make_leaf(curve, b, s));
    GroupNode pair;
    pair.labels.push_back(label);
    pair.left = la;
    pair.right = lb;
    pair.secret = node_secret(curve, dh(curve, s, *forest.nodes[static_cast<std::size_t>(lb)].blinded));
    pair.blinded = scalar_mul(curve, *pair.secret, curve.base);
    const int p = add(std::move(pair));
    forest.nodes[static_cast<std::size_t>(la)].parent = p;
    forest.nodes[static_cast<std::size_t>(lb)].parent = p;
    forest.groups.push_back(p);
    summary.push_back({label, {a, b}});
  }
  forest.history.push_back(std::move(summary));
  return forest;
}

void merge_round(GroupForest& forest, Link& link) {
  if (forest.groups.size() <= 1) return;
  const auto& curve = forest.curve;
  const std::uint16_t round = static_cast<std::uint16_t>(forest.round + 1);
  std::vector<int> next;
  std::vector<RoundGroup> summary;
  std::uint16_t index = 1;

  auto members_of = [&](int g) {
    std::vector<MemberId> out;
    collect_members(forest.nodes, g, out);
    return out;
  };

  for (std::size_t t = 0; t < forest.groups.size(); t += 2, ++index) {
    const TreeLabel label{round, index};
    if (t + 1 == forest.groups.size()) {
      const int g = forest.groups[t];
      forest.nodes[static_cast<std::size_t>(g)].labels.push_back(label);
      next.push_back(g);
      summary.push_back({label, members_of(g)});
      continue;
    }
    const int lg = forest.groups[t], rg = forest.groups[t + 1];
    const auto left_members = members_of(lg), right_members = members_of(rg);

    // Each sponsor hands its subtree (shape + blinded keys) to the other side.
    const MemberId left_sponsor = sponsor_in(forest.nodes, lg);
    const MemberId right_sponsor = sponsor_in(forest.nodes, rg);
    const auto left_bcast = encode_broadcast(curve, PublicTree(strip_secrets(forest.nodes), lg, 0), lg, left_sponsor);
    const auto right_bcast = encode_broadcast(curve, PublicTree(strip_secrets(forest.nodes), rg, 0), rg, right_sponsor);
    std::optional<CurvePoint> left_blinded, right_blinded;
    for (MemberId m : right_members) left_blinded = decode_broadcast(link.carry(left_sponsor, m, left_bcast), curve).node(0).blinded;
    for (MemberId m : left_members) right_blinded = decode_broadcast(link.carry(right_sponsor, m, right_bcast), curve).node(0).blinded;
    if (!left_blinded || !right_blinded) throw Error(ErrorCode::MissingBlindedKey, "sponsor broadcast lacks subtree blinded key");

    const auto& lnode = forest.nodes[static_cast<std::size_t>(lg)];
    const auto& rnode = forest.nodes[static_cast<std::size_t>(rg)];
    auto from_left = node_secret(curve, dh(curve, *lnode.secret, *right_blinded));
    auto from_right = node_secret(curve, dh(curve, *rnode.secret, *left_blinded));
    if (!(from_left == from_right)) throw std::logic_error("merge sides derived different secrets");

    GroupNode merged;
    merged.labels.push_back(label);
    merged.left = lg;
    merged.right = rg;
    merged.blinded = scalar_mul(curve, from_left, curve.base);
    merged.secret = std::move(from_left);
    forest.nodes.push_back(std::move(merged));
    const int m = static_cast<int>(forest.nodes.size() - 1);
    forest.nodes[static_cast<std::size_t>(lg)].parent = m;
    forest.nodes[static_cast<std::size_t>(rg)].parent = m;
    next.push_back(m);
    auto all = left_members;
    all.insert(all.end(), right_members.begin(), right_members.end());
    summary.push_back({label, std::move(all)});
  }
  forest.groups = std::move(next);
  forest.round = round;
  forest.history.push_back(std::move(summary));
}

BuildResult build_group(std::span<const MemberId> members, const ShareLookup& shares, const CurveParams& curve, Rng& rng,
                        Link& link) {
  const auto ordered = order_members(std::vector<MemberId>(members.begin(), members.end()));
  auto forest = leaf_pair_round(ordered, shares, curve, rng, link);
  while (forest.groups.size() > 1) merge_round(forest, link);

  std::vector<GroupNode> arena;
  compact_into(forest.nodes, forest.groups.front(), -1, arena);
  KeyTree tree(curve, std::move(arena), 0, forest.round, 0, std::move(forest.history));

  const auto view = tree.public_view();
  const auto expected = tree.group_key();
  std::vector<GroupKey> keys;
  for (MemberId m : ordered) {
    keys.push_back(member_compute_key(curve, view, m, tree.leaf_secret(m)));
    if (!(keys.back() == expected)) throw std::logic_error("member derived a different group key");
  }
  return BuildResult{std::move(tree), std::move(keys)};
}

GroupKey member_compute_key(const CurveParams& curve, const PublicTree& tree, MemberId m, const Scalar& leaf_secret) {
  const int leaf = tree.leaf_of(m);
  if (leaf < 0) throw Error(ErrorCode::UnknownMember, "member " + std::to_string(m) + " not in tree");
  const auto secrets = walk_up(curve, tree.nodes(), leaf, leaf_secret);
  return GroupKey{key_from_secret(curve, secrets.back()), tree.epoch(), tree.members()};
}

MemberId sponsor_of(const PublicTree& tree, int subtree) { return sponsor_in(tree.nodes(), subtree); }
MemberId sponsor_of(const KeyTree& tree, int subtree) { return sponsor_in(tree.nodes(), subtree); }

// ---- membership changes -----------------------------------------------------

namespace {

void recompute(const CurveParams& curve, std::vector<GroupNode>& nodes, int i) {
  if (nodes[static_cast<std::size_t>(i)].is_leaf()) return;
  const int l = nodes[static_cast<std::size_t>(i)].left;
  const int r = nodes[static_cast<std::size_t>(i)].right;
  recompute(curve, nodes, l);
  recompute(curve, nodes, r);
  auto& n = nodes[static_cast<std::size_t>(i)];
  n.secret = node_secret(curve, dh(curve, *nodes[static_cast<std::size_t>(l)].secret, *nodes[static_cast<std::size_t>(r)].blinded));
  n.blinded = scalar_mul(curve, *n.secret, curve.base);
}

}  // namespace

std::pair<KeyTree, GroupKey> group_rekey(const KeyTree& tree, MemberId leaving, Rng& rng) {
  const auto& curve = tree.curve_;
  KeyTree next = tree;
  auto& nodes = next.nodes_;
  auto at = [&](int i) -> GroupNode& { return nodes[static_cast<std::size_t>(i)]; };
  const int leaf = next.leaf_of(leaving);
  if (leaf < 0) throw Error(ErrorCode::UnknownMember, "member " + std::to_string(leaving) + " not in group");
  if (leaf == next.root_) throw Error(ErrorCode::InvalidArgument, "sole member cannot leave; dissolve the group");

  // Everything the departing member knew: its leaf secret and every ancestor's.
  std::vector<Scalar> departed;
  for (int i = leaf; i >= 0; i = at(i).parent) departed.push_back(*at(i).secret);
  const Scalar old_root = *at(next.root_).secret;
  auto is_departed = [&](const Scalar& s) { return std::find(departed.begin(), departed.end(), s) != departed.end(); };

  const int parent = at(leaf).parent;
  const int sib = sibling_of(nodes, leaf);
  const int grand = at(parent).parent;
  const auto inherited = at(parent).labels;
  at(sib).labels.insert(at(sib).labels.end(), inherited.begin(), inherited.end());
  at(sib).parent = grand;
  if (grand < 0) {
    next.root_ = sib;
  } else {
    (at(grand).left == parent ? at(grand).left : at(grand).right) = sib;
  }

  std::vector<int> attached;
  for (std::vector<int> todo{next.root_}; !todo.empty();) {
    const int i = todo.back();
    todo.pop_back();
    attached.push_back(i);
    if (!at(i).is_leaf()) {
      todo.push_back(at(i).left);
      todo.push_back(at(i).right);
    }
  }

  // Off-path blinded keys are fixed, so the departed member can plug its old
  // leaf secret in at any node and walk up; reject candidates where that lands
  // on the new root.
  auto try_refresh = [&](const std::vector<int>& refresh, int attempts) {
    std::vector<Scalar> previous;
    for (int r : refresh) previous.push_back(*at(r).secret);
    for (int attempt = 0; attempt < attempts; ++attempt) {
      for (std::size_t k = 0; k < refresh.size(); ++k) {
        auto fresh = random_scalar(curve, rng);
        for (int draw = 0; draw < kMaxFreshDraws && (fresh == previous[k] || is_departed(fresh)); ++draw) {
          fresh = random_scalar(curve, rng);
        }
        at(refresh[k]).blinded = scalar_mul(curve, fresh, curve.base);
        at(refresh[k]).secret = std::move(fresh);
      }
      recompute(curve, nodes, next.root_);
      const Scalar new_root = *at(next.root_).secret;
      bool reachable = new_root == old_root;
      for (std::size_t k = 0; k < attached.size() && !reachable; ++k) {
        reachable = walk_up(curve, nodes, attached[k], departed.front()).back() == new_root;
      }
      if (!reachable) return true;
    }
    for (std::size_t k = 0; k < refresh.size(); ++k) {
      at(refresh[k]).blinded = scalar_mul(curve, previous[k], curve.base);
      at(refresh[k]).secret = previous[k];
    }
    recompute(curve, nodes, next.root_);
    return false;
  };

  // The sponsor refreshes; so does the sponsor of any subtree whose secret the
  // departed member happens to know. If no fresh value separates the new key
  // from departed material (only on tiny curves), every leaf refreshes.
  std::vector<int> refresh{next.leaf_of(sponsor_in(nodes, sib))};
  for (int i : attached) {
    if (!is_departed(*at(i).secret)) continue;
    const int l = next.leaf_of(sponsor_in(nodes, i));
    if (std::find(refresh.begin(), refresh.end(), l) == refresh.end()) refresh.push_back(l);
  }
  if (!try_refresh(refresh, kMaxFreshAttempts / 2)) {
    std::vector<int> leaves;
    for (int i : attached) {
      if (at(i).is_leaf()) leaves.push_back(i);
    }
    if (!try_refresh(leaves, kMaxFreshAttempts / 2)) {
      throw std::runtime_error("no fresh sponsor secret separates the new key from departed key material");
    }
  }

  std::vector<GroupNode> arena;
  compact_into(nodes, next.root_, -1, arena);
  next.nodes_ = std::move(arena);
  next.root_ = 0;
  next.epoch_ += 1;
  auto key = next.group_key();
  return {std::move(next), std::move(key)};
}

std::pair<KeyTree, GroupKey> group_join(const KeyTree& tree, MemberId joining, Rng& rng) {
  if (tree.contains(joining)) throw Error(ErrorCode::InvalidArgument, "member already in group");
  const auto& curve = tree.curve_;
  KeyTree next = tree;
  auto& nodes = next.nodes_;
  nodes.push_back(make_leaf(curve, joining, random_scalar(curve, rng)));
  const int leaf = static_cast<int>(nodes.size() - 1);
  const int old_root = next.root_;

  GroupNode root;
  root.labels.push_back(TreeLabel{static_cast<std::uint16_t>(next.height_ + 1), 1});
  root.left = old_root;
  root.right = leaf;
  root.secret = node_secret(curve, dh(curve, *nodes[static_cast<std::size_t>(old_root)].secret,
                                      *nodes[static_cast<std::size_t>(leaf)].blinded));
  root.blinded = scalar_mul(curve, *root.secret, curve.base);
  nodes.push_back(std::move(root));
  const int r = static_cast<int>(nodes.size() - 1);
  nodes[static_cast<std::size_t>(old_root)].parent = r;
  nodes[static_cast<std::size_t>(leaf)].parent = r;

  std::vector<GroupNode> arena;
  compact_into(nodes, r, -1, arena);
  next.nodes_ = std::move(arena);
  next.root_ = 0;
  next.height_ += 1;
  next.epoch_ += 1;
  auto key = next.group_key();
  return {std::move(next), std::move(key)};
}

// ---- broadcast wire format --------------------------------------------------

Bytes encode_broadcast(const CurveParams& curve, const PublicTree& tree, int subtree, NodeId sender) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(MsgType::GroupBroadcast));
  w.u32(sender);
  w.u32(tree.epoch());
  w.u32(static_cast<std::uint32_t>(subtree_size(tree.nodes(), subtree)));
  encode_subtree(w, curve, tree.nodes(), subtree);
  return std::move(w).take();
}

PublicTree decode_broadcast(ByteView wire, const CurveParams& curve) {
  ByteReader r(wire);
  if (r.u8() != static_cast<std::uint8_t>(MsgType::GroupBroadcast)) throw Error(ErrorCode::DecodeError, "expected group broadcast");
  (void)r.u32();  // sender
  const auto epoch = r.u32();
  auto count = r.u32();
  const auto declared = count;
  if (count == 0 || count > r.remaining()) throw Error(ErrorCode::DecodeError, "bad broadcast node count");
  std::vector<GroupNode> nodes;
  decode_subtree(r, curve, nodes, count, -1);
  if (nodes.size() != declared) throw Error(ErrorCode::DecodeError, "broadcast node count mismatch");
  r.expect_end();
  return PublicTree(std::move(nodes), 0, epoch);
}

}  // namespace tklu
