#include <gtest/gtest.h>

#include <numeric>

#include "tklu/group_tree.hpp"
#include "tklu/hash.hpp"

using namespace tklu;

namespace {

struct Fixture {
  explicit Fixture(std::size_t n, const char* curve = "test64", std::uint64_t seed = 1)
      : curve(curve_preset(curve)), master(gen_master(std::max<std::size_t>(n, 1), FieldPrime(2147483647), seed)),
        rng(seed) {
    for (std::size_t i = 0; i < master.dim(); ++i) shares.push_back(assign_share(master, i));
  }

  BuildResult build(std::vector<MemberId> members) {
    DirectLink link;
    return build_group(members, [this](MemberId m) -> const KeyShare& { return shares.at(m); }, curve, rng, link);
  }
  BuildResult build_first(std::size_t n) {
    std::vector<MemberId> ms(n);
    std::iota(ms.begin(), ms.end(), MemberId{0});
    return build(ms);
  }

  CurveParams curve;
  MasterKeyMatrix master;
  std::vector<KeyShare> shares;
  Rng rng;
};

std::vector<std::pair<std::string, std::vector<MemberId>>> round_shape(const KeyTree& t, std::size_t r) {
  std::vector<std::pair<std::string, std::vector<MemberId>>> out;
  for (const auto& g : t.rounds().at(r)) out.emplace_back(g.label.str(), g.members);
  return out;
}

using Shape = std::vector<std::pair<std::string, std::vector<MemberId>>>;

std::uint32_t log2_ceil(std::size_t n) {
  std::uint32_t r = 0;
  while ((std::size_t{1} << r) < n) ++r;
  return r;
}

}  // namespace

TEST(GroupTree, SixMemberShape) {
  Fixture f(6);
  const auto res = f.build_first(6);
  const auto& t = res.tree;
  EXPECT_EQ(t.height(), 3u);
  EXPECT_EQ(round_shape(t, 0), (Shape{{"T11", {0, 1}}, {"T12", {2, 3}}, {"T13", {4, 5}}}));
  EXPECT_EQ(round_shape(t, 1), (Shape{{"T21", {0, 1, 2, 3}}, {"T22", {4, 5}}}));
  EXPECT_EQ(round_shape(t, 2), (Shape{{"T31", {0, 1, 2, 3, 4, 5}}}));
  // The M5/M6 pair carries both names.
  const auto& pair = t.node(t.node(t.leaf_of(4)).parent);
  ASSERT_EQ(pair.labels.size(), 2u);
  EXPECT_EQ(pair.labels[0].str(), "T13");
  EXPECT_EQ(pair.labels[1].str(), "T22");
  EXPECT_EQ(pair.parent, t.root());
}

TEST(GroupTree, FiveMemberCarriesSingleton) {
  Fixture f(5);
  const auto t = f.build_first(5).tree;
  EXPECT_EQ(t.height(), 3u);
  EXPECT_EQ(round_shape(t, 0), (Shape{{"T11", {0, 1}}, {"T12", {2, 3}}, {"T13", {4}}}));
  EXPECT_EQ(round_shape(t, 1), (Shape{{"T21", {0, 1, 2, 3}}, {"T22", {4}}}));
  EXPECT_EQ(round_shape(t, 2), (Shape{{"T31", {0, 1, 2, 3, 4}}}));
}

TEST(GroupTree, SingletonGroup) {
  Fixture f(1);
  const auto res = f.build_first(1);
  EXPECT_EQ(res.tree.height(), 0u);
  EXPECT_EQ(res.tree.members(), std::vector<MemberId>{0});
  ByteWriter w;
  const auto& s = res.tree.leaf_secret(0);
  const auto key = member_compute_key(f.curve, res.tree.public_view(), 0, s);
  EXPECT_EQ(key, res.tree.group_key());
  EXPECT_TRUE(res.tree.path_by_round(0).empty());
}

TEST(GroupTree, EveryMemberAgreesAcrossSizes) {
  for (std::size_t n = 1; n <= 20; ++n) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Fixture f(n, "test64", seed);
      const auto res = f.build_first(n);
      const auto key = res.tree.group_key();
      ASSERT_EQ(res.member_keys.size(), n);
      for (const auto& k : res.member_keys) EXPECT_EQ(k, key);
      const auto pub = res.tree.public_view();
      for (auto m : res.tree.members()) EXPECT_EQ(member_compute_key(f.curve, pub, m, res.tree.leaf_secret(m)), key);
      EXPECT_EQ(res.tree.height(), log2_ceil(n)) << n;
      EXPECT_EQ(res.tree.rounds().size(), log2_ceil(n));
    }
  }
}

TEST(GroupTree, PairedLeavesShareLuDerivedSecret) {
  Fixture f(4);
  const auto t = f.build_first(4).tree;
  DirectLink link;
  const auto hs = run_pairwise(f.shares[0], f.shares[1], link);
  const auto expect = hash_to_scalar(f.curve, label::kGroupLeaf, hs.initiator_key.bytes);
  EXPECT_EQ(t.leaf_secret(0), expect);
  EXPECT_EQ(t.leaf_secret(1), expect);
  EXPECT_NE(t.leaf_secret(2), expect);
}

TEST(GroupTree, PublicViewHoldsNoSecrets) {
  Fixture f(7);
  const auto pub = f.build_first(7).tree.public_view();
  for (const auto& n : pub.nodes()) {
    EXPECT_FALSE(n.secret.has_value());
    EXPECT_TRUE(n.blinded.has_value());
  }
}

TEST(GroupTree, MissingBlindedKeyFailsClosed) {
  Fixture f(4);
  const auto res = f.build_first(4);
  auto pub = res.tree.public_view();
  const int sib_of_m0 = pub.node(pub.node(pub.leaf_of(0)).parent).right;
  pub.mutable_nodes()[static_cast<std::size_t>(sib_of_m0)].blinded.reset();
  try {
    member_compute_key(f.curve, pub, 0, res.tree.leaf_secret(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingBlindedKey);
  }
}

TEST(GroupTree, OrderingAndValidation) {
  EXPECT_EQ(order_members({5, 1, 3}), (std::vector<MemberId>{1, 3, 5}));
  EXPECT_THROW(order_members({}), Error);
  EXPECT_THROW(order_members({1, 1}), Error);
}

TEST(GroupTree, SponsorSelection) {
  Fixture f(6);
  const auto t6 = f.build_first(6).tree;
  const int t22 = t6.node(t6.leaf_of(4)).parent;
  EXPECT_EQ(sponsor_of(t6, t22), 5u);
  EXPECT_EQ(sponsor_of(t6, t6.root()), 5u);
  EXPECT_EQ(sponsor_of(t6, t6.leaf_of(2)), 2u);

  Fixture g(4);
  const auto t4 = g.build_first(4).tree;
  EXPECT_EQ(sponsor_of(t4, t4.root()), 3u);
  EXPECT_EQ(sponsor_of(t4.public_view(), t4.root()), 3u);
}

TEST(GroupTree, RekeyRemovingM6) {
  Fixture f(6);
  const auto t = f.build_first(6).tree;
  const auto old_key = t.group_key();
  auto [next, key] = group_rekey(t, 5, f.rng);
  EXPECT_EQ(next.members(), (std::vector<MemberId>{0, 1, 2, 3, 4}));
  EXPECT_EQ(key.epoch, old_key.epoch + 1);
  EXPECT_NE(key.bytes, old_key.bytes);
  // M5's leaf replaces the collapsed pair directly under the root.
  const int m5 = next.leaf_of(4);
  EXPECT_EQ(next.node(m5).parent, next.root());
  ASSERT_EQ(next.node(m5).labels.size(), 2u);
  EXPECT_EQ(next.node(m5).labels[0].str(), "T13");
  EXPECT_EQ(next.node(m5).labels[1].str(), "T22");
  // Sponsor M5 refreshed; the left subtree T21 is untouched.
  EXPECT_NE(next.leaf_secret(4), t.leaf_secret(4));
  const int old_t21 = t.node(t.root()).left, new_t21 = next.node(next.root()).left;
  EXPECT_EQ(next.node(new_t21).secret, t.node(old_t21).secret);
  const auto pub = next.public_view();
  for (auto m : next.members()) EXPECT_EQ(member_compute_key(f.curve, pub, m, next.leaf_secret(m)), key);
}

TEST(GroupTree, RekeyToSingleton) {
  Fixture f(2);
  const auto t = f.build_first(2).tree;
  auto [next, key] = group_rekey(t, 0, f.rng);
  EXPECT_EQ(next.members(), std::vector<MemberId>{1});
  EXPECT_NE(key.bytes, t.group_key().bytes);
  EXPECT_EQ(member_compute_key(f.curve, next.public_view(), 1, next.leaf_secret(1)), key);
}

TEST(GroupTree, RekeyTwiceGivesFreshEpochs) {
  Fixture f(8);
  const auto t = f.build_first(8).tree;
  auto [a, ka] = group_rekey(t, 3, f.rng);
  auto [b, kb] = group_rekey(a, 6, f.rng);
  EXPECT_EQ(ka.epoch + 1, kb.epoch);
  EXPECT_NE(ka.bytes, kb.bytes);
  EXPECT_NE(t.group_key().bytes, kb.bytes);
  EXPECT_THROW(group_rekey(b, 3, f.rng), Error);
}

TEST(GroupTree, DepartedSecretCannotReachNewKeyOnToyCurve) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (std::size_t n : {2u, 3u, 5u, 6u}) {
      Fixture f(n, "toy19", seed);
      const auto t = f.build_first(n).tree;
      const MemberId leaving = static_cast<MemberId>(seed % n);
      const Scalar old_leaf = t.leaf_secret(leaving);
      auto [next, key] = group_rekey(t, leaving, f.rng);
      for (auto m : next.members()) {
        if (next.leaf_secret(m) == old_leaf) EXPECT_EQ(t.leaf_secret(m), old_leaf) << "fresh secret reused";
      }
      const auto pub = next.public_view();
      // Place the old leaf secret at every node and walk up with public blinded keys.
      for (std::size_t start = 0; start < pub.nodes().size(); ++start) {
        {
          Scalar cur = old_leaf;
          for (int i = static_cast<int>(start); pub.node(i).parent >= 0; i = pub.node(i).parent) {
            const int p = pub.node(i).parent;
            const int sib = pub.node(p).left == i ? pub.node(p).right : pub.node(p).left;
            cur = hash_to_scalar(f.curve, label::kGroupNode, encode_point(f.curve, dh(f.curve, cur, *pub.node(sib).blinded)));
          }
          ByteWriter w;
          encode_bigint(w, cur.value(), 1);
          EXPECT_NE(hash_tag(label::kGroupKey, w.bytes()), key.bytes) << "seed " << seed << " n " << n;
        }
      }
    }
  }
}

TEST(GroupTree, JoinAddsMemberAtTop) {
  Fixture f(5);
  const auto t = f.build_first(4).tree;
  auto [next, key] = group_join(t, 4, f.rng);
  EXPECT_EQ(next.members(), (std::vector<MemberId>{0, 1, 2, 3, 4}));
  EXPECT_NE(key.bytes, t.group_key().bytes);
  const auto pub = next.public_view();
  for (auto m : next.members()) EXPECT_EQ(member_compute_key(f.curve, pub, m, next.leaf_secret(m)), key);
  EXPECT_THROW(group_join(next, 4, f.rng), Error);
}

TEST(GroupTree, BroadcastRoundTrip) {
  Fixture f(6);
  const auto t = f.build_first(6).tree;
  const auto pub = t.public_view();
  const auto wire = encode_broadcast(f.curve, pub, pub.root(), 5);
  const auto back = decode_broadcast(wire, f.curve);
  EXPECT_EQ(back.members(), pub.members());
  EXPECT_EQ(back.epoch(), pub.epoch());
  for (auto m : t.members()) EXPECT_EQ(member_compute_key(f.curve, back, m, t.leaf_secret(m)), t.group_key());
  Bytes cut(wire.begin(), wire.end() - 1);
  EXPECT_THROW(decode_broadcast(cut, f.curve), Error);
}

TEST(GroupTree, PerRoundKeysCoverHeight) {
  Fixture f(5);
  const auto t = f.build_first(5).tree;
  for (auto m : t.members()) {
    EXPECT_EQ(t.path_by_round(m).size(), t.height());
    EXPECT_EQ(t.round_keys(m).back(), t.group_key().bytes);
  }
  // M5 is alone for two rounds and keeps its leaf key for both.
  const auto p = t.path_by_round(4);
  EXPECT_EQ(p[0], p[1]);
}
