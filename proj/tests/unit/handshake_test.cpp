#include <gtest/gtest.h>

#include <algorithm>

#include "toy_oracle.hpp"
#include "tklu/handshake.hpp"

using namespace tklu;

namespace {

MasterKeyMatrix gf7_demo() {
  const FieldPrime q(7);
  FieldMatrix l(q, 2);
  l.set(0, 0, 1);
  l.set(1, 0, 3);
  l.set(1, 1, 2);
  return MasterKeyMatrix::from_factors(l, {2, 2});
}

// Records every message; optionally flips one bit of message `target`.
class RecordingLink final : public Link {
public:
  RecordingLink() = default;
  RecordingLink(int target, std::size_t bit) : target_(target), bit_(bit) {}

  Bytes carry(NodeId, NodeId, Bytes wire) override {
    if (static_cast<int>(sent.size()) == target_) wire[bit_ / 8] ^= static_cast<std::uint8_t>(1u << (bit_ % 8));
    sent.push_back(wire);
    return wire;
  }
  void broadcast(NodeId, Bytes wire) override { broadcasts.push_back(std::move(wire)); }

  std::vector<Bytes> sent;
  std::vector<Bytes> broadcasts;

private:
  int target_ = -1;
  std::size_t bit_ = 0;
};

bool contains(const std::vector<Bytes>& haystack, const Digest& needle) {
  for (const auto& h : haystack) {
    if (std::search(h.begin(), h.end(), needle.begin(), needle.end()) != h.end()) return true;
  }
  return false;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Pairwise, Gf7DemoMessages) {
  const auto m = gf7_demo();
  const auto s0 = assign_share(m, 0), s1 = assign_share(m, 1);
  auto [st0, msg1] = pw_init(s0, 1);
  EXPECT_EQ(msg1.col, FieldVector(FieldPrime(7), {2, 0}));
  EXPECT_EQ(msg1.sender, 0u);
  auto [st1, msg2] = pw_respond(s1, msg1);
  EXPECT_EQ(msg2.col, FieldVector(FieldPrime(7), {6, 4}));
  auto [key0, msg3] = pw_confirm(st0, msg2);
  const auto key1 = pw_finalize(st1, msg3);
  EXPECT_EQ(key0, key1);
  EXPECT_EQ(key0, pairwise_session_key(FieldElement(6, FieldPrime(7)), 0, 1));
  EXPECT_EQ(key0.peers, (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(st0.phase(), Phase::Complete);
  EXPECT_EQ(st1.phase(), Phase::Complete);
}

TEST(Pairwise, Msg1CarriesExactlyTheColumn) {
  const auto m = gen_master(9, FieldPrime(65537), 4);
  const auto s = assign_share(m, 2);
  const auto wire = encode(pw_init(s, 5).second);
  EXPECT_EQ(wire.size(), 1u + 4u + 4u + 9u * 3u);
  EXPECT_EQ(decode_pairwise1(wire, FieldPrime(65537)).col, s.col);
}

TEST(Pairwise, PeerMustDifferFromSelf) {
  const auto m = gen_master(3, FieldPrime(11), 1);
  EXPECT_THROW(pw_init(assign_share(m, 1), 1), Error);
}

TEST(Pairwise, WrongColumnLengthRejected) {
  const auto m = gen_master(3, FieldPrime(11), 1), other = gen_master(4, FieldPrime(11), 1);
  auto msg1 = pw_init(assign_share(other, 0), 1).second;
  EXPECT_EQ(code_of([&] { pw_respond(assign_share(m, 1), msg1); }), ErrorCode::DecodeError);
}

TEST(Pairwise, SubstitutedColumnFailsVerification) {
  const auto m = gen_master(4, FieldPrime(65537), 2);
  auto [st0, msg1] = pw_init(assign_share(m, 0), 1);
  auto [st1, msg2] = pw_respond(assign_share(m, 1), msg1);
  msg2.col = assign_share(m, 2).col;
  EXPECT_EQ(code_of([&] { pw_confirm(st0, msg2); }), ErrorCode::VerifyFailed);
  EXPECT_EQ(st0.phase(), Phase::Failed);
}

TEST(Pairwise, ReplayedConfirmHitsPhaseGuard) {
  const auto m = gen_master(4, FieldPrime(65537), 2);
  auto [st0, msg1] = pw_init(assign_share(m, 0), 1);
  auto [st1, msg2] = pw_respond(assign_share(m, 1), msg1);
  auto [k0, msg3] = pw_confirm(st0, msg2);
  pw_finalize(st1, msg3);
  EXPECT_EQ(code_of([&] { pw_finalize(st1, msg3); }), ErrorCode::WrongPhase);
  auto fresh = pw_init(assign_share(m, 1), 0).first;
  EXPECT_EQ(code_of([&] { pw_finalize(fresh, msg3); }), ErrorCode::WrongPhase);
  EXPECT_EQ(code_of([&] { pw_confirm(st0, msg2); }), ErrorCode::WrongPhase);
}

TEST(Pairwise, TamperedConfirmRejected) {
  const auto m = gen_master(4, FieldPrime(65537), 2);
  auto [st0, msg1] = pw_init(assign_share(m, 0), 1);
  auto [st1, msg2] = pw_respond(assign_share(m, 1), msg1);
  auto [k0, msg3] = pw_confirm(st0, msg2);
  msg3.tag[0] ^= 1;
  EXPECT_EQ(code_of([&] { pw_finalize(st1, msg3); }), ErrorCode::VerifyFailed);
}

TEST(Pairwise, HonestRunsAgree) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto m = gen_master(6, FieldPrime(2147483647), seed);
    DirectLink link;
    const auto r = run_pairwise(assign_share(m, seed % 6), assign_share(m, (seed + 1) % 6), link);
    EXPECT_EQ(r.initiator_key, r.responder_key);
  }
}

TEST(Pairwise, EverySingleBitFlipIsRejected) {
  const auto m = gen_master(3, FieldPrime(251), 9);
  RecordingLink probe;
  run_pairwise(assign_share(m, 0), assign_share(m, 2), probe);
  ASSERT_EQ(probe.sent.size(), 3u);
  for (int msg = 0; msg < 3; ++msg) {
    for (std::size_t bit = 0; bit < probe.sent[msg].size() * 8; ++bit) {
      RecordingLink link(msg, bit);
      try {
        run_pairwise(assign_share(m, 0), assign_share(m, 2), link);
        ADD_FAILURE() << "tampered run completed: msg " << msg << " bit " << bit;
      } catch (const Error& e) {
        EXPECT_TRUE(e.code() == ErrorCode::DecodeError || e.code() == ErrorCode::VerifyFailed)
            << to_string(e.code());
      }
    }
  }
}

TEST(Pairwise, ForeignMatrixNeverCompletes) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto a = gen_master(5, FieldPrime(2147483647), seed), b = gen_master(5, FieldPrime(2147483647), seed + 1000);
    DirectLink link;
    EXPECT_THROW(run_pairwise(assign_share(a, 0), assign_share(b, 1), link), Error);
    EXPECT_THROW(run_pairwise(assign_share(b, 0), assign_share(a, 1), link), Error);
  }
}

TEST(Path, ToyCurveExhaustiveAgreement) {
  const auto c = curve_preset("toy19");
  const auto m = gen_master(4, FieldPrime(65537), 3);
  const auto si = assign_share(m, 0), sj = assign_share(m, 3);
  for (int ri = 1; ri < 19; ++ri) {
    for (int rj = 1; rj < 19; ++rj) {
      auto [sti, msg1] = pk_init_with_secret(si, 3, c, Scalar(c, ri));
      EXPECT_EQ(msg1.eph, scalar_mul(c, BigInt(ri), c.base));
      auto [stj, msg2] = pk_respond_with_secret(sj, c, Scalar(c, rj), msg1);
      auto [ki, msg3] = pk_confirm(sti, msg2);
      const auto kj = pk_finalize(stj, msg3);
      const auto q = toy::times(ri * rj, toy::kBase);
      ASSERT_TRUE(q.has_value());
      const auto expect = path_session_key(c, CurvePoint::affine(q->first, q->second), 0, 3);
      EXPECT_EQ(ki, expect);
      EXPECT_EQ(kj, expect);
    }
  }
}

TEST(Path, UnitScalarSharedEqualsPeerPoint) {
  const auto c = curve_preset("toy19");
  const auto m = gen_master(3, FieldPrime(251), 3);
  auto [sti, msg1] = pk_init_with_secret(assign_share(m, 0), 1, c, Scalar(c, 1));
  auto [stj, msg2] = pk_respond_with_secret(assign_share(m, 1), c, Scalar(c, 7), msg1);
  auto [ki, msg3] = pk_confirm(sti, msg2);
  EXPECT_EQ(ki, path_session_key(c, msg2.eph, 0, 1));
}

TEST(Path, TranscriptHidesKeyAndScalars) {
  const auto c = curve_preset("toy19");
  const auto m = gen_master(5, FieldPrime(65537), 3);
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    RecordingLink link;
    Rng peek = rng;
    const auto ri = random_scalar(c, peek);
    const auto r = run_path(assign_share(m, 1), assign_share(m, 4), c, rng, link);
    EXPECT_EQ(r.initiator_key, r.responder_key);
    EXPECT_FALSE(contains(link.sent, r.initiator_key.bytes));
    // Only the honest scalar reproduces Q_i from the transcript.
    const auto msg1 = decode_path1(link.sent[0], FieldPrime(65537), c);
    int matches = 0;
    for (int k = 1; k < 19; ++k) {
      if (scalar_mul(c, BigInt(k), c.base) == msg1.eph) {
        ++matches;
        EXPECT_EQ(BigInt(k), ri.value());
      }
    }
    EXPECT_EQ(matches, 1);
  }
}

TEST(Path, OffCurvePointRejected) {
  const auto c = curve_preset("toy19");
  const auto m = gen_master(3, FieldPrime(251), 3);
  auto msg1 = pk_init_with_secret(assign_share(m, 0), 1, c, Scalar(c, 2)).second;
  msg1.eph = CurvePoint::affine(1, 1);
  Rng rng(1);
  EXPECT_EQ(code_of([&] { pk_respond(assign_share(m, 1), c, rng, msg1); }), ErrorCode::InvalidPoint);
}

TEST(Path, CorruptedKeyTagAbortsWithBroadcast) {
  const auto c = curve_preset("test64");
  const auto m = gen_master(3, FieldPrime(65537), 3);
  Rng rng(3);
  auto [sti, msg1] = pk_init(assign_share(m, 0), 2, c, rng);
  auto [stj, msg2] = pk_respond(assign_share(m, 2), c, rng, msg1);
  msg2.key_tag[5] ^= 4;
  try {
    pk_confirm(sti, msg2);
    FAIL();
  } catch (const PathAbortError& e) {
    EXPECT_EQ(e.code(), ErrorCode::VerifyFailed);
    EXPECT_EQ(e.abort_message().sender, 0u);
    EXPECT_EQ(e.abort_message().peer, 2u);
  }
  EXPECT_EQ(sti.phase(), Phase::Failed);

  // Through the driver the abort reaches the broadcast channel.
  const auto foreign = gen_master(3, FieldPrime(65537), 99);
  RecordingLink link;
  EXPECT_THROW(run_path(assign_share(m, 0), assign_share(foreign, 2), c, rng, link), PathAbortError);
  ASSERT_EQ(link.broadcasts.size(), 1u);
  EXPECT_EQ(peek_type(link.broadcasts[0]), MsgType::PathAbort);
  EXPECT_EQ(link.sent.size(), 2u);
}

TEST(Path, EitherConfirmTagTamperedFails) {
  const auto c = curve_preset("test64");
  const auto m = gen_master(3, FieldPrime(65537), 3);
  for (int which = 0; which < 2; ++which) {
    Rng rng(4);
    auto [sti, msg1] = pk_init(assign_share(m, 0), 1, c, rng);
    auto [stj, msg2] = pk_respond(assign_share(m, 1), c, rng, msg1);
    auto [ki, msg3] = pk_confirm(sti, msg2);
    (which == 0 ? msg3.key_tag : msg3.dh_tag)[0] ^= 1;
    EXPECT_EQ(code_of([&] { pk_finalize(stj, msg3); }), ErrorCode::VerifyFailed);
  }
}

TEST(Path, EverySingleBitFlipIsRejected) {
  const auto c = curve_preset("toy19");
  const auto m = gen_master(3, FieldPrime(251), 9);
  Rng seed_rng(8);
  RecordingLink probe;
  Rng r0 = seed_rng;
  run_path(assign_share(m, 0), assign_share(m, 2), c, r0, probe);
  for (int msg = 0; msg < 3; ++msg) {
    for (std::size_t bit = 0; bit < probe.sent[msg].size() * 8; ++bit) {
      RecordingLink link(msg, bit);
      Rng r = seed_rng;
      try {
        run_path(assign_share(m, 0), assign_share(m, 2), c, r, link);
        ADD_FAILURE() << "tampered run completed: msg " << msg << " bit " << bit;
      } catch (const Error& e) {
        EXPECT_TRUE(e.code() == ErrorCode::DecodeError || e.code() == ErrorCode::VerifyFailed)
            << to_string(e.code()) << " msg " << msg << " bit " << bit;
      }
    }
  }
}

TEST(Path, NoScalarBytesOnTheWire) {
  const auto c = curve_preset("test64");
  const auto m = gen_master(4, FieldPrime(65537), 3);
  for (int trial = 0; trial < 30; ++trial) {
    Rng rng(1000 + trial);
    Rng peek = rng;
    const auto ri = random_scalar(c, peek);
    const auto rj = random_scalar(c, peek);
    RecordingLink link;
    run_path(assign_share(m, 0), assign_share(m, 1), c, rng, link);
    for (const auto& s : {ri, rj}) {
      ByteWriter w;
      encode_bigint(w, s.value(), c.coord_width());
      const Bytes pattern = std::move(w).take();
      for (const auto& msg : link.sent) {
        EXPECT_EQ(std::search(msg.begin(), msg.end(), pattern.begin(), pattern.end()), msg.end());
      }
    }
  }
}
