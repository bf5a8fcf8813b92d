#include "tklu/handshake.hpp"

#include <algorithm>

#include "tklu/hash.hpp"

namespace tklu {

namespace {

constexpr std::uint8_t kResponderTag = 'R';
constexpr std::uint8_t kInitiatorTag = 'I';
constexpr std::uint8_t kAbortBadKeyTag = 1;

struct Transcript {
  NodeId initiator;
  NodeId responder;
  const FieldVector& initiator_col;
  const FieldVector& responder_col;
  const CurveParams* curve = nullptr;  // path only
  const CurvePoint* initiator_eph = nullptr;
  const CurvePoint* responder_eph = nullptr;
};

HashTag auth_tag(std::string_view domain, std::uint8_t role, const FieldElement& k, const Transcript& t) {
  ByteWriter w;
  w.u8(role);
  encode_element(w, k);
  w.u32(t.initiator);
  w.u32(t.responder);
  encode_vector(w, t.initiator_col);
  encode_vector(w, t.responder_col);
  if (t.curve) {
    encode_point(w, *t.curve, *t.initiator_eph);
    encode_point(w, *t.curve, *t.responder_eph);
  }
  return hash_tag(domain, w.bytes());
}

HashTag dh_tag(const CurveParams& curve, const CurvePoint& shared, NodeId initiator, NodeId responder) {
  ByteWriter w;
  encode_point(w, curve, shared);
  w.u32(initiator);
  w.u32(responder);
  return hash_tag(label::kPathDh, w.bytes());
}

void check_peer_id(const KeyShare& share, NodeId claimed) {
  if (claimed == share.node_id || claimed >= share.dim()) {
    throw Error(ErrorCode::VerifyFailed, "claimed identity cannot hold a share of this matrix");
  }
}

void check_column(const FieldVector& col, std::size_t n) {
  if (col.size() != n) throw Error(ErrorCode::DecodeError, "column length does not match matrix dimension");
}

[[noreturn]] void fail(Phase& phase, ErrorCode code, const std::string& what) {
  phase = Phase::Failed;
  throw Error(code, what);
}

SessionKey make_key(KeyKind kind, std::string_view domain, ByteWriter& w, NodeId a, NodeId b) {
  const auto lo = std::min(a, b), hi = std::max(a, b);
  w.u32(lo);
  w.u32(hi);
  return SessionKey{kind, hash_tag(domain, w.bytes()), {lo, hi}};
}

}  // namespace

const char* to_string(KeyKind k) noexcept {
  switch (k) {
    case KeyKind::Pairwise: return "pairwise";
    case KeyKind::Path: return "path";
    case KeyKind::Group: return "group";
  }
  return "?";
}

SessionKey pairwise_session_key(const FieldElement& k, NodeId a, NodeId b) {
  ByteWriter w;
  encode_element(w, k);
  return make_key(KeyKind::Pairwise, label::kPairwiseKey, w, a, b);
}

SessionKey path_session_key(const CurveParams& curve, const CurvePoint& shared, NodeId a, NodeId b) {
  ByteWriter w;
  encode_point(w, curve, shared);
  return make_key(KeyKind::Path, label::kPathKey, w, a, b);
}

// ---- pairwise ---------------------------------------------------------------

std::pair<HandshakeState, PairwiseMsg1> pw_init(const KeyShare& share, NodeId peer) {
  if (peer == share.node_id) throw Error(ErrorCode::InvalidArgument, "cannot handshake with self");
  if (peer >= share.dim()) throw Error(ErrorCode::InvalidArgument, "peer id outside matrix");
  HandshakeState st(KeyKind::Pairwise, Role::Initiator, share);
  st.peer_ = peer;
  PairwiseMsg1 msg{share.node_id, share.col};
  return {std::move(st), std::move(msg)};
}

std::pair<HandshakeState, PairwiseMsg2> pw_respond(const KeyShare& share, const PairwiseMsg1& msg1) {
  HandshakeState st(KeyKind::Pairwise, Role::Responder, share);
  check_column(msg1.col, share.dim());
  check_peer_id(share, msg1.sender);
  st.peer_ = msg1.sender;
  st.peer_col_ = msg1.col;
  st.matrix_key_ = derive_key(share.row, msg1.col);
  const Transcript t{msg1.sender, share.node_id, msg1.col, share.col};
  PairwiseMsg2 reply{share.node_id, share.col, auth_tag(label::kPairwiseAuth, kResponderTag, *st.matrix_key_, t)};
  st.phase_ = Phase::AwaitConfirm;
  return {std::move(st), std::move(reply)};
}

std::pair<SessionKey, PairwiseMsg3> pw_confirm(HandshakeState& st, const PairwiseMsg2& msg2) {
  if (st.kind_ != KeyKind::Pairwise || st.role_ != Role::Initiator || st.phase_ != Phase::AwaitReply) {
    throw Error(ErrorCode::WrongPhase, "pw_confirm needs an initiator awaiting a reply");
  }
  if (msg2.sender != st.peer_) fail(st.phase_, ErrorCode::VerifyFailed, "reply from unexpected node");
  if (msg2.col.size() != st.own_row_.size()) fail(st.phase_, ErrorCode::DecodeError, "column length mismatch");
  const auto k = derive_key(st.own_row_, msg2.col);
  const Transcript t{st.self_, st.peer_, st.own_col_, msg2.col};
  if (!tags_equal(msg2.tag, auth_tag(label::kPairwiseAuth, kResponderTag, k, t))) {
    fail(st.phase_, ErrorCode::VerifyFailed, "responder tag mismatch");
  }
  st.peer_col_ = msg2.col;
  st.matrix_key_ = k;
  st.phase_ = Phase::Complete;
  PairwiseMsg3 confirm{st.self_, auth_tag(label::kPairwiseAuth, kInitiatorTag, k, t)};
  return {pairwise_session_key(k, st.self_, st.peer_), confirm};
}

SessionKey pw_finalize(HandshakeState& st, const PairwiseMsg3& msg3) {
  if (st.kind_ != KeyKind::Pairwise || st.role_ != Role::Responder || st.phase_ != Phase::AwaitConfirm) {
    throw Error(ErrorCode::WrongPhase, "pw_finalize needs a responder awaiting confirmation");
  }
  if (msg3.sender != st.peer_) fail(st.phase_, ErrorCode::VerifyFailed, "confirmation from unexpected node");
  const Transcript t{st.peer_, st.self_, *st.peer_col_, st.own_col_};
  if (!tags_equal(msg3.tag, auth_tag(label::kPairwiseAuth, kInitiatorTag, *st.matrix_key_, t))) {
    fail(st.phase_, ErrorCode::VerifyFailed, "initiator tag mismatch");
  }
  st.phase_ = Phase::Complete;
  return pairwise_session_key(*st.matrix_key_, st.self_, st.peer_);
}

// ---- path -------------------------------------------------------------------

std::pair<HandshakeState, PathMsg1> pk_init(const KeyShare& share, NodeId peer, const CurveParams& curve, Rng& rng) {
  return pk_init_with_secret(share, peer, curve, random_scalar(curve, rng));
}

std::pair<HandshakeState, PathMsg1> pk_init_with_secret(const KeyShare& share, NodeId peer, const CurveParams& curve,
                                                        Scalar r_i) {
  if (peer == share.node_id) throw Error(ErrorCode::InvalidArgument, "cannot handshake with self");
  if (peer >= share.dim()) throw Error(ErrorCode::InvalidArgument, "peer id outside matrix");
  HandshakeState st(KeyKind::Path, Role::Initiator, share);
  st.peer_ = peer;
  st.curve_ = curve;
  auto kp = keypair_from_secret(curve, std::move(r_i));
  st.eph_secret_ = kp.secret;
  st.own_eph_ = kp.public_point;
  PathMsg1 msg{share.node_id, share.col, std::move(kp.public_point)};
  return {std::move(st), std::move(msg)};
}

std::pair<HandshakeState, PathMsg2> pk_respond(const KeyShare& share, const CurveParams& curve, Rng& rng,
                                               const PathMsg1& msg1) {
  // Validate before drawing randomness so a rejected request leaves rng untouched.
  if (msg1.eph.infinity || !on_curve(curve, msg1.eph)) throw Error(ErrorCode::InvalidPoint, "ephemeral point not on curve");
  return pk_respond_with_secret(share, curve, random_scalar(curve, rng), msg1);
}

std::pair<HandshakeState, PathMsg2> pk_respond_with_secret(const KeyShare& share, const CurveParams& curve, Scalar r_j,
                                                           const PathMsg1& msg1) {
  if (msg1.eph.infinity || !on_curve(curve, msg1.eph)) throw Error(ErrorCode::InvalidPoint, "ephemeral point not on curve");
  HandshakeState st(KeyKind::Path, Role::Responder, share);
  check_column(msg1.col, share.dim());
  check_peer_id(share, msg1.sender);
  st.peer_ = msg1.sender;
  st.curve_ = curve;
  st.peer_col_ = msg1.col;
  st.peer_eph_ = msg1.eph;
  st.matrix_key_ = derive_key(share.row, msg1.col);
  auto kp = keypair_from_secret(curve, std::move(r_j));
  st.eph_secret_ = kp.secret;
  st.own_eph_ = kp.public_point;
  const Transcript t{msg1.sender, share.node_id, msg1.col, share.col, &curve, &msg1.eph, &st.own_eph_};
  PathMsg2 reply{share.node_id, share.col, auth_tag(label::kPathAuth, kResponderTag, *st.matrix_key_, t), st.own_eph_};
  st.phase_ = Phase::AwaitConfirm;
  return {std::move(st), std::move(reply)};
}

std::pair<SessionKey, PathMsg3> pk_confirm(HandshakeState& st, const PathMsg2& msg2) {
  if (st.kind_ != KeyKind::Path || st.role_ != Role::Initiator || st.phase_ != Phase::AwaitReply) {
    throw Error(ErrorCode::WrongPhase, "pk_confirm needs an initiator awaiting a reply");
  }
  const auto& curve = *st.curve_;
  auto abort = [&](const std::string& why) {
    st.phase_ = Phase::Failed;
    throw PathAbortError(PathAbort{st.self_, st.peer_, kAbortBadKeyTag}, why);
  };
  if (msg2.eph.infinity || !on_curve(curve, msg2.eph)) fail(st.phase_, ErrorCode::InvalidPoint, "ephemeral point not on curve");
  if (msg2.sender != st.peer_) abort("reply from unexpected node");
  if (msg2.col.size() != st.own_row_.size()) fail(st.phase_, ErrorCode::DecodeError, "column length mismatch");
  const auto k = derive_key(st.own_row_, msg2.col);
  const Transcript t{st.self_, st.peer_, st.own_col_, msg2.col, &curve, &st.own_eph_, &msg2.eph};
  if (!tags_equal(msg2.key_tag, auth_tag(label::kPathAuth, kResponderTag, k, t))) abort("responder key tag mismatch");

  const auto shared = dh(curve, *st.eph_secret_, msg2.eph);
  st.peer_col_ = msg2.col;
  st.peer_eph_ = msg2.eph;
  st.matrix_key_ = k;
  st.phase_ = Phase::Complete;
  PathMsg3 confirm{st.self_, auth_tag(label::kPathAuth, kInitiatorTag, k, t), dh_tag(curve, shared, st.self_, st.peer_)};
  return {path_session_key(curve, shared, st.self_, st.peer_), confirm};
}

SessionKey pk_finalize(HandshakeState& st, const PathMsg3& msg3) {
  if (st.kind_ != KeyKind::Path || st.role_ != Role::Responder || st.phase_ != Phase::AwaitConfirm) {
    throw Error(ErrorCode::WrongPhase, "pk_finalize needs a responder awaiting confirmation");
  }
  const auto& curve = *st.curve_;
  if (msg3.sender != st.peer_) fail(st.phase_, ErrorCode::VerifyFailed, "confirmation from unexpected node");
  const Transcript t{st.peer_, st.self_, *st.peer_col_, st.own_col_, &curve, &st.peer_eph_, &st.own_eph_};
  const auto shared = dh(curve, *st.eph_secret_, st.peer_eph_);
  const bool key_ok = tags_equal(msg3.key_tag, auth_tag(label::kPathAuth, kInitiatorTag, *st.matrix_key_, t));
  const bool dh_ok = tags_equal(msg3.dh_tag, dh_tag(curve, shared, st.peer_, st.self_));
  if (!key_ok || !dh_ok) fail(st.phase_, ErrorCode::VerifyFailed, key_ok ? "dh tag mismatch" : "initiator key tag mismatch");
  st.phase_ = Phase::Complete;
  return path_session_key(curve, shared, st.self_, st.peer_);
}

// ---- drivers ----------------------------------------------------------------

HandshakeResult run_pairwise(const KeyShare& initiator, const KeyShare& responder, Link& link) {
  const auto q = initiator.row.modulus();
  const NodeId i = initiator.node_id, j = responder.node_id;

  auto [ist, m1] = pw_init(initiator, j);
  const auto w1 = link.carry(i, j, encode(m1));
  auto [rst, m2] = pw_respond(responder, decode_pairwise1(w1, responder.row.modulus()));
  const auto w2 = link.carry(j, i, encode(m2));
  auto [ikey, m3] = pw_confirm(ist, decode_pairwise2(w2, q));
  const auto w3 = link.carry(i, j, encode(m3));
  auto rkey = pw_finalize(rst, decode_pairwise3(w3));
  return {std::move(ikey), std::move(rkey)};
}

HandshakeResult run_path(const KeyShare& initiator, const KeyShare& responder, const CurveParams& curve, Rng& rng,
                         Link& link) {
  const NodeId i = initiator.node_id, j = responder.node_id;
  auto [ist, m1] = pk_init(initiator, j, curve, rng);
  const auto w1 = link.carry(i, j, encode(m1, curve));
  auto [rst, m2] = pk_respond(responder, curve, rng, decode_path1(w1, responder.row.modulus(), curve));
  const auto w2 = link.carry(j, i, encode(m2, curve));
  std::pair<SessionKey, PathMsg3> confirmed;
  try {
    confirmed = pk_confirm(ist, decode_path2(w2, initiator.row.modulus(), curve));
  } catch (const PathAbortError& e) {
    link.broadcast(i, encode(e.abort_message()));
    throw;
  }
  const auto w3 = link.carry(i, j, encode(confirmed.second));
  auto rkey = pk_finalize(rst, decode_path3(w3));
  return {std::move(confirmed.first), std::move(rkey)};
}

}  // namespace tklu
