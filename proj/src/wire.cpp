#include "tklu/wire.hpp"

#include "tklu/errors.hpp"

namespace tklu {

namespace {

ByteWriter header(MsgType t, NodeId sender) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(t));
  w.u32(sender);
  return w;
}

NodeId read_header(ByteReader& r, MsgType expected) {
  const auto t = r.u8();
  if (t != static_cast<std::uint8_t>(expected)) throw Error(ErrorCode::DecodeError, std::string("expected ") + to_string(expected));
  return r.u32();
}

}  // namespace

const char* to_string(MsgType t) noexcept {
  switch (t) {
    case MsgType::PairwiseInit: return "pw1";
    case MsgType::PairwiseReply: return "pw2";
    case MsgType::PairwiseConfirm: return "pw3";
    case MsgType::PathInit: return "path1";
    case MsgType::PathReply: return "path2";
    case MsgType::PathConfirm: return "path3";
    case MsgType::PathAbort: return "path_abort";
    case MsgType::GroupBroadcast: return "group_bcast";
    case MsgType::Revocation: return "revoke";
  }
  return "unknown";
}

MsgType peek_type(ByteView wire) {
  if (wire.empty()) throw Error(ErrorCode::DecodeError, "empty message");
  switch (wire[0]) {
    case 0x01: case 0x02: case 0x03: case 0x11: case 0x12: case 0x13: case 0x1f: case 0x21: case 0x31:
      return static_cast<MsgType>(wire[0]);
    default:
      throw Error(ErrorCode::DecodeError, "unknown message type");
  }
}

Bytes encode(const PairwiseMsg1& m) {
  auto w = header(MsgType::PairwiseInit, m.sender);
  encode_vector(w, m.col);
  return std::move(w).take();
}

Bytes encode(const PairwiseMsg2& m) {
  auto w = header(MsgType::PairwiseReply, m.sender);
  encode_vector(w, m.col);
  w.raw(m.tag);
  return std::move(w).take();
}

Bytes encode(const PairwiseMsg3& m) {
  auto w = header(MsgType::PairwiseConfirm, m.sender);
  w.raw(m.tag);
  return std::move(w).take();
}

Bytes encode(const PathMsg1& m, const CurveParams& curve) {
  auto w = header(MsgType::PathInit, m.sender);
  encode_vector(w, m.col);
  encode_point(w, curve, m.eph);
  return std::move(w).take();
}

Bytes encode(const PathMsg2& m, const CurveParams& curve) {
  auto w = header(MsgType::PathReply, m.sender);
  encode_vector(w, m.col);
  w.raw(m.key_tag);
  encode_point(w, curve, m.eph);
  return std::move(w).take();
}

Bytes encode(const PathMsg3& m) {
  auto w = header(MsgType::PathConfirm, m.sender);
  w.raw(m.key_tag);
  w.raw(m.dh_tag);
  return std::move(w).take();
}

Bytes encode(const PathAbort& m) {
  auto w = header(MsgType::PathAbort, m.sender);
  w.u32(m.peer);
  w.u8(m.reason);
  return std::move(w).take();
}

PairwiseMsg1 decode_pairwise1(ByteView wire, FieldPrime q) {
  ByteReader r(wire);
  PairwiseMsg1 m{read_header(r, MsgType::PairwiseInit), decode_vector(r, q)};
  r.expect_end();
  return m;
}

PairwiseMsg2 decode_pairwise2(ByteView wire, FieldPrime q) {
  ByteReader r(wire);
  const auto sender = read_header(r, MsgType::PairwiseReply);
  auto col = decode_vector(r, q);
  PairwiseMsg2 m{sender, std::move(col), r.digest()};
  r.expect_end();
  return m;
}

PairwiseMsg3 decode_pairwise3(ByteView wire) {
  ByteReader r(wire);
  const auto sender = read_header(r, MsgType::PairwiseConfirm);
  PairwiseMsg3 m{sender, r.digest()};
  r.expect_end();
  return m;
}

PathMsg1 decode_path1(ByteView wire, FieldPrime q, const CurveParams& curve) {
  ByteReader r(wire);
  const auto sender = read_header(r, MsgType::PathInit);
  auto col = decode_vector(r, q);
  PathMsg1 m{sender, std::move(col), decode_point(r, curve)};
  r.expect_end();
  return m;
}

PathMsg2 decode_path2(ByteView wire, FieldPrime q, const CurveParams& curve) {
  ByteReader r(wire);
  const auto sender = read_header(r, MsgType::PathReply);
  auto col = decode_vector(r, q);
  auto tag = r.digest();
  PathMsg2 m{sender, std::move(col), tag, decode_point(r, curve)};
  r.expect_end();
  return m;
}

PathMsg3 decode_path3(ByteView wire) {
  ByteReader r(wire);
  const auto sender = read_header(r, MsgType::PathConfirm);
  auto key_tag = r.digest();
  PathMsg3 m{sender, key_tag, r.digest()};
  r.expect_end();
  return m;
}

PathAbort decode_abort(ByteView wire) {
  ByteReader r(wire);
  const auto sender = read_header(r, MsgType::PathAbort);
  const auto peer = r.u32();
  PathAbort m{sender, peer, r.u8()};
  r.expect_end();
  return m;
}

}  // namespace tklu
