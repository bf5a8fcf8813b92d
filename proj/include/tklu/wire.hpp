#pragma once

// Bit-exact wire format shared by every protocol message: a 1-byte type, the
// 4-byte sender id, then a type-specific body. Big-endian throughout; columns
// are count-prefixed fixed-width field elements, points use the ec encoding,
// tags are raw 32 bytes.

#include <cstdint>
#include <optional>

#include "tklu/ec.hpp"
#include "tklu/field.hpp"
#include "tklu/hash.hpp"
#include "tklu/key_matrix.hpp"

namespace tklu {

enum class MsgType : std::uint8_t {
  PairwiseInit = 0x01,
  PairwiseReply = 0x02,
  PairwiseConfirm = 0x03,
  PathInit = 0x11,
  PathReply = 0x12,
  PathConfirm = 0x13,
  PathAbort = 0x1f,
  GroupBroadcast = 0x21,
  Revocation = 0x31,
};

const char* to_string(MsgType t) noexcept;

/// Reads the type byte without consuming anything; throws DecodeError for
/// empty input or unknown types.
MsgType peek_type(ByteView wire);

struct PairwiseMsg1 {
  NodeId sender = 0;
  FieldVector col;
};

struct PairwiseMsg2 {
  NodeId sender = 0;
  FieldVector col;
  HashTag tag{};
};

struct PairwiseMsg3 {
  NodeId sender = 0;
  HashTag tag{};
};

struct PathMsg1 {
  NodeId sender = 0;
  FieldVector col;
  CurvePoint eph;
};

struct PathMsg2 {
  NodeId sender = 0;
  FieldVector col;
  HashTag key_tag{};
  CurvePoint eph;
};

struct PathMsg3 {
  NodeId sender = 0;
  HashTag key_tag{};
  HashTag dh_tag{};
};

/// Error signal a path initiator broadcasts when the responder fails
/// authentication. Carries identities and a reason code only.
struct PathAbort {
  NodeId sender = 0;
  NodeId peer = 0;
  std::uint8_t reason = 0;
};

Bytes encode(const PairwiseMsg1& m);
Bytes encode(const PairwiseMsg2& m);
Bytes encode(const PairwiseMsg3& m);
Bytes encode(const PathMsg1& m, const CurveParams& curve);
Bytes encode(const PathMsg2& m, const CurveParams& curve);
Bytes encode(const PathMsg3& m);
Bytes encode(const PathAbort& m);

// Decoders reject wrong type bytes, truncation, trailing data, unreduced
// field elements and off-curve points with DecodeError.
PairwiseMsg1 decode_pairwise1(ByteView wire, FieldPrime q);
PairwiseMsg2 decode_pairwise2(ByteView wire, FieldPrime q);
PairwiseMsg3 decode_pairwise3(ByteView wire);
PathMsg1 decode_path1(ByteView wire, FieldPrime q, const CurveParams& curve);
PathMsg2 decode_path2(ByteView wire, FieldPrime q, const CurveParams& curve);
PathMsg3 decode_path3(ByteView wire);
PathAbort decode_abort(ByteView wire);

}  // namespace tklu
