#pragma once

// Three-message pairwise (LU) and path (LU + ECDH) key establishment.
//
// Pairwise:  i -> j  Msg1{col_i}
//            j -> i  Msg2{col_j, F_R}          j derives K_ji = row_j . col_i
//            i -> j  Msg3{F_I}                 i derives K_ij, checks F_R
//                                              j checks F_I
// Path adds ephemeral points Q_i = r_i P, Q_j = r_j P to Msg1/Msg2 and a tag
// over Q_ij = r_i r_j P to Msg3. Authentication tags are computed over the
// shared matrix entry and the whole transcript, so any change to a column,
// point or identity in flight breaks verification.

#include <optional>
#include <vector>

#include "tklu/ec.hpp"
#include "tklu/errors.hpp"
#include "tklu/key_matrix.hpp"
#include "tklu/wire.hpp"

namespace tklu {

enum class KeyKind : std::uint8_t { Pairwise = 1, Path = 2, Group = 3 };

const char* to_string(KeyKind k) noexcept;

struct SessionKey {
  KeyKind kind = KeyKind::Pairwise;
  Digest bytes{};
  std::vector<NodeId> peers;  // sorted

  friend bool operator==(const SessionKey&, const SessionKey&) = default;
};

enum class Role : std::uint8_t { Initiator, Responder };
enum class Phase : std::uint8_t { AwaitReply, AwaitConfirm, Complete, Failed };

/// One party's view of a single handshake. Moves forward only; a failed
/// state never yields a key.
class HandshakeState {
public:
  KeyKind kind() const noexcept { return kind_; }
  Role role() const noexcept { return role_; }
  Phase phase() const noexcept { return phase_; }
  NodeId self() const noexcept { return self_; }
  NodeId peer() const noexcept { return peer_; }

private:
  HandshakeState(KeyKind kind, Role role, const KeyShare& share)
      : kind_(kind), role_(role), self_(share.node_id), own_row_(share.row), own_col_(share.col) {}

  KeyKind kind_;
  Role role_;
  Phase phase_ = Phase::AwaitReply;
  NodeId self_;
  NodeId peer_ = 0;
  FieldVector own_row_;
  FieldVector own_col_;
  std::optional<FieldVector> peer_col_;
  std::optional<FieldElement> matrix_key_;
  std::optional<CurveParams> curve_;
  std::optional<Scalar> eph_secret_;
  CurvePoint own_eph_;
  CurvePoint peer_eph_;

  friend std::pair<HandshakeState, PairwiseMsg1> pw_init(const KeyShare&, NodeId);
  friend std::pair<HandshakeState, PairwiseMsg2> pw_respond(const KeyShare&, const PairwiseMsg1&);
  friend std::pair<SessionKey, PairwiseMsg3> pw_confirm(HandshakeState&, const PairwiseMsg2&);
  friend SessionKey pw_finalize(HandshakeState&, const PairwiseMsg3&);
  friend std::pair<HandshakeState, PathMsg1> pk_init_with_secret(const KeyShare&, NodeId, const CurveParams&, Scalar);
  friend std::pair<HandshakeState, PathMsg2> pk_respond_with_secret(const KeyShare&, const CurveParams&, Scalar,
                                                                    const PathMsg1&);
  friend std::pair<SessionKey, PathMsg3> pk_confirm(HandshakeState&, const PathMsg2&);
  friend SessionKey pk_finalize(HandshakeState&, const PathMsg3&);
};

/// Thrown by pk_confirm when the responder's key tag does not verify. Carries
/// the abort message the initiator must broadcast.
class PathAbortError : public Error {
public:
  PathAbortError(PathAbort abort, const std::string& what) : Error(ErrorCode::VerifyFailed, what), abort_(abort) {}
  const PathAbort& abort_message() const noexcept { return abort_; }

private:
  PathAbort abort_;
};

std::pair<HandshakeState, PairwiseMsg1> pw_init(const KeyShare& share, NodeId peer);
std::pair<HandshakeState, PairwiseMsg2> pw_respond(const KeyShare& share, const PairwiseMsg1& msg1);
std::pair<SessionKey, PairwiseMsg3> pw_confirm(HandshakeState& state, const PairwiseMsg2& msg2);
SessionKey pw_finalize(HandshakeState& state, const PairwiseMsg3& msg3);

std::pair<HandshakeState, PathMsg1> pk_init(const KeyShare& share, NodeId peer, const CurveParams& curve, Rng& rng);
std::pair<HandshakeState, PathMsg1> pk_init_with_secret(const KeyShare& share, NodeId peer, const CurveParams& curve,
                                                        Scalar r_i);
std::pair<HandshakeState, PathMsg2> pk_respond(const KeyShare& share, const CurveParams& curve, Rng& rng,
                                               const PathMsg1& msg1);
std::pair<HandshakeState, PathMsg2> pk_respond_with_secret(const KeyShare& share, const CurveParams& curve, Scalar r_j,
                                                           const PathMsg1& msg1);
std::pair<SessionKey, PathMsg3> pk_confirm(HandshakeState& state, const PathMsg2& msg2);
SessionKey pk_finalize(HandshakeState& state, const PathMsg3& msg3);

/// Traffic keys. peers are sorted before hashing.
SessionKey pairwise_session_key(const FieldElement& k, NodeId a, NodeId b);
SessionKey path_session_key(const CurveParams& curve, const CurvePoint& shared, NodeId a, NodeId b);

/// Carries encoded messages between two parties. Implementations may delay,
/// count, or alter the bytes.
class Link {
public:
  virtual ~Link() = default;
  virtual Bytes carry(NodeId from, NodeId to, Bytes wire) = 0;
  /// Network-wide error signal (path abort). Default drops it.
  virtual void broadcast(NodeId /*from*/, Bytes /*wire*/) {}
};

class DirectLink final : public Link {
public:
  Bytes carry(NodeId, NodeId, Bytes wire) override { return wire; }
};

struct HandshakeResult {
  SessionKey initiator_key;
  SessionKey responder_key;
};

/// Drives both parties through a full pairwise exchange over `link`,
/// decoding every message from the bytes the link delivers. Throws the first
/// protocol error either side raises.
HandshakeResult run_pairwise(const KeyShare& initiator, const KeyShare& responder, Link& link);

/// Same for the path protocol. Ephemeral scalars come from `rng` (initiator
/// first). On a tag failure the abort message is handed to link.broadcast
/// before the error propagates.
HandshakeResult run_path(const KeyShare& initiator, const KeyShare& responder, const CurveParams& curve, Rng& rng,
                         Link& link);

}  // namespace tklu
