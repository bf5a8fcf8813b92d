#pragma once

// Short-Weierstrass curves y^2 = x^3 + ax + b over a prime field, and ECDH on
// them. Not hardened against side channels.

#include <gmpxx.h>

#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tklu/bytes.hpp"

namespace tklu {

using BigInt = mpz_class;
using Rng = std::mt19937_64;

struct CurvePoint {
  bool infinity = true;
  BigInt x;
  BigInt y;

  static CurvePoint identity() { return {}; }
  static CurvePoint affine(BigInt px, BigInt py) { return {false, std::move(px), std::move(py)}; }

  friend bool operator==(const CurvePoint& a, const CurvePoint& b) {
    if (a.infinity || b.infinity) return a.infinity == b.infinity;
    return a.x == b.x && a.y == b.y;
  }
};

struct CurveParams {
  std::string name;
  BigInt p;
  BigInt a;
  BigInt b;
  CurvePoint base;
  BigInt order;

  /// Bytes per encoded coordinate.
  std::size_t coord_width() const;
  /// Bytes per encoded non-identity point (0x04 || x || y).
  std::size_t point_width() const { return 1 + 2 * coord_width(); }
};

/// A secret scalar in [1, order).
class Scalar {
public:
  /// Throws InvalidArgument if v is outside [1, order).
  Scalar(const CurveParams& curve, BigInt v);

  const BigInt& value() const noexcept { return v_; }
  friend bool operator==(const Scalar&, const Scalar&) = default;

private:
  BigInt v_;
};

struct EphemeralKeypair {
  Scalar secret;
  CurvePoint public_point;
};

/// Throws InvalidCurve naming the first violated condition.
void validate_curve(const CurveParams& curve);

bool on_curve(const CurveParams& curve, const CurvePoint& pt);
CurvePoint point_neg(const CurveParams& curve, const CurvePoint& pt);

/// Group law; throws InvalidPoint if either operand is not on `curve`.
CurvePoint point_add(const CurveParams& curve, const CurvePoint& lhs, const CurvePoint& rhs);

/// k * pt by double-and-add in Jacobian coordinates. k >= 0; 0 gives identity.
CurvePoint scalar_mul(const CurveParams& curve, const BigInt& k, const CurvePoint& pt);
inline CurvePoint scalar_mul(const CurveParams& curve, const Scalar& k, const CurvePoint& pt) {
  return scalar_mul(curve, k.value(), pt);
}

/// secret * peer_public. Throws InvalidPoint for identity or off-curve peers.
CurvePoint dh(const CurveParams& curve, const Scalar& secret, const CurvePoint& peer_public);

Scalar random_scalar(const CurveParams& curve, Rng& rng);
EphemeralKeypair keypair_from_secret(const CurveParams& curve, Scalar secret);
inline EphemeralKeypair make_keypair(const CurveParams& curve, Rng& rng) {
  return keypair_from_secret(curve, random_scalar(curve, rng));
}

/// Identity: 0x00. Otherwise 0x04 || x || y, fixed width big-endian.
void encode_point(ByteWriter& w, const CurveParams& curve, const CurvePoint& pt);
Bytes encode_point(const CurveParams& curve, const CurvePoint& pt);
/// Throws DecodeError on malformed, unreduced, or off-curve encodings.
CurvePoint decode_point(ByteReader& r, const CurveParams& curve);

/// Fixed-width big-endian encoding of an integer in [0, modulus).
void encode_bigint(ByteWriter& w, const BigInt& v, std::size_t width);
BigInt decode_bigint(ByteReader& r, std::size_t width);

/// Maps a digest of (label, payload || counter) into [1, order), bumping the
/// counter until the reduced value is nonzero.
Scalar hash_to_scalar(const CurveParams& curve, std::string_view domain_label, ByteView payload);

// Presets: "toy19" (19 points, for exhaustive tests), "test64", "secp256k1".
std::vector<std::string> curve_preset_names();
CurveParams curve_preset(std::string_view name);

/// Parses `p = ..., a = ..., b = ..., gx = ..., gy = ..., order = ...` lines
/// (decimal or 0x-prefixed hex, '#' comments) and validates the result.
CurveParams parse_curve_config(std::string_view text, std::string name = "custom");
CurveParams load_curve_config(const std::string& path);

}  // namespace tklu
