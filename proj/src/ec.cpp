#include "tklu/ec.hpp"

#include <algorithm>

#include "tklu/errors.hpp"
#include "tklu/hash.hpp"

namespace tklu {

namespace {

BigInt mod(const BigInt& x, const BigInt& m) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return r;
}

BigInt inverse(const BigInt& x, const BigInt& m) {
  BigInt r;
  if (mpz_invert(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t()) == 0) throw Error(ErrorCode::InvalidArgument, "value not invertible");
  return r;
}

struct Jacobian {
  BigInt x, y, z;  // z == 0 is the identity
};

Jacobian to_jacobian(const CurvePoint& pt) {
  if (pt.infinity) return {1, 1, 0};
  return {pt.x, pt.y, 1};
}

CurvePoint to_affine(const CurveParams& c, const Jacobian& j) {
  if (j.z == 0) return CurvePoint::identity();
  BigInt zi = inverse(j.z, c.p);
  BigInt zi2 = mod(zi * zi, c.p);
  return CurvePoint::affine(mod(j.x * zi2, c.p), mod(j.y * zi2 * zi, c.p));
}

Jacobian jdouble(const CurveParams& c, const Jacobian& P) {
  if (P.z == 0 || P.y == 0) return {1, 1, 0};
  const BigInt& p = c.p;
  BigInt yy = mod(P.y * P.y, p);
  BigInt s = mod(4 * P.x * yy, p);
  BigInt zz = mod(P.z * P.z, p);
  BigInt m = mod(3 * P.x * P.x + c.a * zz * zz, p);
  BigInt x3 = mod(m * m - 2 * s, p);
  BigInt y3 = mod(m * (s - x3) - 8 * yy * yy, p);
  BigInt z3 = mod(2 * P.y * P.z, p);
  return {std::move(x3), std::move(y3), std::move(z3)};
}

Jacobian jadd(const CurveParams& c, const Jacobian& P, const Jacobian& Q) {
  if (P.z == 0) return Q;
  if (Q.z == 0) return P;
  const BigInt& p = c.p;
  BigInt z1z1 = mod(P.z * P.z, p);
  BigInt z2z2 = mod(Q.z * Q.z, p);
  BigInt u1 = mod(P.x * z2z2, p);
  BigInt u2 = mod(Q.x * z1z1, p);
  BigInt s1 = mod(P.y * Q.z * z2z2, p);
  BigInt s2 = mod(Q.y * P.z * z1z1, p);
  if (u1 == u2) {
    if (s1 != s2) return {1, 1, 0};
    return jdouble(c, P);
  }
  BigInt h = mod(u2 - u1, p);
  BigInt r = mod(s2 - s1, p);
  BigInt hh = mod(h * h, p);
  BigInt hhh = mod(hh * h, p);
  BigInt v = mod(u1 * hh, p);
  BigInt x3 = mod(r * r - hhh - 2 * v, p);
  BigInt y3 = mod(r * (v - x3) - s1 * hhh, p);
  BigInt z3 = mod(h * P.z * Q.z, p);
  return {std::move(x3), std::move(y3), std::move(z3)};
}

}  // namespace

std::size_t CurveParams::coord_width() const { return (mpz_sizeinbase(p.get_mpz_t(), 2) + 7) / 8; }

Scalar::Scalar(const CurveParams& curve, BigInt v) : v_(std::move(v)) {
  if (v_ < 1 || v_ >= curve.order) throw Error(ErrorCode::InvalidArgument, "scalar outside [1, order)");
}

bool on_curve(const CurveParams& c, const CurvePoint& pt) {
  if (pt.infinity) return true;
  if (pt.x < 0 || pt.x >= c.p || pt.y < 0 || pt.y >= c.p) return false;
  return mod(pt.y * pt.y - (pt.x * pt.x * pt.x + c.a * pt.x + c.b), c.p) == 0;
}

void validate_curve(const CurveParams& c) {
  if (c.p < 3 || mpz_probab_prime_p(c.p.get_mpz_t(), 40) == 0) throw Error(ErrorCode::InvalidCurve, "field modulus is not an odd prime");
  if (c.a < 0 || c.a >= c.p || c.b < 0 || c.b >= c.p) throw Error(ErrorCode::InvalidCurve, "coefficients not reduced");
  if (mod(4 * c.a * c.a * c.a + 27 * c.b * c.b, c.p) == 0) throw Error(ErrorCode::InvalidCurve, "singular curve");
  if (c.base.infinity || !on_curve(c, c.base)) throw Error(ErrorCode::InvalidCurve, "base point not on curve");
  if (c.order < 2 || mpz_probab_prime_p(c.order.get_mpz_t(), 40) == 0) throw Error(ErrorCode::InvalidCurve, "order is not prime");
  if (!scalar_mul(c, c.order, c.base).infinity) throw Error(ErrorCode::InvalidCurve, "order * P is not the identity");
}

CurvePoint point_neg(const CurveParams& c, const CurvePoint& pt) {
  if (pt.infinity) return pt;
  return CurvePoint::affine(pt.x, mod(-pt.y, c.p));
}

CurvePoint point_add(const CurveParams& c, const CurvePoint& lhs, const CurvePoint& rhs) {
  if (!on_curve(c, lhs) || !on_curve(c, rhs)) throw Error(ErrorCode::InvalidPoint, "point not on curve");
  if (lhs.infinity) return rhs;
  if (rhs.infinity) return lhs;
  BigInt lambda;
  if (lhs.x == rhs.x) {
    if (mod(lhs.y + rhs.y, c.p) == 0) return CurvePoint::identity();
    lambda = mod((3 * lhs.x * lhs.x + c.a) * inverse(2 * lhs.y, c.p), c.p);
  } else {
    lambda = mod((rhs.y - lhs.y) * inverse(mod(rhs.x - lhs.x, c.p), c.p), c.p);
  }
  BigInt x3 = mod(lambda * lambda - lhs.x - rhs.x, c.p);
  BigInt y3 = mod(lambda * (lhs.x - x3) - lhs.y, c.p);
  return CurvePoint::affine(std::move(x3), std::move(y3));
}

CurvePoint scalar_mul(const CurveParams& c, const BigInt& k, const CurvePoint& pt) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "negative scalar");
  if (!on_curve(c, pt)) throw Error(ErrorCode::InvalidPoint, "point not on curve");
  if (k == 0 || pt.infinity) return CurvePoint::identity();
  const Jacobian base = to_jacobian(pt);
  Jacobian acc{1, 1, 0};
  for (auto bit = static_cast<long>(mpz_sizeinbase(k.get_mpz_t(), 2)); bit-- > 0;) {
    acc = jdouble(c, acc);
    if (mpz_tstbit(k.get_mpz_t(), static_cast<mp_bitcnt_t>(bit))) acc = jadd(c, acc, base);
  }
  return to_affine(c, acc);
}

CurvePoint dh(const CurveParams& c, const Scalar& secret, const CurvePoint& peer_public) {
  if (peer_public.infinity) throw Error(ErrorCode::InvalidPoint, "peer public key is the identity");
  if (!on_curve(c, peer_public)) throw Error(ErrorCode::InvalidPoint, "peer public key not on curve");
  return scalar_mul(c, secret, peer_public);
}

Scalar random_scalar(const CurveParams& c, Rng& rng) {
  const auto bits = mpz_sizeinbase(c.order.get_mpz_t(), 2);
  const auto words = (bits + 63) / 64;
  std::vector<std::uint64_t> buf(words);
  BigInt v;
  while (true) {
    for (auto& w : buf) w = rng();
    if (bits % 64) buf.back() &= (std::uint64_t{1} << (bits % 64)) - 1;
    mpz_import(v.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0, buf.data());
    if (v >= 1 && v < c.order) return Scalar(c, v);
  }
}

EphemeralKeypair keypair_from_secret(const CurveParams& c, Scalar secret) {
  auto pub = scalar_mul(c, secret, c.base);
  return {std::move(secret), std::move(pub)};
}

void encode_bigint(ByteWriter& w, const BigInt& v, std::size_t width) {
  if (v < 0) throw Error(ErrorCode::InvalidArgument, "negative integer");
  std::size_t count = 0;
  Bytes tmp((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8 + 1);
  mpz_export(tmp.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
  if (count > width) throw Error(ErrorCode::InvalidArgument, "integer wider than encoding");
  for (std::size_t i = count; i < width; ++i) w.u8(0);
  w.raw(ByteView(tmp.data(), count));
}

BigInt decode_bigint(ByteReader& r, std::size_t width) {
  auto raw = r.raw(width);
  BigInt v;
  mpz_import(v.get_mpz_t(), raw.size(), 1, 1, 1, 0, raw.data());
  return v;
}

void encode_point(ByteWriter& w, const CurveParams& c, const CurvePoint& pt) {
  if (pt.infinity) {
    w.u8(0x00);
    return;
  }
  w.u8(0x04);
  encode_bigint(w, pt.x, c.coord_width());
  encode_bigint(w, pt.y, c.coord_width());
}

Bytes encode_point(const CurveParams& c, const CurvePoint& pt) {
  ByteWriter w;
  encode_point(w, c, pt);
  return std::move(w).take();
}

CurvePoint decode_point(ByteReader& r, const CurveParams& c) {
  const auto tag = r.u8();
  if (tag == 0x00) return CurvePoint::identity();
  if (tag != 0x04) throw Error(ErrorCode::DecodeError, "unknown point encoding");
  BigInt x = decode_bigint(r, c.coord_width());
  BigInt y = decode_bigint(r, c.coord_width());
  auto pt = CurvePoint::affine(std::move(x), std::move(y));
  if (!on_curve(c, pt)) throw Error(ErrorCode::DecodeError, "point not on curve");
  return pt;
}

Scalar hash_to_scalar(const CurveParams& c, std::string_view domain_label, ByteView payload) {
  Bytes buf(payload.begin(), payload.end());
  buf.resize(payload.size() + 4);
  for (std::uint32_t counter = 0;; ++counter) {
    for (int i = 0; i < 4; ++i) buf[payload.size() + i] = static_cast<std::uint8_t>(counter >> (24 - 8 * i));
    auto digest = hash_tag(domain_label, buf);
    BigInt v;
    mpz_import(v.get_mpz_t(), digest.size(), 1, 1, 1, 0, digest.data());
    v = mod(v, c.order);
    if (v != 0) return Scalar(c, std::move(v));
  }
}

}  // namespace tklu
