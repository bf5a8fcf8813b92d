#include "tklu/field.hpp"

#include <bit>

#include "tklu/errors.hpp"

namespace tklu {

namespace {

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) noexcept {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

}  // namespace

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % q);
}

std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) noexcept {
  std::uint64_t s = a + b;  // q < 2^63, no overflow
  return s >= q ? s - q : s;
}

// Deterministic Miller-Rabin; these bases cover every 64-bit integer.
bool is_prime_u64(std::uint64_t n) noexcept {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

FieldPrime::FieldPrime(std::uint64_t q) : q_(q) {
  if (q > kMaxModulus || !is_prime_u64(q)) throw Error(ErrorCode::InvalidArgument, "field modulus must be a prime below 2^63");
}

std::size_t FieldPrime::element_width() const noexcept {
  return static_cast<std::size_t>((std::bit_width(q_) + 7) / 8);
}

FieldPrime smallest_prime_geq(std::uint64_t bound) {
  if (bound < 2) throw Error(ErrorCode::InvalidArgument, "prime bound must be >= 2");
  if (bound >= FieldPrime::kMaxModulus) throw Error(ErrorCode::InvalidArgument, "prime bound too large");
  std::uint64_t c = bound + 1;
  while (!is_prime_u64(c)) ++c;
  return FieldPrime(c);
}

FieldElement::FieldElement(std::uint64_t v, FieldPrime q) : value(v), modulus(q) {
  if (v >= q.value()) throw Error(ErrorCode::InvalidArgument, "field element out of range");
}

static void require_same(const FieldElement& a, const FieldElement& b) {
  if (a.modulus != b.modulus) throw Error(ErrorCode::ModulusMismatch, "operands from different fields");
}

FieldElement ff_add(const FieldElement& a, const FieldElement& b) {
  require_same(a, b);
  return FieldElement(add_mod(a.value, b.value, a.modulus.value()), a.modulus);
}

FieldElement ff_mul(const FieldElement& a, const FieldElement& b) {
  require_same(a, b);
  return FieldElement(mul_mod(a.value, b.value, a.modulus.value()), a.modulus);
}

FieldElement ff_inv(const FieldElement& a) {
  if (a.value == 0) throw Error(ErrorCode::InvalidArgument, "zero has no inverse");
  // Extended Euclid on signed 128-bit to keep the Bezout coefficients exact.
  __int128 r0 = a.modulus.value(), r1 = a.value;
  __int128 t0 = 0, t1 = 1;
  while (r1 != 0) {
    __int128 quot = r0 / r1;
    __int128 tmp = r0 - quot * r1;
    r0 = r1;
    r1 = tmp;
    tmp = t0 - quot * t1;
    t0 = t1;
    t1 = tmp;
  }
  if (t0 < 0) t0 += a.modulus.value();
  return FieldElement(static_cast<std::uint64_t>(t0), a.modulus);
}

FieldVector::FieldVector(FieldPrime q, std::vector<std::uint64_t> values) : q_(q), values_(std::move(values)) {
  for (auto v : values_) {
    if (v >= q_.value()) throw Error(ErrorCode::InvalidArgument, "field element out of range");
  }
}

void FieldVector::set(std::size_t i, std::uint64_t v) {
  if (v >= q_.value()) throw Error(ErrorCode::InvalidArgument, "field element out of range");
  values_.at(i) = v;
}

void encode_element(ByteWriter& w, const FieldElement& e) { w.uint_fixed(e.value, e.modulus.element_width()); }

FieldElement decode_element(ByteReader& r, FieldPrime q) {
  auto v = r.uint_fixed(q.element_width());
  if (v >= q.value()) throw Error(ErrorCode::DecodeError, "field element not reduced");
  return FieldElement(v, q);
}

void encode_vector(ByteWriter& w, const FieldVector& v) {
  w.u32(static_cast<std::uint32_t>(v.size()));
  const auto width = v.modulus().element_width();
  for (auto x : v.values()) w.uint_fixed(x, width);
}

FieldVector decode_vector(ByteReader& r, FieldPrime q) {
  const auto count = r.u32();
  const auto width = q.element_width();
  if (r.remaining() / width < count) throw Error(ErrorCode::DecodeError, "vector count exceeds message");
  std::vector<std::uint64_t> values(count);
  for (auto& v : values) {
    v = r.uint_fixed(width);
    if (v >= q.value()) throw Error(ErrorCode::DecodeError, "field element not reduced");
  }
  return FieldVector(q, std::move(values));
}

}  // namespace tklu
