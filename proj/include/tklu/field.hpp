#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tklu/bytes.hpp"

namespace tklu {

/// Prime modulus of GF(q). Restricted to q < 2^63 so that products fit in
/// 128-bit intermediates and sums of two elements never overflow.
class FieldPrime {
public:
  static constexpr std::uint64_t kMaxModulus = (std::uint64_t{1} << 63) - 1;

  /// Throws InvalidArgument unless `q` is a prime below 2^63.
  explicit FieldPrime(std::uint64_t q);

  std::uint64_t value() const noexcept { return q_; }
  /// Width of the canonical big-endian element encoding: ceil(bits(q) / 8).
  std::size_t element_width() const noexcept;

  friend bool operator==(const FieldPrime&, const FieldPrime&) = default;

private:
  std::uint64_t q_;
};

struct FieldElement {
  std::uint64_t value = 0;
  FieldPrime modulus;

  FieldElement(std::uint64_t v, FieldPrime q);
  friend bool operator==(const FieldElement&, const FieldElement&) = default;
};

bool is_prime_u64(std::uint64_t n) noexcept;

/// Least prime strictly greater than `bound`; bound must be >= 2.
FieldPrime smallest_prime_geq(std::uint64_t bound);

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) noexcept;
std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) noexcept;

FieldElement ff_add(const FieldElement& a, const FieldElement& b);
FieldElement ff_mul(const FieldElement& a, const FieldElement& b);
FieldElement ff_inv(const FieldElement& a);

/// A row or column of key material: n reduced values sharing one modulus.
class FieldVector {
public:
  FieldVector(FieldPrime q, std::vector<std::uint64_t> values);
  FieldVector(FieldPrime q, std::size_t n) : q_(q), values_(n, 0) {}

  const FieldPrime& modulus() const noexcept { return q_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const std::uint64_t> values() const noexcept { return values_; }
  FieldElement operator[](std::size_t i) const { return FieldElement(values_.at(i), q_); }
  void set(std::size_t i, std::uint64_t v);

  friend bool operator==(const FieldVector&, const FieldVector&) = default;

private:
  FieldPrime q_;
  std::vector<std::uint64_t> values_;
};

void encode_element(ByteWriter& w, const FieldElement& e);
FieldElement decode_element(ByteReader& r, FieldPrime q);

/// Count-prefixed (u32) sequence of fixed-width elements.
void encode_vector(ByteWriter& w, const FieldVector& v);
FieldVector decode_vector(ByteReader& r, FieldPrime q);

}  // namespace tklu
