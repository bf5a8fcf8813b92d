#pragma once

#include <cstdint>
#include <vector>

#include "tklu/field.hpp"

namespace tklu {

using NodeId = std::uint32_t;

/// Dense n x n matrix over GF(q), row-major.
class FieldMatrix {
public:
  FieldMatrix(FieldPrime q, std::size_t n) : q_(q), n_(n), data_(n * n, 0) {}

  std::size_t dim() const noexcept { return n_; }
  const FieldPrime& modulus() const noexcept { return q_; }
  std::uint64_t at(std::size_t r, std::size_t c) const { return data_.at(r * n_ + c); }
  void set(std::size_t r, std::size_t c, std::uint64_t v);

  FieldVector row(std::size_t r) const;
  FieldVector column(std::size_t c) const;

  friend bool operator==(const FieldMatrix&, const FieldMatrix&) = default;

private:
  FieldPrime q_;
  std::size_t n_;
  std::vector<std::uint64_t> data_;
};

/// Base-station key pool: K = L * U with U = D * L^T, hence K symmetric.
class MasterKeyMatrix {
public:
  /// Builds the composition from an explicit lower-triangular L and nonzero
  /// diagonal D. Throws InvalidArgument if L is not lower triangular or has a
  /// zero on its diagonal, or D has a zero entry.
  static MasterKeyMatrix from_factors(const FieldMatrix& lower, const std::vector<std::uint64_t>& diag);

  std::size_t dim() const noexcept { return lower_.dim(); }
  const FieldPrime& modulus() const noexcept { return lower_.modulus(); }
  const FieldMatrix& lower() const noexcept { return lower_; }
  const FieldMatrix& upper() const noexcept { return upper_; }
  const FieldMatrix& keys() const noexcept { return keys_; }

private:
  MasterKeyMatrix(FieldMatrix l, FieldMatrix u, FieldMatrix k)
      : lower_(std::move(l)), upper_(std::move(u)), keys_(std::move(k)) {}

  FieldMatrix lower_;
  FieldMatrix upper_;
  FieldMatrix keys_;
};

/// A node's pre-distributed secret: row i of L and column i of U.
struct KeyShare {
  NodeId node_id = 0;
  FieldVector row;
  FieldVector col;

  std::size_t dim() const noexcept { return row.size(); }
  friend bool operator==(const KeyShare&, const KeyShare&) = default;
};

/// Deterministic in (n, q, seed).
MasterKeyMatrix gen_master(std::size_t n, FieldPrime q, std::uint64_t seed);

KeyShare assign_share(const MasterKeyMatrix& m, std::size_t i);

/// Dot product row . col over GF(q); equals K_ij for row i and column j.
FieldElement derive_key(const FieldVector& row, const FieldVector& col);

/// node_id u32 | n u32 | u8 len, q (len bytes) | row | col, elements fixed width.
Bytes serialize_share(const KeyShare& share);
KeyShare deserialize_share(ByteView bytes);

}  // namespace tklu
