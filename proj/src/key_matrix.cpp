#include "tklu/key_matrix.hpp"

#include <random>

#include "tklu/errors.hpp"
#include "tklu/kernels.hpp"

namespace tklu {

void FieldMatrix::set(std::size_t r, std::size_t c, std::uint64_t v) {
  if (v >= q_.value()) throw Error(ErrorCode::InvalidArgument, "field element out of range");
  data_.at(r * n_ + c) = v;
}

FieldVector FieldMatrix::row(std::size_t r) const {
  if (r >= n_) throw Error(ErrorCode::InvalidArgument, "row index out of range");
  return FieldVector(q_, std::vector<std::uint64_t>(data_.begin() + r * n_, data_.begin() + (r + 1) * n_));
}

FieldVector FieldMatrix::column(std::size_t c) const {
  if (c >= n_) throw Error(ErrorCode::InvalidArgument, "column index out of range");
  std::vector<std::uint64_t> out(n_);
  for (std::size_t r = 0; r < n_; ++r) out[r] = data_[r * n_ + c];
  return FieldVector(q_, std::move(out));
}

MasterKeyMatrix MasterKeyMatrix::from_factors(const FieldMatrix& lower, const std::vector<std::uint64_t>& diag) {
  const auto n = lower.dim();
  const auto q = lower.modulus();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "matrix dimension must be >= 1");
  if (diag.size() != n) throw Error(ErrorCode::InvalidArgument, "diagonal size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (lower.at(i, i) == 0) throw Error(ErrorCode::InvalidArgument, "L has a zero diagonal entry");
    if (diag[i] == 0 || diag[i] >= q.value()) throw Error(ErrorCode::InvalidArgument, "D entries must be nonzero field elements");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (lower.at(i, j) != 0) throw Error(ErrorCode::InvalidArgument, "L is not lower triangular");
    }
  }

  // U = D * L^T: U[i][j] = d_i * L[j][i], zero below the diagonal.
  FieldMatrix upper(q, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) upper.set(i, j, mul_mod(diag[i], lower.at(j, i), q.value()));
  }

  // Column j of U is kept contiguous so each K entry is one kernel call.
  std::vector<std::vector<std::uint64_t>> ucols(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto col = upper.column(j);
    ucols[j].assign(col.values().begin(), col.values().end());
  }
  FieldMatrix keys(q, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = lower.row(i);
    for (std::size_t j = 0; j < n; ++j) keys.set(i, j, kernels::dot_mod(row.values(), ucols[j], q.value()));
  }
  return MasterKeyMatrix(lower, std::move(upper), std::move(keys));
}

MasterKeyMatrix gen_master(std::size_t n, FieldPrime q, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "matrix dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> any(0, q.value() - 1);
  std::uniform_int_distribution<std::uint64_t> nonzero(1, q.value() - 1);

  FieldMatrix lower(q, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) lower.set(i, j, any(rng));
    lower.set(i, i, nonzero(rng));
  }
  std::vector<std::uint64_t> diag(n);
  for (auto& d : diag) d = nonzero(rng);
  return MasterKeyMatrix::from_factors(lower, diag);
}

KeyShare assign_share(const MasterKeyMatrix& m, std::size_t i) {
  if (i >= m.dim()) throw Error(ErrorCode::InvalidArgument, "node index out of range");
  return KeyShare{static_cast<NodeId>(i), m.lower().row(i), m.upper().column(i)};
}

FieldElement derive_key(const FieldVector& row, const FieldVector& col) {
  if (row.modulus() != col.modulus()) throw Error(ErrorCode::ModulusMismatch, "row and column from different fields");
  if (row.size() != col.size()) throw Error(ErrorCode::InvalidArgument, "row and column lengths differ");
  const auto q = row.modulus();
  return FieldElement(kernels::dot_mod(row.values(), col.values(), q.value()), q);
}

Bytes serialize_share(const KeyShare& share) {
  const auto q = share.row.modulus();
  ByteWriter w;
  w.u32(share.node_id);
  w.u32(static_cast<std::uint32_t>(share.dim()));
  const auto width = q.element_width();
  w.u8(static_cast<std::uint8_t>(width));
  w.uint_fixed(q.value(), width);
  for (auto v : share.row.values()) w.uint_fixed(v, width);
  for (auto v : share.col.values()) w.uint_fixed(v, width);
  return std::move(w).take();
}

KeyShare deserialize_share(ByteView bytes) {
  ByteReader r(bytes);
  const NodeId id = r.u32();
  const auto n = r.u32();
  const auto qlen = r.u8();
  if (qlen == 0 || qlen > 8) throw Error(ErrorCode::DecodeError, "bad modulus length");
  const auto qv = r.uint_fixed(qlen);
  if (qv > FieldPrime::kMaxModulus || !is_prime_u64(qv)) throw Error(ErrorCode::DecodeError, "modulus is not prime");
  const FieldPrime q(qv);
  if (q.element_width() != qlen) throw Error(ErrorCode::DecodeError, "non-canonical modulus width");
  if (r.remaining() != 2ull * n * qlen) throw Error(ErrorCode::DecodeError, "share length mismatch");
  if (id >= n) throw Error(ErrorCode::DecodeError, "node id outside matrix");
  auto read = [&] {
    std::vector<std::uint64_t> v(n);
    for (auto& x : v) {
      x = r.uint_fixed(qlen);
      if (x >= qv) throw Error(ErrorCode::DecodeError, "field element not reduced");
    }
    return FieldVector(q, std::move(v));
  };
  auto row = read();
  auto col = read();
  r.expect_end();
  return KeyShare{id, std::move(row), std::move(col)};
}

}  // namespace tklu
