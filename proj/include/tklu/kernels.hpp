#pragma once

// Inner-product kernels over GF(q): a portable scalar reference and an AVX2
// variant picked at runtime. Variants return bit-identical results.

#include <cstdint>
#include <span>

namespace tklu::kernels {

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa) noexcept;

/// sum_t a[t] * b[t] mod q. Inputs must already be reduced; a.size() == b.size().
std::uint64_t dot_mod_scalar(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b, std::uint64_t q) noexcept;

/// AVX2 variant. Only valid for q < 2^31 and on CPUs with AVX2.
std::uint64_t dot_mod_avx2(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b, std::uint64_t q) noexcept;

bool cpu_has_avx2() noexcept;

/// Kernel the dispatcher will use for modulus q.
Isa selected_isa(std::uint64_t q) noexcept;

/// Forces the scalar path (or lifts the restriction). Used by tests and the
/// TKLU_FORCE_SCALAR environment variable.
void force_scalar(bool on) noexcept;

std::uint64_t dot_mod(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b, std::uint64_t q) noexcept;

}  // namespace tklu::kernels
