#include "tklu/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define TKLU_HAVE_X86 1
#else
#define TKLU_HAVE_X86 0
#endif

namespace tklu::kernels {

#if TKLU_HAVE_X86

// Four 64-bit lanes. For q < 2^31 each product a*b is < 2^62. Lanes hold a
// partial sum kept below 2^63: after adding a product the sum is < 2^63 + 2^62,
// and whenever bit 63 is set we subtract fold = q * floor(2^63 / q), which is in
// (2^63 - q, 2^63]. The result is back under 2^62 + q < 2^63 and unchanged mod q.
__attribute__((target("avx2"))) std::uint64_t dot_mod_avx2(std::span<const std::uint64_t> a,
                                                           std::span<const std::uint64_t> b,
                                                           std::uint64_t q) noexcept {
  const std::uint64_t fold = q * ((std::uint64_t{1} << 63) / q);
  const __m256i vfold = _mm256_set1_epi64x(static_cast<long long>(fold));
  const __m256i zero = _mm256_setzero_si256();
  __m256i acc = zero;

  const std::size_t n = a.size();
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data() + t));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.data() + t));
    // Operands are < 2^31, so the low 32 bits of each lane carry the whole value.
    acc = _mm256_add_epi64(acc, _mm256_mul_epu32(va, vb));
    const __m256i high = _mm256_cmpgt_epi64(zero, acc);  // bit 63 set
    acc = _mm256_sub_epi64(acc, _mm256_and_si256(high, vfold));
  }

  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::uint64_t sum = 0;
  for (auto lane : lanes) {
    sum += lane % q;
    if (sum >= q) sum -= q;
  }
  for (; t < n; ++t) {
    sum += (a[t] * b[t]) % q;
    if (sum >= q) sum -= q;
  }
  return sum;
}

bool cpu_has_avx2() noexcept { return __builtin_cpu_supports("avx2"); }

#else

std::uint64_t dot_mod_avx2(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b, std::uint64_t q) noexcept {
  return dot_mod_scalar(a, b, q);
}

bool cpu_has_avx2() noexcept { return false; }

#endif

}  // namespace tklu::kernels
