#include <atomic>
#include <cstdlib>

#include "tklu/kernels.hpp"

namespace tklu::kernels {

namespace {

constexpr std::uint64_t kAvx2ModulusLimit = std::uint64_t{1} << 31;

std::atomic<bool>& forced_scalar() {
  static std::atomic<bool> flag{std::getenv("TKLU_FORCE_SCALAR") != nullptr};
  return flag;
}

}  // namespace

const char* to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "?";
}

void force_scalar(bool on) noexcept { forced_scalar().store(on, std::memory_order_relaxed); }

Isa selected_isa(std::uint64_t q) noexcept {
  static const bool has_avx2 = cpu_has_avx2();
  if (has_avx2 && q < kAvx2ModulusLimit && !forced_scalar().load(std::memory_order_relaxed)) return Isa::Avx2;
  return Isa::Scalar;
}

std::uint64_t dot_mod(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b, std::uint64_t q) noexcept {
  if (selected_isa(q) == Isa::Avx2) return dot_mod_avx2(a, b, q);
  return dot_mod_scalar(a, b, q);
}

}  // namespace tklu::kernels
