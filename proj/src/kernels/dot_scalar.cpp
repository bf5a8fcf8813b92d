#include "tklu/kernels.hpp"

namespace tklu::kernels {

std::uint64_t dot_mod_scalar(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b, std::uint64_t q) noexcept {
  // Each product is < 2^126, so reduce per term and keep a single-word sum.
  std::uint64_t acc = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    auto prod = static_cast<std::uint64_t>((static_cast<unsigned __int128>(a[t]) * b[t]) % q);
    acc += prod;
    if (acc >= q) acc -= q;
  }
  return acc;
}

}  // namespace tklu::kernels
