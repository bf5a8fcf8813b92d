#include <gmpxx.h>
#include <gtest/gtest.h>

#include <random>

#include "tklu/kernels.hpp"

using namespace tklu;

namespace {

std::uint64_t gmp_dot(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b, std::uint64_t q) {
  mpz_class acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mpz_class x, y;
    mpz_import(x.get_mpz_t(), 1, 1, 8, 0, 0, &a[i]);
    mpz_import(y.get_mpz_t(), 1, 1, 8, 0, 0, &b[i]);
    acc += x * y;
  }
  mpz_class m;
  mpz_import(m.get_mpz_t(), 1, 1, 8, 0, 0, &q);
  acc %= m;
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, 1, 8, 0, 0, acc.get_mpz_t());
  return out;
}

struct Case {
  std::vector<std::uint64_t> a, b;
};

Case random_case(std::mt19937_64& rng, std::size_t n, std::uint64_t q, bool extreme) {
  std::uniform_int_distribution<std::uint64_t> d(0, q - 1);
  Case c;
  for (std::size_t i = 0; i < n; ++i) {
    c.a.push_back(extreme ? q - 1 : d(rng));
    c.b.push_back(extreme ? q - 1 : d(rng));
  }
  return c;
}

}  // namespace

TEST(Kernels, ScalarMatchesBigIntegerOracle) {
  std::mt19937_64 rng(11);
  for (std::uint64_t q : {7ull, 65537ull, 2147483647ull, 2147483659ull, 9223372036854775783ull}) {
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 257u}) {
      for (bool extreme : {false, true}) {
        const auto c = random_case(rng, n, q, extreme);
        EXPECT_EQ(kernels::dot_mod_scalar(c.a, c.b, q), gmp_dot(c.a, c.b, q)) << q << " n=" << n;
      }
    }
  }
}

TEST(Kernels, Avx2EquivalentToScalar) {
  if (!kernels::cpu_has_avx2()) GTEST_SKIP() << "no AVX2 on this CPU";
  std::mt19937_64 rng(12);
  for (std::uint64_t q : {2ull, 7ull, 251ull, 65537ull, 1000003ull, 2147483629ull, 2147483647ull}) {
    for (std::size_t n = 0; n < 70; ++n) {
      for (bool extreme : {false, true}) {
        const auto c = random_case(rng, n, q, extreme);
        EXPECT_EQ(kernels::dot_mod_avx2(c.a, c.b, q), kernels::dot_mod_scalar(c.a, c.b, q)) << q << " n=" << n;
      }
    }
    const auto big = random_case(rng, 5000, q, true);
    EXPECT_EQ(kernels::dot_mod_avx2(big.a, big.b, q), gmp_dot(big.a, big.b, q));
  }
}

TEST(Kernels, DispatchPicksAvx2OnlyForSmallModuli) {
  kernels::force_scalar(false);
  EXPECT_EQ(kernels::selected_isa(9223372036854775783ull), kernels::Isa::Scalar);
  EXPECT_EQ(kernels::selected_isa(2147483659ull), kernels::Isa::Scalar);
  const auto expect = kernels::cpu_has_avx2() ? kernels::Isa::Avx2 : kernels::Isa::Scalar;
  if (std::getenv("TKLU_FORCE_SCALAR") == nullptr) EXPECT_EQ(kernels::selected_isa(65537), expect);
}

TEST(Kernels, ForceScalarOverridesDispatch) {
  kernels::force_scalar(true);
  EXPECT_EQ(kernels::selected_isa(65537), kernels::Isa::Scalar);
  const std::vector<std::uint64_t> a{1, 2, 3}, b{4, 5, 6};
  EXPECT_EQ(kernels::dot_mod(a, b, 7), 32u % 7);
  kernels::force_scalar(false);
  EXPECT_EQ(kernels::dot_mod(a, b, 7), 32u % 7);
}
