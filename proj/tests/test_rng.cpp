#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <set>

#include "urt/rng.hpp"

using namespace urt;

TEST_CASE("splitmix64 reference output") {
  std::uint64_t state = 0;
  CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(state) == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("derived seeds are deterministic and distinct") {
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 10000; ++r) seen.insert(derive_seed(42, r));
  CHECK(seen.size() == 10000);
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("xoshiro streams repeat for equal seeds") {
  Xoshiro256pp a(99), b(99), c(100);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CHECK(a() != c());
}

TEST_CASE("uniform_below stays in range and is flat") {
  Xoshiro256pp rng(3);
  constexpr int kBins = 6;
  constexpr int kDraws = 600000;
  std::array<int, kBins> hist{};
  for (int i = 0; i < kDraws; ++i) {
    auto v = uniform_below(rng, kBins);
    REQUIRE(v < kBins);
    ++hist[v];
  }
  double chi2 = 0;
  const double expected = double(kDraws) / kBins;
  for (int h : hist) chi2 += (h - expected) * (h - expected) / expected;
  // chi-square(5) upper 1e-6 quantile
  CHECK(chi2 < 35.89);

  CHECK(uniform_below(rng, 1) == 0);
}

TEST_CASE("uniform01 lies in [0,1)") {
  Xoshiro256pp rng(5);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    double u = uniform01(rng);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}
