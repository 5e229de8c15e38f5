#include <doctest.h>

#include <cmath>

#include "lrperc/rng.hpp"

using namespace lrp;

TEST_CASE("philox4x32-10 known answers") {
  // Random123 kat_vectors
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("keyed streams are reproducible and separated") {
  KeyedStream a(7, 3, 11, StreamTag::kSpacing);
  KeyedStream b(7, 3, 11, StreamTag::kSpacing);
  KeyedStream c(7, 4, 11, StreamTag::kSpacing);
  KeyedStream e(7, 3, 11, StreamTag::kPairChoice);
  int same_c = 0, same_e = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    REQUIRE(x == b());
    same_c += x == c();
    same_e += x == e();
  }
  CHECK(same_c == 0);
  CHECK(same_e == 0);
}

TEST_CASE("uniform, exponential and bounded draws") {
  KeyedStream s(99, 0, 0, StreamTag::kTest);
  const int n = 200000;
  double su = 0, se = 0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    se += s.exponential();
  }
  CHECK(std::abs(su / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(se / n - 1.0) < 5 * std::sqrt(1.0 / n));

  std::array<int, 7> hist{};
  for (int i = 0; i < 70000; ++i) {
    const auto k = s.below(7);
    REQUIRE(k < 7);
    ++hist[k];
  }
  for (int h : hist) CHECK(std::abs(h - 10000) < 5 * std::sqrt(10000.0));
  CHECK(s.below(1) == 0);
}
