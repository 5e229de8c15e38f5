#include <doctest.h>

#include <cmath>
#include <random>

#include "lrperc/kernel.hpp"

using namespace lrp;

TEST_CASE("smoothed norm") {
  CHECK(smoothed_norm({0, 0, 0}) == 2.0);
  CHECK(smoothed_norm({1, 0, 0}) == 2.0);
  CHECK(smoothed_norm({5, -3, 0}) == 5.0);
  CHECK(smoothed_norm({-7, 2, 6}) == 7.0);
}

TEST_CASE("kernel value") {
  const KernelSpec spec{1, 0.5, 1.0, std::nullopt};
  CHECK(kernel_value(spec, {3, 0, 0}, {3, 0, 0}) == 0.0);
  CHECK(kernel_value(spec, {0, 0, 0}, {1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kernel_value(spec, {0, 0, 0}, {-4, 0, 0}) == doctest::Approx(0.125).epsilon(1e-15));

  const KernelSpec spec2{2, 0.5, 3.0, std::nullopt};
  CHECK(kernel_value(spec2, {0, 0, 0}, {2, -1, 0}) == doctest::Approx(3.0 * std::pow(2.0, -2.5)));
}

TEST_CASE("edge probability examples") {
  const KernelSpec spec{1, 0.6, 1.0, std::nullopt};
  CHECK(edge_probability(spec, 0.0, {0, 0, 0}, {1, 0, 0}) == 0.0);
  CHECK(edge_probability(spec, 0.0, {0, 0, 0}, {9, 0, 0}) == 0.0);
  // beta * J = ln 2 at distance 1
  CHECK(edge_probability(spec, std::log(2.0), {0, 0, 0}, {1, 0, 0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(edge_probability(spec, 1e300, {0, 0, 0}, {1, 0, 0}) == 1.0);
  CHECK(edge_probability(spec, 1.0, {2, 0, 0}, {2, 0, 0}) == 0.0);
  CHECK_THROWS_AS(edge_probability(spec, -0.1, {0, 0, 0}, {1, 0, 0}), std::invalid_argument);

  // first-order regime: no cancellation
  const double tiny = edge_probability(spec, 1e-14, {0, 0, 0}, {1, 0, 0});
  CHECK(tiny == doctest::Approx(1e-14).epsilon(1e-12));
}

TEST_CASE("truncation removes long edges") {
  const KernelSpec spec{1, 0.5, 1.0, 3};
  CHECK(edge_probability(spec, 1.0, {0, 0, 0}, {3, 0, 0}) > 0.0);
  CHECK(edge_probability(spec, 1.0, {0, 0, 0}, {4, 0, 0}) == 0.0);
}

TEST_CASE("edge law properties on random pairs") {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<std::int64_t> coord(-50, 50);
  std::uniform_real_distribution<double> unit(0.0, 2.0);
  for (int d = 1; d <= 3; ++d) {
    const KernelSpec spec{d, 0.4 + 0.1 * d, 1.3, std::nullopt};
    for (int trial = 0; trial < 10000 / 3; ++trial) {
      Site x{}, y{}, shift{};
      for (int i = 0; i < d; ++i) {
        x[i] = coord(rng);
        y[i] = coord(rng);
        shift[i] = coord(rng);
      }
      const double b1 = unit(rng), b2 = b1 + unit(rng);
      const double p = edge_probability(spec, b1, x, y);
      REQUIRE(p == edge_probability(spec, b1, y, x));
      REQUIRE(p == edge_probability(spec, b1, x + shift, y + shift));
      REQUIRE(p <= edge_probability(spec, b2, x, y));
      REQUIRE(p >= 0.0);
      REQUIRE(p <= 1.0);
    }
  }
  const KernelSpec spec{2, 0.5, 1.0, std::nullopt};
  double prev = 1.0;
  for (std::int64_t r = 1; r < 200; ++r) {
    const double p = edge_probability_at(spec, 0.7, r);
    CHECK(p <= prev);
    prev = p;
  }
}

TEST_CASE("kernel spec validation and json") {
  CHECK_THROWS_AS((KernelSpec{0, 0.5, 1.0, std::nullopt}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((KernelSpec{4, 0.5, 1.0, std::nullopt}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((KernelSpec{1, 0.0, 1.0, std::nullopt}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((KernelSpec{1, 0.5, -1.0, std::nullopt}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((KernelSpec{1, 0.5, 1.0, 0}.validate()), std::invalid_argument);

  const KernelSpec a{2, 0.25, 1.5, 7};
  const KernelSpec b{3, 0.75, 2.0, std::nullopt};
  CHECK(nlohmann::json(a).get<KernelSpec>() == a);
  CHECK(nlohmann::json(b).get<KernelSpec>() == b);
  CHECK(nlohmann::json(b)["truncation"] == "none");
}
