#include <doctest.h>

#include <cmath>

#include "lrperc/observables.hpp"
#include "lrperc/rng.hpp"
#include "support/exact_oracle.hpp"

using namespace lrp;

namespace {

const KernelSpec kTiny{1, 0.6, 1.0, std::nullopt};
constexpr double kTinyBeta = 0.5;

struct TinyExact {
  std::vector<double> tau;  // x = 0..2 over the window m = 2
  double chi = 0;
  std::vector<double> tail;  // t = 1..5
};

TinyExact tiny_exact() {
  const BoxLattice box(1, 2);
  const auto e = oracle::enumerate(box, kTiny, kTinyBeta);
  TinyExact out;
  for (int x = 0; x <= 2; ++x) {
    double s = 0;
    int cnt = 0;
    for (int u = -2; u + x <= 2; ++u) {
      s += e.connect[box.index_of({u, 0, 0})][box.index_of({u + x, 0, 0})];
      ++cnt;
    }
    out.tau.push_back(s / cnt);
  }
  out.chi = out.tau[0] + 2 * out.tau[1] + 2 * out.tau[2];
  for (int t = 1; t <= 5; ++t) {
    double s = 0;
    for (int u = 0; u < 5; ++u) s += e.size_at_least[u][t];
    out.tail.push_back(s / 5);
  }
  return out;
}

TwoPointTable random_table(int d, std::int64_t m, std::uint64_t seed) {
  KeyedStream s(seed, 0, 0, StreamTag::kTest);
  return TwoPointTable::synthetic(d, m, [&](const Site&) { return s.uniform(); });
}

}  // namespace

TEST_CASE("displacement index layout") {
  const DisplacementIndex idx(2, 3);
  CHECK(idx.size() == (49 + 1) / 2);
  CHECK(idx.displacement(0) == Site{0, 0, 0});
  for (std::size_t s = 1; s < idx.size(); ++s) {
    const Site x = idx.displacement(s);
    REQUIRE(is_canonical(x, 2));
    REQUIRE(idx.slot(x) == s);
    REQUIRE(idx.slot({-x[0], -x[1], 0}) == s);
  }
  CHECK(idx.pairs(idx.slot({1, -2, 0})) == 6u * 5u);
  CHECK(shell_size(1, 3) == 2);
  CHECK(shell_size(2, 1) == 8);
  CHECK(shell_size(3, 1) == 26);
}

TEST_CASE("beta = 0 gives the indicator of the origin") {
  const Sampler sampler(KernelSpec{1, 0.6, 1.0, std::nullopt}, BoxLattice(1, 64));
  MeasureOptions o;
  o.replicas = 10;
  o.seed = 7;
  const auto meas = measure(sampler, 0.0, o);
  CHECK(meas.table.m == 32);
  CHECK(meas.table.tau[0] == 1.0);
  for (std::size_t s = 1; s < meas.table.tau.size(); ++s) REQUIRE(meas.table.tau[s] == 0.0);
  CHECK(susceptibility_estimate(meas.table) == 1.0);
  CHECK(triangle_estimate(meas.table) == 1.0);
  CHECK(correlation_length_estimate(meas.table, 1.0).radius == 1);
  REQUIRE(meas.tail.thresholds.size() == 1);
  CHECK(meas.tail.probability[0] == 1.0);
  const std::uint64_t two = 2;
  const auto tail = cluster_tail(std::vector<Configuration>{sampler.sample(0.0, 1, 0)}, std::span(&two, 1), 0);
  CHECK(tail.probability[0] == 0.0);
}

TEST_CASE("all pairs open gives tau = 1") {
  const BoxLattice box(2, 4);
  const Sampler sampler(KernelSpec{2, 0.6, 1.0, std::nullopt}, box);
  MeasureOptions o;
  o.replicas = 3;
  const auto meas = measure(sampler, 1e300, o);
  for (double t : meas.table.tau) REQUIRE(t == 1.0);
  CHECK(susceptibility_estimate(meas.table) == 25.0);
  CHECK(meas.largest_cluster == box.vertex_count());
  CHECK(meas.tail.thresholds.back() == 64);
  CHECK(meas.tail.probability.back() == 1.0);
  std::vector<std::uint64_t> full{box.vertex_count()};
  const auto cfg = sampler.sample(1e300, 0, 0);
  CHECK(cluster_tail(std::vector<Configuration>{cfg}, full, 0).probability[0] == 1.0);
}

TEST_CASE("tiny-box estimates match exhaustive enumeration") {
  const auto exact = tiny_exact();
  const BoxLattice box(1, 2);
  const Sampler sampler(kTiny, box);
  MeasureOptions o;
  o.replicas = 200000;
  o.seed = 11;
  o.inner_radius = 2;
  const auto meas = measure(sampler, kTinyBeta, o);
  for (int x = 0; x <= 2; ++x) {
    const double se = meas.table.stderr_[static_cast<std::size_t>(x)];
    CHECK(std::abs(meas.table.tau[static_cast<std::size_t>(x)] - exact.tau[static_cast<std::size_t>(x)]) <=
          4 * se + 1e-12);
  }
  const auto chi = susceptibility_with_error(meas.table);
  CHECK(std::abs(chi.value - exact.chi) < 4 * chi.stderr_);
  for (std::size_t k = 0; k < meas.tail.thresholds.size(); ++k) {
    const auto t = meas.tail.thresholds[k];
    CHECK(std::abs(meas.tail.probability[k] - exact.tail[t - 1]) <= 4 * meas.tail.stderr_[k] + 1e-12);
  }
  // same rule applied to the exact table
  const auto exact_table = TwoPointTable::synthetic(1, 2, [&](const Site& x) { return exact.tau[std::abs(x[0])]; });
  CHECK(correlation_length_estimate(exact_table, exact.chi).radius ==
        (1 + 2 * exact.tau[1] >= exact.chi / 2 ? 1 : 2));
}

TEST_CASE("explicit-batch estimators agree with the streaming driver") {
  const KernelSpec spec{1, 0.5, 1.0, std::nullopt};
  const BoxLattice box(1, 40);
  const Sampler sampler(spec, box);
  std::vector<Configuration> configs;
  for (std::uint32_t r = 0; r < 60; ++r) configs.push_back(sampler.sample(0.3, 4, r));
  MeasureOptions o;
  o.replicas = 60;
  o.seed = 4;
  const auto meas = measure(sampler, 0.3, o);
  const auto table = two_point_estimate(configs, 0);
  CHECK(table.tau == meas.table.tau);
  CHECK(table.stderr_ == meas.table.stderr_);
  const auto tail = cluster_tail(configs, meas.tail.thresholds, 0);
  CHECK(tail.probability == meas.tail.probability);
  CHECK_THROWS_AS(two_point_estimate(std::vector<Configuration>{}, 1), std::invalid_argument);
}

TEST_CASE("FFT pair counting equals direct counting") {
  for (int d = 1; d <= 2; ++d) {
    const KernelSpec spec{d, 0.5, 1.0, std::nullopt};
    const BoxLattice box(d, d == 1 ? 300 : 14);
    const Sampler sampler(spec, box);
    MeasureOptions o;
    o.replicas = 12;
    o.seed = 3;
    o.fft_min_cluster = 2;
    const auto fft = measure(sampler, d == 1 ? 0.35 : 0.2, o);
    o.fft_min_cluster = std::numeric_limits<std::size_t>::max();
    const auto direct = measure(sampler, d == 1 ? 0.35 : 0.2, o);
    CHECK(fft.table.tau == direct.table.tau);
    CHECK(fft.window_mass.value == direct.window_mass.value);
  }
}

TEST_CASE("tables are independent of the thread count") {
  const Sampler sampler(KernelSpec{1, 0.5, 1.0, std::nullopt}, BoxLattice(1, 500));
  MeasureOptions o;
  o.replicas = 40;
  o.seed = 21;
  const auto one = measure(sampler, 0.26, o);
  o.threads = 4;
  const auto four = measure(sampler, 0.26, o);
  CHECK(one.table.tau == four.table.tau);
  CHECK(one.table.stderr_ == four.table.stderr_);
  CHECK(one.table.batches == four.table.batches);
  CHECK(one.tail.probability == four.tail.probability);
}

TEST_CASE("table invariants") {
  const Sampler sampler(KernelSpec{1, 0.5, 1.0, std::nullopt}, BoxLattice(1, 256));
  MeasureOptions o;
  o.replicas = 500;
  o.seed = 5;
  const auto meas = measure(sampler, 0.25, o);
  const auto& t = meas.table;
  CHECK(t.tau[0] == 1.0);
  for (double v : t.tau) {
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
  }
  for (std::int64_t r = 1; r <= t.m; r *= 2)
    CHECK(spatial_average(t, r) * std::pow(r, t.d) / std::pow(2.0 * r + 1, t.d) <= 1.0);

}

TEST_CASE("susceptibility agrees with the window cluster mass when the window is large") {
  // short edges only, so the finite-window weighting difference sum tau(x)|x|/|W| is negligible
  const Sampler sampler(KernelSpec{1, 0.5, 1.0, 2}, BoxLattice(1, 1024));
  MeasureOptions o;
  o.replicas = 2000;
  o.seed = 5;
  const auto meas = measure(sampler, 0.5, o);
  const auto chi = susceptibility_with_error(meas.table);
  const double combined = std::hypot(chi.stderr_, meas.window_mass.stderr_);
  CHECK(chi.value > 1.5);
  CHECK(std::abs(chi.value - meas.window_mass.value) < 3 * combined);
}

TEST_CASE("spatial average") {
  const auto ones = TwoPointTable::synthetic(1, 5, [](const Site&) { return 1.0; });
  CHECK(spatial_average(ones, 3) == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
  const double a = 0.37;
  const auto near = TwoPointTable::synthetic(1, 5, [&](const Site& x) { return std::abs(x[0]) == 1 ? a : 0.0; });
  CHECK(spatial_average(near, 1) == doctest::Approx(1 + 2 * a).epsilon(1e-15));
  CHECK_THROWS_AS(spatial_average(ones, 6), std::invalid_argument);
  CHECK_THROWS_AS(spatial_average(ones, 0), std::invalid_argument);

  const auto exact = tiny_exact();
  const auto table = TwoPointTable::synthetic(1, 2, [&](const Site& x) { return exact.tau[std::abs(x[0])]; });
  const double direct = (exact.tau[0] + 2 * exact.tau[1] + 2 * exact.tau[2]) / 2.0;
  CHECK(std::abs(spatial_average(table, 2) - direct) < 1e-12);

  const auto plane = TwoPointTable::synthetic(2, 3, [](const Site&) { return 1.0; });
  CHECK(spatial_average(plane, 2) == doctest::Approx(25.0 / 4.0));
}

TEST_CASE("susceptibility and correlation length") {
  const auto delta = TwoPointTable::synthetic(1, 6, [](const Site&) { return 0.0; });
  CHECK(susceptibility_estimate(delta) == 1.0);
  const auto ones = TwoPointTable::synthetic(1, 4, [](const Site&) { return 1.0; });
  CHECK(susceptibility_estimate(ones) == 9.0);
  CHECK(correlation_length_estimate(ones, 9.0).radius == 2);
  CHECK_FALSE(correlation_length_estimate(ones, 9.0).lower_bound);
  CHECK(correlation_length_estimate(delta, 1.0).radius == 1);
  const auto sentinel = correlation_length_estimate(ones, 100.0);
  CHECK(sentinel.lower_bound);
  CHECK(sentinel.radius == 4);
  const auto cube = TwoPointTable::synthetic(3, 2, [](const Site&) { return 1.0; });
  CHECK(susceptibility_estimate(cube) == 125.0);
}

TEST_CASE("triangle against direct triple sums") {
  const auto delta = TwoPointTable::synthetic(1, 8, [](const Site&) { return 0.0; });
  CHECK(triangle_estimate(delta) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(triangle_estimate_fft(delta, delta, delta) == doctest::Approx(1.0).epsilon(1e-12));

  const auto near = TwoPointTable::synthetic(1, 3, [](const Site& x) { return std::abs(x[0]) <= 1 ? 1.0 : 0.0; });
  double triple = 0;
  for (int x = -3; x <= 3; ++x)
    for (int y = -3; y <= 3; ++y)
      if (std::abs(y - x) <= 3) triple += near.at({x, 0, 0}) * near.at({y - x, 0, 0}) * near.at({y, 0, 0});
  CHECK(triple == 7.0);
  CHECK(triangle_estimate(near) == doctest::Approx(triple).epsilon(1e-14));
  CHECK(triangle_estimate_fft(near, near, near) == doctest::Approx(triple).epsilon(1e-12));
}

TEST_CASE("FFT triangle equals direct summation to 1e-9") {
  for (std::int64_t m : {1, 5, 17, 64}) {
    const auto a = random_table(1, m, 100 + m);
    const auto b = random_table(1, m, 200 + m);
    const auto c = random_table(1, m, 300 + m);
    double triple = 0;
    for (std::int64_t x = -m; x <= m; ++x)
      for (std::int64_t y = -m; y <= m; ++y)
        if (std::abs(y - x) <= m) triple += a.at({x, 0, 0}) * b.at({y - x, 0, 0}) * c.at({y, 0, 0});
    CHECK(std::abs(triangle_estimate_fft(a, b, c) - triple) <= 1e-9 * triple);
    CHECK(std::abs(triangle_estimate_direct(a, b, c) - triple) <= 1e-12 * triple);
    CHECK(std::abs(triangle_estimate_fft(a, a, a) - triangle_estimate_direct(a, a, a)) <= 1e-9 * triple);
  }
  const auto p = random_table(2, 4, 9);
  CHECK(std::abs(triangle_estimate_fft(p, p, p) / triangle_estimate_direct(p, p, p) - 1) < 1e-9);
}

TEST_CASE("restricted two-point function") {
  const Site x{2, 0, 0};
  CHECK(restricted_two_point(kTiny, 0.0, x, 100, 1).value == 0.0);
  CHECK_THROWS_AS(restricted_two_point(kTiny, 0.5, {0, 0, 0}, 10, 1), std::invalid_argument);

  // subset recursion agrees with full enumeration on the 5-vertex box
  const BoxLattice tiny(1, 2);
  const auto e = oracle::enumerate(tiny, kTiny, kTinyBeta);
  CHECK(oracle::connection_probability(tiny, kTiny, kTinyBeta, 2, 4) == doctest::Approx(e.connect[2][4]).epsilon(1e-12));
  CHECK(oracle::connection_probability(tiny, kTiny, kTinyBeta, 0, 3) == doctest::Approx(e.connect[0][3]).epsilon(1e-12));

  const BoxLattice nine(1, 4);
  const double exact = oracle::connection_probability(nine, kTiny, kTinyBeta, nine.origin(), nine.index_of(x));
  const auto est = restricted_two_point(kTiny, kTinyBeta, x, 100000, 13);
  CHECK(std::abs(est.value - exact) < 4 * est.stderr_);

  // containment: the restricted event is smaller than the unrestricted one
  const Sampler big(kTiny, BoxLattice(1, 16));
  MeasureOptions o;
  o.replicas = 20000;
  o.seed = 14;
  o.inner_radius = 8;
  const auto meas = measure(big, kTinyBeta, o);
  const auto slot = meas.table.index().slot(x);
  CHECK(est.value <= meas.table.tau[slot] + 3 * std::hypot(est.stderr_, meas.table.stderr_[slot]));
}
