#include <doctest.h>

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <set>
#include <sstream>

#include "lrperc/rng.hpp"
#include "lrperc/sampler.hpp"
#include "support/exact_oracle.hpp"

using namespace lrp;

TEST_CASE("box lattice indexing is a bijection") {
  for (int d = 1; d <= 3; ++d) {
    for (std::int64_t n = 1; n <= (d == 3 ? 4 : 8); ++n) {
      const BoxLattice box(d, n);
      std::uint64_t expect = 1;
      for (int i = 0; i < d; ++i) expect *= static_cast<std::uint64_t>(2 * n + 1);
      REQUIRE(box.vertex_count() == expect);
      for (VertexId v = 0; v < box.vertex_count(); ++v) {
        const Site x = box.site_of(v);
        REQUIRE(box.contains(x));
        REQUIRE(box.index_of(x) == v);
      }
      CHECK(box.site_of(box.origin()) == Site{0, 0, 0});
    }
  }
  const BoxLattice big(2, 1000);
  KeyedStream s(1, 0, 0, StreamTag::kTest);
  for (int i = 0; i < 1000; ++i) {
    const auto v = static_cast<VertexId>(s.below(big.vertex_count()));
    CHECK(big.index_of(big.site_of(v)) == v);
  }
  CHECK_THROWS_AS(big.index_of({1001, 0, 0}), std::out_of_range);
  CHECK_THROWS_AS(BoxLattice(1, 0), std::invalid_argument);
}

TEST_CASE("displacement classes by direct counting") {
  const KernelSpec spec{1, 0.5, 1.0, std::nullopt};
  {
    const auto cls = enumerate_displacement_classes(BoxLattice(1, 1), spec, 1.0);
    REQUIRE(cls.size() == 2);
    CHECK(cls[0].v[0] == 1);
    CHECK(cls[0].pair_count == 2);
    CHECK(cls[1].v[0] == 2);
    CHECK(cls[1].pair_count == 1);
  }
  {
    const auto cls = enumerate_displacement_classes(BoxLattice(1, 2), spec, 1.0);
    REQUIRE(cls.size() == 4);
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(cls[k].v[0] == static_cast<std::int64_t>(k + 1));
      CHECK(cls[k].pair_count == 4 - k);
      total += cls[k].pair_count;
    }
    CHECK(total == 10);
  }
  // beta = 0 leaves no class with positive probability
  CHECK(enumerate_displacement_classes(BoxLattice(1, 2), spec, 0.0).empty());
}

TEST_CASE("truncated classes match brute-force pair enumeration") {
  const KernelSpec spec{2, 0.5, 1.0, 1};
  const BoxLattice box(2, 1);
  std::uint64_t brute = 0;
  for (VertexId u = 0; u < box.vertex_count(); ++u)
    for (VertexId v = u + 1; v < box.vertex_count(); ++v)
      if (sup_norm(box.site_of(u) - box.site_of(v)) == 1) ++brute;
  const auto cls = enumerate_displacement_classes(box, spec, 1.0);
  std::uint64_t total = 0;
  for (const auto& c : cls) {
    CHECK(c.length == 1);
    total += c.pair_count;
  }
  CHECK(total == brute);
  CHECK(brute == 20);
}

TEST_CASE("class sizes and pair decoding agree with enumeration") {
  for (int d = 1; d <= 3; ++d) {
    const BoxLattice box(d, d == 3 ? 1 : 2);
    const KernelSpec spec{d, 0.5, 1.0, std::nullopt};
    const auto cls = all_displacement_classes(box, spec);
    std::set<std::pair<VertexId, VertexId>> seen;
    std::uint64_t total = 0;
    for (const auto& c : cls) {
      std::uint64_t m = 1;
      for (int i = 0; i < d; ++i) m *= static_cast<std::uint64_t>(box.side() - std::abs(c.v[i]));
      CHECK(c.pair_count == m);
      total += m;
      for (std::uint64_t k = 0; k < c.pair_count; ++k) {
        const auto [a, b] = class_pair(box, c, k);
        REQUIRE(a < b);
        REQUIRE(box.site_of(b) - box.site_of(a) == c.v);
        REQUIRE(seen.insert({a, b}).second);
      }
    }
    const std::uint64_t V = box.vertex_count();
    CHECK(total == V * (V - 1) / 2);
  }
}

TEST_CASE("sampled configurations are valid and deterministic") {
  const KernelSpec spec{2, 0.5, 1.0, std::nullopt};
  const BoxLattice box(2, 6);
  const Sampler sampler(spec, box);
  CHECK(sampler.sample(0.0, 1, 0).open_edges.empty());
  for (std::uint32_t r = 0; r < 20; ++r) {
    const auto a = sampler.sample(0.8, 42, r);
    const auto b = sampler.sample(0.8, 42, r);
    REQUIRE(a.open_edges == b.open_edges);
    std::set<Edge> uniq(a.open_edges.begin(), a.open_edges.end());
    REQUIRE(uniq.size() == a.open_edges.size());
    for (const auto& [u, v] : a.open_edges) {
      REQUIRE(u < v);
      REQUIRE(v < box.vertex_count());
    }
  }
  CHECK(sampler.sample(0.8, 42, 0).open_edges != sampler.sample(0.8, 43, 0).open_edges);
}

TEST_CASE("truncation bounds every sampled edge") {
  const KernelSpec spec{1, 0.3, 1.0, 5};
  const BoxLattice box(1, 64);
  const Sampler sampler(spec, box);
  for (std::uint32_t r = 0; r < 200; ++r) {
    const auto cfg = sampler.sample(2.0, 9, r);
    for (const auto& [u, v] : cfg.open_edges) REQUIRE(sup_norm(box.site_of(u) - box.site_of(v)) <= 5);
  }
}

TEST_CASE("common random numbers give nested configurations") {
  const KernelSpec spec{1, 0.5, 1.0, std::nullopt};
  const BoxLattice box(1, 200);
  const Sampler sampler(spec, box);
  for (std::uint32_t r = 0; r < 50; ++r) {
    auto lo = sampler.sample(0.2, 5, r).open_edges;
    auto hi = sampler.sample(0.35, 5, r).open_edges;
    std::sort(lo.begin(), lo.end());
    std::sort(hi.begin(), hi.end());
    REQUIRE(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
  }
}

TEST_CASE("expected open edges") {
  const KernelSpec spec{1, 0.6, 1.0, std::nullopt};
  const BoxLattice box(1, 2);
  CHECK(expected_open_edges(spec, 0.0, box) == 0.0);
  double brute = 0.0;
  for (const auto& pp : oracle::all_pairs(box, spec, 0.5)) brute += pp.p;
  CHECK(expected_open_edges(spec, 0.5, box) == doctest::Approx(brute).epsilon(1e-14));
  // one class, one pair, p = 1/2
  const KernelSpec unit{1, 0.6, std::log(2.0), 1};
  CHECK(expected_open_edges(unit, 1.0, BoxLattice(1, 1)) == doctest::Approx(2 * 0.5));
}

TEST_CASE("class open counts follow Binomial(M, p): chi-square") {
  const KernelSpec spec{1, 0.6, 1.0, std::nullopt};
  const BoxLattice box(1, 2);
  const Sampler sampler(spec, box);
  const double p1 = edge_probability_at(spec, 0.5, 1);
  const int samples = 100000;
  std::array<double, 5> observed{};
  std::vector<Edge> edges;
  for (int r = 0; r < samples; ++r) {
    sampler.sample_into(0.5, 2024, static_cast<std::uint32_t>(r), edges);
    int k = 0;
    for (const auto& [u, v] : edges) k += (v - u == 1);
    observed[static_cast<std::size_t>(k)] += 1;
  }
  boost::math::binomial_distribution<double> law(4, p1);
  double stat = 0.0;
  for (int k = 0; k <= 4; ++k) {
    const double expected = samples * boost::math::pdf(law, k);
    stat += (observed[k] - expected) * (observed[k] - expected) / expected;
  }
  const double pvalue = boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(4), stat));
  CHECK(pvalue > 1e-3);
}

TEST_CASE("per-pair marginals and pairwise independence on the tiny box") {
  const KernelSpec spec{1, 0.6, 1.0, std::nullopt};
  const BoxLattice box(1, 2);
  const Sampler sampler(spec, box);
  const auto pairs = oracle::all_pairs(box, spec, 0.5);
  const int samples = 1000000;
  const std::size_t P = pairs.size();
  std::vector<double> freq(P, 0.0);
  std::vector<double> joint(P * P, 0.0);
  std::vector<Edge> edges;
  std::vector<int> open(P);
  for (int r = 0; r < samples; ++r) {
    sampler.sample_into(0.5, 77, static_cast<std::uint32_t>(r), edges);
    std::fill(open.begin(), open.end(), 0);
    for (const auto& [u, v] : edges)
      for (std::size_t k = 0; k < P; ++k)
        if (pairs[k].u == static_cast<int>(u) && pairs[k].v == static_cast<int>(v)) open[k] = 1;
    for (std::size_t a = 0; a < P; ++a) {
      if (!open[a]) continue;
      freq[a] += 1;
      for (std::size_t b = a + 1; b < P; ++b) joint[a * P + b] += open[b];
    }
  }
  for (std::size_t k = 0; k < P; ++k) {
    const double p = pairs[k].p;
    const double se = std::sqrt(p * (1 - p) / samples);
    CHECK(std::abs(freq[k] / samples - p) < 4 * se);
  }
  for (std::size_t a = 0; a < P; ++a)
    for (std::size_t b = a + 1; b < P; ++b) {
      const double pa = pairs[a].p, pb = pairs[b].p;
      const double cov = joint[a * P + b] / samples - (freq[a] / samples) * (freq[b] / samples);
      const double se = std::sqrt(pa * (1 - pa) * pb * (1 - pb) / samples);
      CHECK(std::abs(cov) < 4 * se);
    }
}

TEST_CASE("binary dump round trip") {
  const KernelSpec spec{2, 0.5, 1.0, std::nullopt};
  const auto cfg = sample_configuration(spec, 1.1, BoxLattice(2, 5), 31, 4);
  std::stringstream ss;
  write_configuration(ss, cfg);
  const auto back = read_configuration(ss);
  CHECK(back.box == cfg.box);
  CHECK(back.beta == cfg.beta);
  CHECK(back.seed == 31);
  CHECK(back.replica == 4);
  auto sorted = cfg.open_edges;
  std::sort(sorted.begin(), sorted.end());
  CHECK(back.open_edges == sorted);
  std::stringstream bad("XXXX");
  CHECK_THROWS(read_configuration(bad));
}
