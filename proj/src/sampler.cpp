#include "lrperc/sampler.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "lrperc/rng.hpp"

namespace lrp {

namespace {

// Chooses the first `k` distinct values of a uniform stream over [0, m).
template <class Emit>
void first_distinct(KeyedStream& stream, std::uint64_t m, std::uint64_t k, Emit&& emit) {
  if (k <= 32) {
    std::array<std::uint64_t, 32> chosen{};
    std::uint64_t have = 0;
    while (have < k) {
      const auto x = stream.below(m);
      if (std::find(chosen.begin(), chosen.begin() + have, x) != chosen.begin() + have) continue;
      chosen[have++] = x;
      emit(x);
    }
  } else if (m <= (std::uint64_t{1} << 28)) {
    std::vector<std::uint64_t> bits((m + 63) / 64, 0);
    std::uint64_t have = 0;
    while (have < k) {
      const auto x = stream.below(m);
      auto& word = bits[x / 64];
      const std::uint64_t mask = std::uint64_t{1} << (x % 64);
      if (word & mask) continue;
      word |= mask;
      ++have;
      emit(x);
    }
  } else {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(k);
    while (seen.size() < k) {
      const auto x = stream.below(m);
      if (seen.insert(x).second) emit(x);
    }
  }
}

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated configuration dump");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace

Sampler::Sampler(const KernelSpec& spec, const BoxLattice& box)
    : spec_(spec), box_(box), classes_(all_displacement_classes(box, spec)) {
  spec_.validate();
  if (spec_.d != box_.dim()) throw std::invalid_argument("kernel and box dimensions differ");
  kernel_.reserve(classes_.size());
  for (const auto& c : classes_) kernel_.push_back(spec_.value_at(c.length));
}

void Sampler::sample_into(double beta, std::uint64_t seed, std::uint32_t replica,
                          std::vector<Edge>& out) const {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  out.clear();
  if (beta == 0.0) return;
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    const auto& cls = classes_[c];
    const double rate = beta * kernel_[c];
    const std::uint64_t m = cls.pair_count;
    KeyedStream spacing(seed, replica, cls.key, StreamTag::kSpacing);
    // Successive order statistics of m i.i.d. Exp(1): T_{j+1} = T_j + E / (m - j).
    double t = 0.0;
    std::uint64_t open = 0;
    while (open < m) {
      t += spacing.exponential() / static_cast<double>(m - open);
      if (t > rate) break;
      ++open;
    }
    if (open == 0) continue;
    if (open == m) {
      for (std::uint64_t k = 0; k < m; ++k) out.push_back(class_pair(box_, cls, k));
      continue;
    }
    KeyedStream choice(seed, replica, cls.key, StreamTag::kPairChoice);
    first_distinct(choice, m, open, [&](std::uint64_t k) { out.push_back(class_pair(box_, cls, k)); });
  }
}

Configuration Sampler::sample(double beta, std::uint64_t seed, std::uint32_t replica) const {
  Configuration cfg{box_, {}, beta, seed, replica};
  sample_into(beta, seed, replica, cfg.open_edges);
  return cfg;
}

double Sampler::expected_open_edges(double beta) const {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  double total = 0.0;
  for (const auto& c : classes_)
    total += static_cast<double>(c.pair_count) * edge_probability_at(spec_, beta, c.length);
  return total;
}

Configuration sample_configuration(const KernelSpec& spec, double beta, const BoxLattice& box,
                                   std::uint64_t seed, std::uint32_t replica) {
  return Sampler(spec, box).sample(beta, seed, replica);
}

double expected_open_edges(const KernelSpec& spec, double beta, const BoxLattice& box) {
  return Sampler(spec, box).expected_open_edges(beta);
}

void write_configuration(std::ostream& os, const Configuration& config) {
  os.write("LRPC", 4);
  put_u64(os, static_cast<std::uint64_t>(config.box.dim()));
  put_u64(os, static_cast<std::uint64_t>(config.box.radius()));
  put_u64(os, std::bit_cast<std::uint64_t>(config.beta));
  put_u64(os, config.seed);
  put_u64(os, config.replica);
  auto edges = config.open_edges;
  std::sort(edges.begin(), edges.end());
  put_u64(os, edges.size());
  for (const auto& [u, v] : edges) {
    put_u64(os, u);
    put_u64(os, v);
  }
}

Configuration read_configuration(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string_view(magic, 4) != "LRPC")
    throw std::runtime_error("not a configuration dump");
  const auto d = static_cast<int>(get_u64(is));
  const auto n = static_cast<std::int64_t>(get_u64(is));
  Configuration cfg{BoxLattice(d, n), {}, 0.0, 0, 0};
  cfg.beta = std::bit_cast<double>(get_u64(is));
  cfg.seed = get_u64(is);
  cfg.replica = static_cast<std::uint32_t>(get_u64(is));
  const auto count = get_u64(is);
  cfg.open_edges.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto u = static_cast<VertexId>(get_u64(is));
    const auto v = static_cast<VertexId>(get_u64(is));
    cfg.open_edges.emplace_back(u, v);
  }
  return cfg;
}

}  // namespace lrp
