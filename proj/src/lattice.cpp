#include "lrperc/lattice.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace lrp {

BoxLattice::BoxLattice(int d, std::int64_t radius) : d_(d), n_(radius), volume_(1) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("box dimension must be in [1,3]");
  if (radius < 1) throw std::invalid_argument("box radius n must be >= 1");
  for (int i = 0; i < d; ++i) volume_ *= static_cast<std::uint64_t>(side());
  if (volume_ > std::numeric_limits<VertexId>::max())
    throw std::invalid_argument("box has too many vertices: " + std::to_string(volume_));
}

bool BoxLattice::contains(const Site& x) const noexcept {
  for (int i = 0; i < kMaxDim; ++i) {
    if (i < d_) {
      if (x[i] < -n_ || x[i] > n_) return false;
    } else if (x[i] != 0) {
      return false;
    }
  }
  return true;
}

VertexId BoxLattice::index_of(const Site& x) const {
  if (!contains(x)) throw std::out_of_range("site outside the box");
  std::uint64_t idx = 0;
  for (int i = 0; i < d_; ++i) idx = idx * side() + static_cast<std::uint64_t>(x[i] + n_);
  return static_cast<VertexId>(idx);
}

Site BoxLattice::site_of(VertexId v) const noexcept {
  Site x{};
  std::uint64_t rest = v;
  for (int i = d_ - 1; i >= 0; --i) {
    x[i] = static_cast<std::int64_t>(rest % side()) - n_;
    rest /= side();
  }
  return x;
}

bool is_canonical(const Site& v, int d) noexcept {
  for (int i = 0; i < d; ++i) {
    if (v[i] > 0) return true;
    if (v[i] < 0) return false;
  }
  return false;
}

std::vector<DisplacementClass> all_displacement_classes(const BoxLattice& box, const KernelSpec& spec) {
  const int d = box.dim();
  const std::int64_t reach = 2 * box.radius();
  const std::int64_t span = 2 * reach + 1;
  std::uint64_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::uint64_t>(span);

  std::vector<DisplacementClass> out;
  // Canonical displacements occupy the upper half of the row-major enumeration of [-2n,2n]^d.
  for (std::uint64_t idx = total / 2 + 1; idx < total; ++idx) {
    Site v{};
    std::uint64_t rest = idx;
    for (int i = d - 1; i >= 0; --i) {
      v[i] = static_cast<std::int64_t>(rest % span) - reach;
      rest /= span;
    }
    const std::int64_t len = sup_norm(v);
    const auto key = static_cast<std::uint32_t>(idx - total / 2 - 1);
    if (!spec.admits(len)) continue;
    std::uint64_t m = 1;
    for (int i = 0; i < d; ++i) m *= static_cast<std::uint64_t>(box.side() - (v[i] < 0 ? -v[i] : v[i]));
    out.push_back({v, m, 0.0, len, key});
  }
  return out;
}

std::vector<DisplacementClass> enumerate_displacement_classes(const BoxLattice& box,
                                                              const KernelSpec& spec, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  auto classes = all_displacement_classes(box, spec);
  std::vector<DisplacementClass> out;
  for (auto& c : classes) {
    c.probability = edge_probability_at(spec, beta, c.length);
    if (c.probability > 0.0) out.push_back(c);
  }
  return out;
}

std::pair<VertexId, VertexId> class_pair(const BoxLattice& box, const DisplacementClass& cls,
                                         std::uint64_t k) noexcept {
  const int d = box.dim();
  const std::int64_t n = box.radius();
  Site u{};
  for (int i = d - 1; i >= 0; --i) {
    const std::int64_t a = cls.v[i] < 0 ? -cls.v[i] : cls.v[i];
    const auto extent = static_cast<std::uint64_t>(box.side() - a);
    const std::int64_t lo = -n + (cls.v[i] < 0 ? a : 0);
    u[i] = lo + static_cast<std::int64_t>(k % extent);
    k /= extent;
  }
  const Site w = u + cls.v;
  return {box.index_of(u), box.index_of(w)};
}

}  // namespace lrp
