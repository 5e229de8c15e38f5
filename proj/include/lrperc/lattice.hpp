#pragma once

#include <cstdint>
#include <vector>

#include "lrperc/kernel.hpp"

namespace lrp {

using VertexId = std::uint32_t;

/// The finite box [-n, n]^d with row-major vertex indexing (first coordinate slowest).
class BoxLattice {
 public:
  BoxLattice(int d, std::int64_t radius);

  int dim() const noexcept { return d_; }
  std::int64_t radius() const noexcept { return n_; }
  std::int64_t side() const noexcept { return 2 * n_ + 1; }
  std::uint64_t vertex_count() const noexcept { return volume_; }

  bool contains(const Site& x) const noexcept;
  VertexId index_of(const Site& x) const;  // throws std::out_of_range outside the box
  Site site_of(VertexId v) const noexcept;
  VertexId origin() const noexcept { return static_cast<VertexId>(volume_ / 2); }

  friend bool operator==(const BoxLattice&, const BoxLattice&) = default;

 private:
  int d_;
  std::int64_t n_;
  std::uint64_t volume_;
};

/// True when v is the lexicographically positive member of {v, -v}.
bool is_canonical(const Site& v, int d) noexcept;

/// The set of vertex pairs {u, u+v} inside a box sharing one canonical displacement v.
struct DisplacementClass {
  Site v{};
  std::uint64_t pair_count = 0;  // M_v = prod_i (2n+1-|v_i|)
  double probability = 0.0;      // p_v
  std::int64_t length = 0;       // ||v||_inf
  std::uint32_t key = 0;         // position among all canonical classes of the box
};

/// Every canonical displacement admitted by the kernel's truncation, in lexicographic
/// order; classes with p_v = 0 are dropped.
std::vector<DisplacementClass> enumerate_displacement_classes(const BoxLattice& box,
                                                              const KernelSpec& spec, double beta);

/// Every canonical displacement regardless of beta. The position of a class in this list
/// is its stable stream key; enumerate_displacement_classes is a filtered view of it.
std::vector<DisplacementClass> all_displacement_classes(const BoxLattice& box, const KernelSpec& spec);

/// The k-th pair (k < pair_count) of a class as (lower endpoint u, u + v).
std::pair<VertexId, VertexId> class_pair(const BoxLattice& box, const DisplacementClass& cls,
                                         std::uint64_t k) noexcept;

}  // namespace lrp
