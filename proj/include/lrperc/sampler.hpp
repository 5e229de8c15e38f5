#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "lrperc/kernel.hpp"
#include "lrperc/lattice.hpp"

namespace lrp {

using Edge = std::pair<VertexId, VertexId>;  // first < second

/// One sampled open-edge set together with the key that reproduces it.
struct Configuration {
  BoxLattice box{1, 1};
  std::vector<Edge> open_edges;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t replica = 0;
};

/// Samples i.i.d. configurations on a fixed box for a fixed kernel.
///
/// Each displacement class is sampled independently. The number of open pairs in a class
/// is the number of order statistics of M_v standard exponentials that fall below
/// beta * J_v, which is Binomial(M_v, 1 - exp(-beta J_v)); the open pairs are the first
/// that many distinct uniform draws from the class. Both streams are keyed by
/// (seed, replica, class), so the configuration at a larger beta with the same key is a
/// superset of the one at a smaller beta.
class Sampler {
 public:
  Sampler(const KernelSpec& spec, const BoxLattice& box);

  const KernelSpec& spec() const noexcept { return spec_; }
  const BoxLattice& box() const noexcept { return box_; }
  const std::vector<DisplacementClass>& classes() const noexcept { return classes_; }

  Configuration sample(double beta, std::uint64_t seed, std::uint32_t replica) const;

  /// Appends the open edges into `out` (cleared first); avoids reallocation across replicas.
  void sample_into(double beta, std::uint64_t seed, std::uint32_t replica, std::vector<Edge>& out) const;

  double expected_open_edges(double beta) const;

 private:
  KernelSpec spec_;
  BoxLattice box_;
  std::vector<DisplacementClass> classes_;  // all admitted classes, probability unset
  std::vector<double> kernel_;              // J_v per class
};

Configuration sample_configuration(const KernelSpec& spec, double beta, const BoxLattice& box,
                                   std::uint64_t seed, std::uint32_t replica);

double expected_open_edges(const KernelSpec& spec, double beta, const BoxLattice& box);

/// Little-endian dump: "LRPC", then int64 d, int64 n, float64 beta, uint64 seed,
/// uint64 replica, uint64 edge count, then sorted (u, v) pairs as uint64.
void write_configuration(std::ostream& os, const Configuration& config);
Configuration read_configuration(std::istream& is);

}  // namespace lrp
