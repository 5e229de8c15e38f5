#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrperc/lattice.hpp"
#include "lrperc/sampler.hpp"

namespace lrp {

/// Union-find over box vertices: union by rank, full path compression, sizes kept at roots.
class ClusterForest {
 public:
  explicit ClusterForest(std::uint64_t vertex_count);

  /// Back to all singletons without reallocating.
  void reset() noexcept;

  VertexId find(VertexId x) noexcept;
  /// Returns true when the call merged two distinct clusters.
  bool unite(VertexId a, VertexId b) noexcept;

  /// Compresses every path; afterwards root_of() is valid and read-only queries are
  /// safe from multiple threads.
  void finalize() noexcept;
  VertexId root_of(VertexId x) const noexcept { return parent_[x]; }

  std::uint64_t vertex_count() const noexcept { return parent_.size(); }
  std::uint64_t component_count() const noexcept { return components_; }
  /// Size of the cluster containing x (call on a finalized forest or pass a root).
  std::uint64_t size_of_root(VertexId root) const noexcept { return size_[root]; }

 private:
  std::vector<VertexId> parent_;
  std::vector<std::uint8_t> rank_;
  std::vector<std::uint32_t> size_;
  std::uint64_t components_;
};

ClusterForest build_clusters(const Configuration& config);
ClusterForest build_clusters(const BoxLattice& box, std::span<const Edge> edges);

/// Throws std::out_of_range when either vertex lies outside the forest.
bool connected(ClusterForest& forest, VertexId x, VertexId y);

struct ClusterStatistics {
  std::uint64_t origin_size = 0;
  std::vector<std::uint64_t> sizes;  // ascending
  std::uint64_t largest = 0;
};

ClusterStatistics cluster_statistics(ClusterForest& forest, const BoxLattice& box);

}  // namespace lrp
