#include "lrperc/clusters.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace lrp {

ClusterForest::ClusterForest(std::uint64_t vertex_count)
    : parent_(vertex_count), rank_(vertex_count, 0), size_(vertex_count, 1), components_(vertex_count) {
  std::iota(parent_.begin(), parent_.end(), VertexId{0});
}

void ClusterForest::reset() noexcept {
  std::iota(parent_.begin(), parent_.end(), VertexId{0});
  std::fill(rank_.begin(), rank_.end(), std::uint8_t{0});
  std::fill(size_.begin(), size_.end(), 1u);
  components_ = parent_.size();
}

VertexId ClusterForest::find(VertexId x) noexcept {
  VertexId root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const VertexId next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

bool ClusterForest::unite(VertexId a, VertexId b) noexcept {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  if (rank_[a] == rank_[b]) ++rank_[a];
  --components_;
  return true;
}

void ClusterForest::finalize() noexcept {
  for (VertexId v = 0; v < parent_.size(); ++v) find(v);
}

ClusterForest build_clusters(const BoxLattice& box, std::span<const Edge> edges) {
  ClusterForest forest(box.vertex_count());
  for (const auto& [u, v] : edges) forest.unite(u, v);
  forest.finalize();
  return forest;
}

ClusterForest build_clusters(const Configuration& config) {
  return build_clusters(config.box, config.open_edges);
}

bool connected(ClusterForest& forest, VertexId x, VertexId y) {
  if (x >= forest.vertex_count() || y >= forest.vertex_count())
    throw std::out_of_range("vertex outside the box");
  return forest.find(x) == forest.find(y);
}

ClusterStatistics cluster_statistics(ClusterForest& forest, const BoxLattice& box) {
  ClusterStatistics stats;
  stats.origin_size = forest.size_of_root(forest.find(box.origin()));
  for (VertexId v = 0; v < forest.vertex_count(); ++v)
    if (forest.find(v) == v) stats.sizes.push_back(forest.size_of_root(v));
  std::sort(stats.sizes.begin(), stats.sizes.end());
  stats.largest = stats.sizes.empty() ? 0 : stats.sizes.back();
  return stats;
}

}  // namespace lrp
