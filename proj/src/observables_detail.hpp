#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fft_grid.hpp"
#include "lrperc/observables.hpp"

namespace lrp::detail {

struct ReplicaResult {
  std::vector<std::uint64_t> counts;       // connected window pairs per canonical slot
  std::vector<std::uint64_t> tail_buckets;  // window vertices by floor(log2 cluster size)
  std::uint64_t mass = 0;                   // sum over clusters of (window members)^2
  std::uint64_t largest = 0;
};

/// Reusable per-thread state for turning one configuration into window pair counts.
/// Small clusters are counted pair by pair; clusters above a size threshold use an FFT
/// autocorrelation of their window indicator (exact after rounding).
class ReplicaKernel {
 public:
  ReplicaKernel(const BoxLattice& box, std::int64_t inner_radius, std::size_t fft_min_cluster = 0);

  void process(std::span<const Edge> edges, ReplicaResult& out);
  std::size_t fft_min_cluster() const noexcept { return fft_min_cluster_; }

 private:
  static constexpr std::uint32_t kUnset = 0xffffffffu;
  struct Cluster {
    VertexId root;
    std::uint32_t window_size;
    std::uint32_t begin;
  };

  void count_pairs_direct_1d(std::span<const std::uint32_t> mem, std::vector<std::uint64_t>& counts) const;
  void count_pairs_direct(std::span<const std::uint32_t> mem, std::vector<std::uint64_t>& counts) const;
  void count_pairs_fft(std::span<const std::uint32_t> mem, std::vector<std::uint64_t>& counts);

  const BoxLattice& box_;
  DisplacementIndex index_;
  ClusterForest forest_;
  std::vector<VertexId> window_;      // box vertex of each window position
  std::vector<std::int32_t> local_;   // window coordinates shifted to [0, 2m], d per vertex
  std::vector<std::uint32_t> dense_id_;
  std::vector<std::uint32_t> member_of_;
  std::vector<std::uint32_t> members_;
  std::vector<Cluster> clusters_;
  std::size_t fft_min_cluster_ = 0;
  std::int64_t fft_size_ = 0;
  std::unique_ptr<FftGrid> fft_;
  std::vector<double> fft_real_;
  std::vector<std::complex<double>> fft_spec_;
};

/// Exact integer sums; merging is order independent.
struct Accumulator {
  std::vector<std::uint64_t> sum, sumsq;
  std::vector<std::vector<std::uint64_t>> batch_sum;
  std::vector<std::uint64_t> batch_replicas;
  std::vector<std::uint64_t> tail_sum;
  std::vector<unsigned __int128> tail_sumsq;
  unsigned __int128 mass_sum = 0, mass_sumsq = 0;
  std::uint64_t replicas = 0, largest = 0, edges = 0;

  void init(std::size_t entries, std::uint32_t batches);
  void add(const ReplicaResult& r, std::uint32_t batch, std::uint64_t edge_count);
  void merge(const Accumulator& other);
  Measurement finish(const BoxLattice& box, const DisplacementIndex& idx, double beta) const;
};

/// Standard error of the mean of x_r = c_r / scale given sum and sum of squares of c_r.
double mean_stderr(long double sum, long double sumsq, std::uint64_t replicas, long double scale);

}  // namespace lrp::detail
