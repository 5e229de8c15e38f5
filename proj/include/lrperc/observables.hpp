#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lrperc/clusters.hpp"
#include "lrperc/kernel.hpp"
#include "lrperc/lattice.hpp"
#include "lrperc/sampler.hpp"

namespace lrp {

/// Canonical displacements of the window [-m, m]^d. Slot s corresponds to the row-major
/// index center + s of [-m, m]^d, so slot 0 is the zero displacement and every other slot
/// is lexicographically positive.
class DisplacementIndex {
 public:
  DisplacementIndex(int d, std::int64_t m);

  int dim() const noexcept { return d_; }
  std::int64_t radius() const noexcept { return m_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(total_ - center_); }

  std::size_t slot(const Site& x) const noexcept;  // requires ||x|| <= m; maps -x to x
  Site displacement(std::size_t slot) const noexcept;
  /// Unordered window pairs {u, u+x}: prod_i (2m+1-|x_i|).
  std::uint64_t pairs(std::size_t slot) const noexcept;

 private:
  int d_;
  std::int64_t m_;
  std::uint64_t total_;
  std::uint64_t center_;
};

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Translation-averaged two-point function on the inner window, canonical displacements
/// only. Optionally carries per-batch tables (contiguous replica blocks) for resampling.
struct TwoPointTable {
  int d = 1;
  std::int64_t n = 1;  // box radius
  std::int64_t m = 1;  // inner window radius
  std::uint64_t replicas = 0;
  std::vector<double> tau;
  std::vector<double> stderr_;
  std::vector<std::uint64_t> pairs;
  std::vector<std::vector<double>> batches;

  DisplacementIndex index() const { return {d, m}; }
  double at(const Site& x) const;  // 0 beyond the window

  /// Sum of tau over all displacements (both signs) with ||x|| = r, for r = 0..m.
  static std::vector<double> shell_sums(int d, std::int64_t m, std::span<const double> tau);
  std::vector<double> shell_sums() const { return shell_sums(d, m, tau); }
  /// Mean of tau over the displacements of each shell, r = 0..m.
  std::vector<double> shell_means() const;

  /// Table with tau replaced by an explicit function of the displacement (synthetic data).
  template <class F>
  static TwoPointTable synthetic(int d, std::int64_t m, F&& f) {
    TwoPointTable t;
    t.d = d;
    t.n = 2 * m;
    t.m = m;
    t.replicas = 1;
    const DisplacementIndex idx(d, m);
    t.tau.resize(idx.size());
    t.stderr_.assign(idx.size(), 0.0);
    t.pairs.resize(idx.size());
    for (std::size_t s = 0; s < idx.size(); ++s) {
      t.tau[s] = s == 0 ? 1.0 : static_cast<double>(f(idx.displacement(s)));
      t.pairs[s] = idx.pairs(s);
    }
    return t;
  }
};

/// Number of shells r with |{x : ||x|| = r}| for dimension d.
std::uint64_t shell_size(int d, std::int64_t r) noexcept;

struct ClusterTail {
  std::vector<std::uint64_t> thresholds;
  std::vector<double> probability;
  std::vector<double> stderr_;
};

/// Everything measured from one batch of replicas at a single beta.
struct Measurement {
  double beta = 0.0;
  TwoPointTable table;
  ClusterTail tail;
  /// Mean over window vertices u of |C(u) ∩ window|; a second route to the window
  /// susceptibility.
  Estimate window_mass;
  std::uint64_t largest_cluster = 0;
  double mean_open_edges = 0.0;
};

struct MeasureOptions {
  std::int64_t inner_radius = 0;  // 0 selects n/2
  std::uint32_t replicas = 1;
  std::uint64_t seed = 0;
  std::uint32_t first_replica = 0;
  unsigned threads = 1;
  std::uint32_t batches = 32;
  std::size_t fft_min_cluster = 0;  // 0 picks a size from the window; huge disables FFT
};

/// Samples `replicas` configurations with keys first_replica, first_replica+1, ... and
/// accumulates all observables. Output is independent of the thread count.
Measurement measure(const Sampler& sampler, double beta, const MeasureOptions& options);

/// Translation-averaged two-point table from an explicit batch (all on one box).
TwoPointTable two_point_estimate(std::span<const Configuration> configs, std::int64_t inner_radius);

/// P(|K| >= t) averaged over the inner window; thresholds must be ascending.
ClusterTail cluster_tail(std::span<const Configuration> configs, std::span<const std::uint64_t> thresholds,
                         std::int64_t inner_radius);

/// Powers of two up to `largest`.
std::vector<std::uint64_t> dyadic_thresholds(std::uint64_t largest);

/// r^{-d} sum_{||x|| <= r} tau(x). Throws std::invalid_argument when r is outside [1, m].
double spatial_average(const TwoPointTable& table, std::int64_t r);
Estimate spatial_average_with_error(const TwoPointTable& table, std::int64_t r);

double susceptibility_estimate(const TwoPointTable& table);
Estimate susceptibility_with_error(const TwoPointTable& table);

struct CorrelationLength {
  std::int64_t radius = 1;
  bool lower_bound = false;  // true: no r <= m reached chi/2, radius holds m
};

/// min{r >= 1 : sum_{||x|| <= r} tau(x) >= chi / 2}.
CorrelationLength correlation_length_estimate(const TwoPointTable& table, double chi);

/// Plug-in triangle sum_{x,y in window} tau(x) tau(y-x) tau(y), with the convolution
/// restricted to the window. Uses direct summation for small windows, FFT otherwise.
double triangle_estimate(const TwoPointTable& table);
/// Three independent tables, one per factor (removes the plug-in bias).
double triangle_estimate(const TwoPointTable& a, const TwoPointTable& b, const TwoPointTable& c);
double triangle_estimate_fft(const TwoPointTable& a, const TwoPointTable& b, const TwoPointTable& c);
double triangle_estimate_direct(const TwoPointTable& a, const TwoPointTable& b, const TwoPointTable& c);

/// P(0 <-> x inside [-2||x||, 2||x||]^d).
Estimate restricted_two_point(const KernelSpec& spec, double beta, const Site& x, std::uint32_t replicas,
                              std::uint64_t seed, unsigned threads = 1);

}  // namespace lrp
