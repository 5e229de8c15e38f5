#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrperc/kernel.hpp"
#include "lrperc/lattice.hpp"
#include "lrperc/observables.hpp"

namespace lrp {

/// Shell means of tau over ||x|| = r for selected radii.
struct ShellProfile {
  int d = 1;
  std::int64_t m = 1;
  std::vector<std::int64_t> r;
  std::vector<double> mean;
  std::vector<double> stderr_;
};

/// Radii rmin..rmax spaced roughly evenly in log r (`per_octave` per doubling), endpoints
/// included, duplicates removed.
std::vector<std::int64_t> log_spaced_radii(std::int64_t rmin, std::int64_t rmax, double per_octave = 8.0);

/// Shell means at `radii` (all of 1..m when empty). Errors come from the batch tables when
/// there are at least two, else from the per-displacement errors treated as independent.
ShellProfile shell_profile(const TwoPointTable& table, std::span<const std::int64_t> radii = {});

struct SlopeOptions {
  std::uint32_t bootstrap_resamples = 200;
  std::uint64_t seed = 0x51;
  double per_octave = 8.0;
};

struct SlopeStatistic {
  double slope = 0.0;
  double stderr_ = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double delta_stderr = 0.0;
  std::size_t shells = 0;
  bool replica_bootstrap = false;  // false: CI from resampling shells
  bool degenerate = false;         // some shell mean is 0; slope is -inf in effect
};

/// WLS slope of log shell-mean tau against log r over log-spaced shells in [r_min, r_max].
/// Requires 2 <= r_min < r_max <= m and at least 3 shells.
SlopeStatistic slope_statistic(const TwoPointTable& table, std::int64_t r_min, std::int64_t r_max,
                               const SlopeOptions& options = {});

struct SweepRecord {
  double beta = 0.0;
  std::int64_t n = 1;
  std::int64_t m = 1;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  Estimate chi;
  CorrelationLength xi;
  double nabla = 1.0;
  std::vector<std::int64_t> s_radii;  // 1, 2, 4, ... <= m
  std::vector<Estimate> s_profile;
  ClusterTail tail;
  std::uint64_t largest_cluster = 0;
  ShellProfile shells;  // log-spaced
  std::shared_ptr<const TwoPointTable> table;  // kept only on request
};

SweepRecord make_sweep_record(const Measurement& measurement, std::uint64_t seed, bool keep_table = false);

struct SweepOptions {
  std::int64_t inner_radius = 0;
  std::uint32_t replicas = 16;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::uint32_t batches = 32;
  bool keep_tables = false;
};

/// One record per beta. Every beta uses the same replica keys, so configurations are
/// nested along the grid and increasing observables are pathwise monotone.
std::vector<SweepRecord> beta_sweep(const KernelSpec& spec, const BoxLattice& box, std::span<const double> grid,
                                    const SweepOptions& options);

struct CriticalOptions {
  std::int64_t inner_radius = 0;
  std::int64_t r_min = 0;  // 0 selects 8
  std::int64_t r_max = 0;  // 0 selects m / 4
  std::uint32_t probe_replicas = 64;
  double tolerance = 0.02;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::uint32_t batches = 32;
  double beta_lo = 0.0;  // 0 selects 1 / sum_x J(x)
  double beta_hi = 0.0;  // 0 selects 2 beta_lo
  int max_expansions = 8;
  std::uint32_t widen_factor = 4;
  SlopeOptions slope;
};

struct Probe {
  double beta = 0.0;
  std::uint32_t replicas = 0;
  SlopeStatistic stat;
  int verdict = 0;  // -1 subcritical, +1 supercritical, 0 undecided
  bool bisection = false;
};

struct CriticalEstimate {
  KernelSpec spec;
  double beta_c_hat = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t n = 1;
  std::int64_t m = 1;
  std::int64_t r_min = 0;
  std::int64_t r_max = 0;
  std::uint32_t replicas = 0;  // per probe, before widening
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  double target_slope = 0.0;
  Probe lo_probe;
  Probe hi_probe;
  std::vector<Probe> probes;
  bool widened = false;
  std::string stop_reason;

  /// lo_probe is steeper than the target and hi_probe shallower, each by more than one SE.
  bool certified() const;
};

class BracketError : public std::runtime_error {
 public:
  BracketError(const std::string& what, std::vector<Probe> probes)
      : std::runtime_error(what), probes_(std::move(probes)) {}
  const std::vector<Probe>& probes() const noexcept { return probes_; }

 private:
  std::vector<Probe> probes_;
};

/// sum_{x != 0} J(x) over Z^d (or up to the truncation).
double total_coupling(const KernelSpec& spec);

/// Bisection on the two-point slope. Throws BracketError when no bracket can be certified,
/// std::invalid_argument on a bad window.
CriticalEstimate find_beta_c(const KernelSpec& spec, const BoxLattice& box, const CriticalOptions& options);

}  // namespace lrp
