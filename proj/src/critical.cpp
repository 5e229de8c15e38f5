#include "lrperc/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lrperc/fit.hpp"
#include "lrperc/rng.hpp"

namespace lrp {

std::vector<std::int64_t> log_spaced_radii(std::int64_t rmin, std::int64_t rmax, double per_octave) {
  std::vector<std::int64_t> out;
  if (rmin < 1 || rmax < rmin) return out;
  const double step = std::exp2(1.0 / per_octave);
  double x = static_cast<double>(rmin);
  while (true) {
    const auto r = static_cast<std::int64_t>(std::llround(x));
    if (r >= rmax) break;
    if (out.empty() || r > out.back()) out.push_back(r);
    x *= step;
  }
  if (out.empty() || out.back() != rmax) out.push_back(rmax);
  return out;
}

namespace {

std::vector<double> shell_means_of(int d, std::int64_t m, std::span<const double> tau) {
  auto sums = TwoPointTable::shell_sums(d, m, tau);
  for (std::size_t r = 0; r < sums.size(); ++r)
    sums[r] /= static_cast<double>(shell_size(d, static_cast<std::int64_t>(r)));
  return sums;
}

// Per-radius sum of squared per-displacement errors, both signs counted.
std::vector<double> shell_variance_sums(const TwoPointTable& t) {
  std::vector<double> sq(t.tau.size());
  for (std::size_t s = 0; s < sq.size(); ++s) sq[s] = t.stderr_[s] * t.stderr_[s];
  return TwoPointTable::shell_sums(t.d, t.m, sq);
}

}  // namespace

ShellProfile shell_profile(const TwoPointTable& table, std::span<const std::int64_t> radii) {
  ShellProfile p;
  p.d = table.d;
  p.m = table.m;
  if (radii.empty()) {
    for (std::int64_t r = 1; r <= table.m; ++r) p.r.push_back(r);
  } else {
    p.r.assign(radii.begin(), radii.end());
  }
  for (auto r : p.r)
    if (r < 0 || r > table.m)
      throw std::invalid_argument("shell radius " + std::to_string(r) + " outside [0, m=" + std::to_string(table.m) + "]");

  const auto full = shell_means_of(table.d, table.m, table.tau);
  const std::size_t b = table.batches.size();
  std::vector<double> sum(full.size(), 0.0), sumsq(full.size(), 0.0);
  if (b >= 2) {
    for (const auto& bt : table.batches) {
      const auto bm = shell_means_of(table.d, table.m, bt);
      for (std::size_t r = 0; r < bm.size(); ++r) {
        sum[r] += bm[r];
        sumsq[r] += bm[r] * bm[r];
      }
    }
  }
  const auto var_sums = b >= 2 ? std::vector<double>{} : shell_variance_sums(table);
  for (auto r : p.r) {
    const auto i = static_cast<std::size_t>(r);
    p.mean.push_back(full[i]);
    double se = 0.0;
    if (b >= 2) {
      const double mu = sum[i] / static_cast<double>(b);
      const double var = std::max(0.0, (sumsq[i] - static_cast<double>(b) * mu * mu) / static_cast<double>(b - 1));
      se = std::sqrt(var / static_cast<double>(b));
    } else {
      // both signs of x share one estimate, so the 2 copies are perfectly correlated
      const double count = static_cast<double>(shell_size(table.d, r));
      se = r == 0 ? 0.0 : std::sqrt(2.0 * var_sums[i]) / count;
    }
    p.stderr_.push_back(se);
  }
  return p;
}

SlopeStatistic slope_statistic(const TwoPointTable& table, std::int64_t r_min, std::int64_t r_max,
                               const SlopeOptions& options) {
  if (r_min < 2 || r_min >= r_max || r_max > table.m)
    throw std::invalid_argument("slope window [" + std::to_string(r_min) + ", " + std::to_string(r_max) +
                                "] must satisfy 2 <= r_min < r_max <= m=" + std::to_string(table.m));
  const auto radii = log_spaced_radii(r_min, r_max, options.per_octave);
  if (radii.size() < 3) throw std::invalid_argument("slope window holds fewer than 3 shells");
  const auto prof = shell_profile(table, radii);

  SlopeStatistic out;
  out.shells = radii.size();
  if (std::any_of(prof.mean.begin(), prof.mean.end(), [](double v) { return !(v > 0.0); })) {
    out.degenerate = true;
    out.slope = out.ci_lo = out.ci_hi = -std::numeric_limits<double>::infinity();
    return out;
  }

  const std::size_t k = radii.size();
  const bool weighted = std::all_of(prof.stderr_.begin(), prof.stderr_.end(), [](double s) { return s > 0.0; });
  std::vector<double> lx(k), ly(k), w(k);
  for (std::size_t i = 0; i < k; ++i) {
    lx[i] = std::log(static_cast<double>(radii[i]));
    ly[i] = std::log(prof.mean[i]);
    w[i] = weighted ? prof.mean[i] * prof.mean[i] / (prof.stderr_[i] * prof.stderr_[i]) : 1.0;
  }
  const auto line = detail::weighted_line(lx, ly, w);
  out.slope = line.slope;
  out.delta_stderr = line.slope_stderr;

  const std::size_t b = table.batches.size();
  if (b < 2) {
    std::vector<DataPoint> pts;
    for (std::size_t i = 0; i < k; ++i) pts.push_back({static_cast<double>(radii[i]), prof.mean[i], prof.stderr_[i]});
    const auto f = fit_power_law(pts, static_cast<double>(r_min), static_cast<double>(r_max),
                                 {options.bootstrap_resamples, options.seed, 0.95});
    out.ci_lo = f.ci_lo;
    out.ci_hi = f.ci_hi;
    out.stderr_ = out.delta_stderr;
    return out;
  }

  // Replica bootstrap: resample whole batches, refit with the full-data weights.
  std::vector<std::vector<double>> bm;
  bm.reserve(b);
  for (const auto& bt : table.batches) {
    const auto all = shell_means_of(table.d, table.m, bt);
    std::vector<double> sel(k);
    for (std::size_t i = 0; i < k; ++i) sel[i] = all[static_cast<std::size_t>(radii[i])];
    bm.push_back(std::move(sel));
  }
  KeyedStream rng(options.seed, 0, 1, StreamTag::kBootstrap);
  std::vector<double> slopes, acc(k), by(k);
  for (std::uint32_t rep = 0; rep < options.bootstrap_resamples; ++rep) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t j = 0; j < b; ++j) {
      const auto& row = bm[rng.below(b)];
      for (std::size_t i = 0; i < k; ++i) acc[i] += row[i];
    }
    bool ok = true;
    for (std::size_t i = 0; i < k && ok; ++i) {
      if (!(acc[i] > 0.0)) ok = false;
      else by[i] = std::log(acc[i] / static_cast<double>(b));
    }
    if (!ok) continue;
    const auto f = detail::weighted_line(lx, by, w);
    if (f.ok) slopes.push_back(f.slope);
  }
  if (slopes.size() < 10) {
    out.stderr_ = out.delta_stderr;
    out.ci_lo = out.slope - 1.96 * out.stderr_;
    out.ci_hi = out.slope + 1.96 * out.stderr_;
    return out;
  }
  double mu = 0.0;
  for (double s : slopes) mu += s;
  mu /= static_cast<double>(slopes.size());
  double var = 0.0;
  for (double s : slopes) var += (s - mu) * (s - mu);
  out.stderr_ = std::sqrt(var / static_cast<double>(slopes.size() - 1));
  std::sort(slopes.begin(), slopes.end());
  const auto q = [&](double p) { return slopes[static_cast<std::size_t>(p * static_cast<double>(slopes.size() - 1))]; };
  out.ci_lo = std::min(q(0.025), out.slope);
  out.ci_hi = std::max(q(0.975), out.slope);
  // keep at least the t interval of the bootstrap spread
  const double half = detail::t_quantile(b - 1, 0.95) * out.stderr_;
  out.ci_lo = std::min(out.ci_lo, out.slope - half);
  out.ci_hi = std::max(out.ci_hi, out.slope + half);
  out.replica_bootstrap = true;
  return out;
}

SweepRecord make_sweep_record(const Measurement& meas, std::uint64_t seed, bool keep_table) {
  const auto& t = meas.table;
  SweepRecord rec;
  rec.beta = meas.beta;
  rec.n = t.n;
  rec.m = t.m;
  rec.replicas = t.replicas;
  rec.seed = seed;
  rec.chi = susceptibility_with_error(t);
  rec.xi = correlation_length_estimate(t, rec.chi.value);
  rec.nabla = triangle_estimate(t);
  for (std::int64_t r = 1; r <= t.m; r *= 2) {
    rec.s_radii.push_back(r);
    rec.s_profile.push_back(spatial_average_with_error(t, r));
  }
  rec.tail = meas.tail;
  rec.largest_cluster = meas.largest_cluster;
  auto radii = log_spaced_radii(1, t.m);
  rec.shells = shell_profile(t, radii);
  if (keep_table) rec.table = std::make_shared<const TwoPointTable>(t);
  return rec;
}

std::vector<SweepRecord> beta_sweep(const KernelSpec& spec, const BoxLattice& box, std::span<const double> grid,
                                    const SweepOptions& options) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw std::invalid_argument("beta grid values must be >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("beta grid must be strictly increasing");
  }
  const Sampler sampler(spec, box);
  MeasureOptions mo;
  mo.inner_radius = options.inner_radius;
  mo.replicas = options.replicas;
  mo.seed = options.seed;
  mo.threads = options.threads;
  mo.batches = options.batches;
  std::vector<SweepRecord> out;
  for (double beta : grid) out.push_back(make_sweep_record(measure(sampler, beta, mo), options.seed, options.keep_tables));
  return out;
}

double total_coupling(const KernelSpec& spec) {
  spec.validate();
  const std::int64_t cutoff = spec.truncation ? *spec.truncation : std::int64_t{1} << 20;
  long double sum = 0.0L;
  for (std::int64_t r = cutoff; r >= 1; --r)
    sum += static_cast<long double>(shell_size(spec.d, r)) * spec.value_at(r);
  if (!spec.truncation) {
    // integral tail of d 2^d r^{d-1} A r^{-d-alpha} beyond the cutoff (midpoint corrected)
    const double R = static_cast<double>(cutoff) + 0.5;
    sum += spec.d * std::exp2(spec.d) * spec.amplitude * std::pow(R, -spec.alpha) / spec.alpha;
  }
  return static_cast<double>(sum);
}

bool CriticalEstimate::certified() const {
  const auto below = [&](const Probe& p) { return p.stat.degenerate || p.stat.slope < target_slope - p.stat.stderr_; };
  const auto above = [&](const Probe& p) { return !p.stat.degenerate && p.stat.slope > target_slope + p.stat.stderr_; };
  return lo <= beta_c_hat && beta_c_hat <= hi && lo_probe.beta == lo && hi_probe.beta == hi && below(lo_probe) &&
         above(hi_probe);
}

CriticalEstimate find_beta_c(const KernelSpec& spec, const BoxLattice& box, const CriticalOptions& options) {
  spec.validate();
  if (options.tolerance <= 0.0) throw std::invalid_argument("tolerance must be > 0");
  if (options.probe_replicas < 2) throw std::invalid_argument("probe replicas must be >= 2");
  const std::int64_t m = options.inner_radius > 0 ? options.inner_radius : std::max<std::int64_t>(1, box.radius() / 2);
  if (m > box.radius()) throw std::invalid_argument("inner radius exceeds box radius");

  CriticalEstimate est;
  est.spec = spec;
  est.n = box.radius();
  est.m = m;
  est.r_min = options.r_min > 0 ? options.r_min : 8;
  est.r_max = options.r_max > 0 ? options.r_max : m / 4;
  if (est.r_min < 2 || est.r_min >= est.r_max || est.r_max > m)
    throw std::invalid_argument("window [" + std::to_string(est.r_min) + ", " + std::to_string(est.r_max) +
                                "] must satisfy 2 <= r_min < r_max <= m=" + std::to_string(m));
  est.replicas = options.probe_replicas;
  est.seed = options.seed;
  est.tolerance = options.tolerance;
  est.target_slope = -(spec.d - spec.alpha);

  const Sampler sampler(spec, box);
  std::uint32_t replicas = options.probe_replicas;
  const auto probe = [&](double beta, bool bisection) {
    MeasureOptions mo;
    mo.inner_radius = m;
    mo.replicas = replicas;
    mo.seed = options.seed;
    mo.threads = options.threads;
    mo.batches = options.batches;
    const auto meas = measure(sampler, beta, mo);
    Probe p;
    p.beta = beta;
    p.replicas = replicas;
    p.bisection = bisection;
    p.stat = slope_statistic(meas.table, est.r_min, est.r_max, options.slope);
    if (p.stat.degenerate || p.stat.slope < est.target_slope - p.stat.stderr_) p.verdict = -1;
    else if (p.stat.slope > est.target_slope + p.stat.stderr_) p.verdict = 1;
    est.probes.push_back(p);
    return p;
  };

  double lo = options.beta_lo > 0.0 ? options.beta_lo : 1.0 / total_coupling(spec);
  double hi = options.beta_hi > 0.0 ? options.beta_hi : 2.0 * lo;
  if (!(hi > lo)) throw std::invalid_argument("initial bracket needs beta_lo < beta_hi");

  // certify the lower end, halving as needed; a supercritical lower probe tightens hi
  Probe plo = probe(lo, false);
  for (int e = 0; plo.verdict != -1; ++e) {
    if (e >= options.max_expansions)
      throw BracketError("no subcritical lower bracket down to beta=" + std::to_string(lo), est.probes);
    if (plo.verdict == 1 && lo < hi) hi = lo;
    lo /= 2.0;
    plo = probe(lo, false);
  }
  Probe phi = probe(hi, false);
  for (int e = 0; phi.verdict != 1; ++e) {
    if (e >= options.max_expansions)
      throw BracketError("no supercritical upper bracket up to beta=" + std::to_string(hi), est.probes);
    if (phi.verdict == -1) {
      lo = hi;
      plo = phi;
    }
    hi *= 2.0;
    phi = probe(hi, false);
  }

  est.stop_reason = "tolerance";
  est.beta_c_hat = 0.5 * (lo + hi);
  while (hi - lo > options.tolerance * 0.5 * (lo + hi)) {
    const double mid = 0.5 * (lo + hi);
    Probe p = probe(mid, true);
    if (p.verdict == 0 && !est.widened && options.widen_factor > 1) {
      est.widened = true;
      replicas = options.probe_replicas * options.widen_factor;
      p = probe(mid, true);
    }
    if (p.verdict == -1) {
      lo = mid;
      plo = p;
    } else if (p.verdict == 1) {
      hi = mid;
      phi = p;
    } else {
      est.stop_reason = "indistinguishable";
      est.lo = lo;
      est.hi = hi;
      est.beta_c_hat = mid;
      est.lo_probe = plo;
      est.hi_probe = phi;
      return est;
    }
  }
  est.lo = lo;
  est.hi = hi;
  est.beta_c_hat = 0.5 * (lo + hi);
  est.lo_probe = plo;
  est.hi_probe = phi;
  return est;
}

}  // namespace lrp
