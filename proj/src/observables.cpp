#include "lrperc/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include "fft_grid.hpp"
#include "lrperc/parallel.hpp"
#include "lrperc/rng.hpp"
#include "observables_detail.hpp"

namespace lrp {

// ---------------------------------------------------------------------------------------
// DisplacementIndex

DisplacementIndex::DisplacementIndex(int d, std::int64_t m) : d_(d), m_(m), total_(1) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("dimension must be in [1,3]");
  if (m < 0) throw std::invalid_argument("window radius must be >= 0");
  for (int i = 0; i < d; ++i) total_ *= static_cast<std::uint64_t>(2 * m + 1);
  center_ = total_ / 2;
}

std::size_t DisplacementIndex::slot(const Site& x) const noexcept {
  std::uint64_t idx = 0;
  for (int i = 0; i < d_; ++i) idx = idx * static_cast<std::uint64_t>(2 * m_ + 1) + static_cast<std::uint64_t>(x[i] + m_);
  if (idx < center_) idx = total_ - 1 - idx;
  return static_cast<std::size_t>(idx - center_);
}

Site DisplacementIndex::displacement(std::size_t slot) const noexcept {
  Site x{};
  std::uint64_t rest = center_ + slot;
  const auto span = static_cast<std::uint64_t>(2 * m_ + 1);
  for (int i = d_ - 1; i >= 0; --i) {
    x[i] = static_cast<std::int64_t>(rest % span) - m_;
    rest /= span;
  }
  return x;
}

std::uint64_t DisplacementIndex::pairs(std::size_t slot) const noexcept {
  const Site x = displacement(slot);
  std::uint64_t p = 1;
  for (int i = 0; i < d_; ++i) p *= static_cast<std::uint64_t>(2 * m_ + 1 - (x[i] < 0 ? -x[i] : x[i]));
  return p;
}

std::uint64_t shell_size(int d, std::int64_t r) noexcept {
  if (r == 0) return 1;
  const auto outer = static_cast<std::uint64_t>(2 * r + 1);
  const auto inner = static_cast<std::uint64_t>(2 * r - 1);
  std::uint64_t a = 1, b = 1;
  for (int i = 0; i < d; ++i) {
    a *= outer;
    b *= inner;
  }
  return a - b;
}

// ---------------------------------------------------------------------------------------
// TwoPointTable

double TwoPointTable::at(const Site& x) const {
  if (sup_norm(x) > m) return 0.0;
  return tau[index().slot(x)];
}

std::vector<double> TwoPointTable::shell_sums(int d, std::int64_t m, std::span<const double> tau) {
  const DisplacementIndex idx(d, m);
  std::vector<double> shells(static_cast<std::size_t>(m) + 1, 0.0);
  shells[0] = tau.empty() ? 0.0 : tau[0];
  for (std::size_t s = 1; s < idx.size(); ++s)
    shells[static_cast<std::size_t>(sup_norm(idx.displacement(s)))] += 2.0 * tau[s];
  return shells;
}

std::vector<double> TwoPointTable::shell_means() const {
  auto sums = shell_sums();
  for (std::size_t r = 0; r < sums.size(); ++r) sums[r] /= static_cast<double>(shell_size(d, static_cast<std::int64_t>(r)));
  return sums;
}

// ---------------------------------------------------------------------------------------
// Per-replica kernel

namespace detail {

ReplicaKernel::ReplicaKernel(const BoxLattice& box, std::int64_t inner_radius, std::size_t fft_min_cluster)
    : box_(box), index_(box.dim(), inner_radius), forest_(box.vertex_count()) {
  const int d = box.dim();
  const std::int64_t m = inner_radius;
  if (m < 1 || m > box.radius()) throw std::invalid_argument("inner radius must be in [1, n]");
  const std::int64_t span = 2 * m + 1;
  std::uint64_t wcount = 1;
  for (int i = 0; i < d; ++i) wcount *= static_cast<std::uint64_t>(span);
  window_.reserve(wcount);
  local_.reserve(wcount * static_cast<std::size_t>(d));
  for (std::uint64_t w = 0; w < wcount; ++w) {
    Site x{};
    std::uint64_t rest = w;
    for (int i = d - 1; i >= 0; --i) {
      x[i] = static_cast<std::int64_t>(rest % span) - m;
      rest /= span;
    }
    window_.push_back(box.index_of(x));
    for (int i = 0; i < d; ++i) local_.push_back(static_cast<std::int32_t>(x[i] + m));
  }
  dense_id_.assign(box.vertex_count(), kUnset);

  const std::int64_t grid = fft_friendly_size(2 * span - 1);
  std::uint64_t cells = 1;
  for (int i = 0; i < d; ++i) cells *= static_cast<std::uint64_t>(grid);
  if (fft_min_cluster == 0) {
    // direct pair work s^2/2 against a few grid-sized transforms
    const double cost = 8.0 * static_cast<double>(cells) * std::log2(static_cast<double>(cells) + 2.0);
    fft_min_cluster_ = static_cast<std::size_t>(std::sqrt(2.0 * cost));
  } else {
    fft_min_cluster_ = fft_min_cluster;
  }
  fft_size_ = grid;
}

void ReplicaKernel::process(std::span<const Edge> edges, ReplicaResult& out) {
  const int d = box_.dim();
  forest_.reset();
  for (const auto& [u, v] : edges) forest_.unite(u, v);

  out.counts.assign(index_.size(), 0);
  out.tail_buckets.assign(64, 0);
  out.mass = 0;
  out.largest = 0;

  // group window vertices by cluster, preserving window order
  clusters_.clear();
  member_of_.resize(window_.size());
  for (std::size_t w = 0; w < window_.size(); ++w) {
    const VertexId root = forest_.find(window_[w]);
    std::uint32_t& id = dense_id_[root];
    if (id == kUnset) {
      id = static_cast<std::uint32_t>(clusters_.size());
      clusters_.push_back({root, 0, 0});
    }
    member_of_[w] = id;
    ++clusters_[id].window_size;
  }
  std::uint32_t offset = 0;
  for (auto& c : clusters_) {
    c.begin = offset;
    offset += c.window_size;
    c.window_size = 0;
  }
  members_.resize(window_.size());
  for (std::size_t w = 0; w < window_.size(); ++w) {
    auto& c = clusters_[member_of_[w]];
    members_[c.begin + c.window_size++] = static_cast<std::uint32_t>(w);
  }

  for (const auto& c : clusters_) {
    dense_id_[c.root] = kUnset;
    const std::uint64_t s = c.window_size;
    const std::uint64_t full = forest_.size_of_root(c.root);
    out.mass += s * s;
    out.tail_buckets[static_cast<std::size_t>(std::bit_width(full) - 1)] += s;
    if (s < 2) continue;
    const std::span<const std::uint32_t> mem(members_.data() + c.begin, s);
    if (s >= fft_min_cluster_)
      count_pairs_fft(mem, out.counts);
    else if (d == 1)
      count_pairs_direct_1d(mem, out.counts);
    else
      count_pairs_direct(mem, out.counts);
  }
  out.counts[0] = window_.size();

  for (VertexId v = 0; v < forest_.vertex_count(); ++v)
    if (forest_.root_of(v) == v) out.largest = std::max<std::uint64_t>(out.largest, forest_.size_of_root(v));
}

void ReplicaKernel::count_pairs_direct_1d(std::span<const std::uint32_t> mem, std::vector<std::uint64_t>& counts) const {
  const std::int32_t m = static_cast<std::int32_t>(index_.radius());
  for (std::size_t i = 0; i < mem.size(); ++i) {
    const std::int32_t xi = local_[mem[i]];
    for (std::size_t j = i + 1; j < mem.size(); ++j) {
      const std::int32_t diff = local_[mem[j]] - xi;  // members are ascending
      if (diff > m) break;
      ++counts[static_cast<std::size_t>(diff)];
    }
  }
}

void ReplicaKernel::count_pairs_direct(std::span<const std::uint32_t> mem, std::vector<std::uint64_t>& counts) const {
  const int d = box_.dim();
  const std::int64_t m = index_.radius();
  for (std::size_t i = 0; i < mem.size(); ++i) {
    const std::int32_t* a = &local_[static_cast<std::size_t>(mem[i]) * d];
    for (std::size_t j = i + 1; j < mem.size(); ++j) {
      const std::int32_t* b = &local_[static_cast<std::size_t>(mem[j]) * d];
      Site diff{};
      bool inside = true;
      for (int k = 0; k < d; ++k) {
        diff[k] = b[k] - a[k];
        if (diff[k] > m || diff[k] < -m) {
          inside = false;
          break;
        }
      }
      if (inside) ++counts[index_.slot(diff)];
    }
  }
}

void ReplicaKernel::count_pairs_fft(std::span<const std::uint32_t> mem, std::vector<std::uint64_t>& counts) {
  const int d = box_.dim();
  if (!fft_) {
    fft_ = std::make_unique<FftGrid>(d, fft_size_);
    fft_real_ = fft_->make_real();
    fft_spec_ = fft_->make_complex();
  }
  std::fill(fft_real_.begin(), fft_real_.end(), 0.0);
  std::int64_t coords[3] = {0, 0, 0};
  for (const auto w : mem) {
    for (int k = 0; k < d; ++k) coords[k] = local_[static_cast<std::size_t>(w) * d + k];
    fft_real_[fft_->wrap(coords)] = 1.0;
  }
  fft_->forward(fft_real_.data(), fft_spec_.data());
  for (auto& z : fft_spec_) z = std::norm(z);
  fft_->backward(fft_spec_.data(), fft_real_.data());
  const double scale = 1.0 / static_cast<double>(fft_->real_count());
  for (std::size_t s = 1; s < index_.size(); ++s) {
    const Site x = index_.displacement(s);
    const double v = fft_real_[fft_->wrap(x.data())] * scale;
    counts[s] += static_cast<std::uint64_t>(std::llround(v));
  }
}

void Accumulator::init(std::size_t entries, std::uint32_t batches) {
  sum.assign(entries, 0);
  sumsq.assign(entries, 0);
  batch_sum.assign(batches, std::vector<std::uint64_t>(entries, 0));
  batch_replicas.assign(batches, 0);
  tail_sum.assign(64, 0);
  tail_sumsq.assign(64, 0);
  mass_sum = 0;
  mass_sumsq = 0;
  replicas = 0;
  largest = 0;
  edges = 0;
}

void Accumulator::add(const ReplicaResult& r, std::uint32_t batch, std::uint64_t edge_count) {
  for (std::size_t s = 0; s < r.counts.size(); ++s) {
    const std::uint64_t c = r.counts[s];
    if (c == 0) continue;
    sum[s] += c;
    sumsq[s] += c * c;
    batch_sum[batch][s] += c;
  }
  ++batch_replicas[batch];
  // tail count at threshold 2^k is the number of window vertices with cluster size >= 2^k
  std::uint64_t above = 0;
  for (int k = 63; k >= 0; --k) {
    above += r.tail_buckets[static_cast<std::size_t>(k)];
    tail_sum[static_cast<std::size_t>(k)] += above;
    tail_sumsq[static_cast<std::size_t>(k)] += static_cast<unsigned __int128>(above) * above;
  }
  mass_sum += r.mass;
  mass_sumsq += static_cast<unsigned __int128>(r.mass) * r.mass;
  largest = std::max(largest, r.largest);
  edges += edge_count;
  ++replicas;
}

void Accumulator::merge(const Accumulator& o) {
  for (std::size_t s = 0; s < sum.size(); ++s) {
    sum[s] += o.sum[s];
    sumsq[s] += o.sumsq[s];
  }
  for (std::size_t b = 0; b < batch_sum.size(); ++b) {
    for (std::size_t s = 0; s < sum.size(); ++s) batch_sum[b][s] += o.batch_sum[b][s];
    batch_replicas[b] += o.batch_replicas[b];
  }
  for (std::size_t k = 0; k < 64; ++k) {
    tail_sum[k] += o.tail_sum[k];
    tail_sumsq[k] += o.tail_sumsq[k];
  }
  mass_sum += o.mass_sum;
  mass_sumsq += o.mass_sumsq;
  largest = std::max(largest, o.largest);
  edges += o.edges;
  replicas += o.replicas;
}

double mean_stderr(long double sum, long double sumsq, std::uint64_t r, long double scale) {
  if (r < 2) return 0.0;
  const long double n = static_cast<long double>(r);
  long double var = (sumsq - sum * sum / n) / (n - 1);
  if (var < 0) var = 0;
  return static_cast<double>(std::sqrt(var / n) / scale);
}

Measurement Accumulator::finish(const BoxLattice& box, const DisplacementIndex& idx, double beta) const {
  Measurement out;
  out.beta = beta;
  auto& t = out.table;
  t.d = box.dim();
  t.n = box.radius();
  t.m = idx.radius();
  t.replicas = replicas;
  const std::size_t entries = idx.size();
  t.tau.resize(entries);
  t.stderr_.resize(entries);
  t.pairs.resize(entries);
  for (std::size_t s = 0; s < entries; ++s) {
    const std::uint64_t p = idx.pairs(s);
    t.pairs[s] = p;
    const long double denom = static_cast<long double>(p) * static_cast<long double>(std::max<std::uint64_t>(replicas, 1));
    t.tau[s] = static_cast<double>(static_cast<long double>(sum[s]) / denom);
    t.stderr_[s] = mean_stderr(sum[s], sumsq[s], replicas, p);
  }
  for (std::size_t b = 0; b < batch_sum.size(); ++b) {
    if (batch_replicas[b] == 0) continue;
    std::vector<double> bt(entries);
    for (std::size_t s = 0; s < entries; ++s)
      bt[s] = static_cast<double>(static_cast<long double>(batch_sum[b][s]) /
                                  (static_cast<long double>(t.pairs[s]) * batch_replicas[b]));
    t.batches.push_back(std::move(bt));
  }

  const std::uint64_t wsize = t.pairs[0];
  out.largest_cluster = largest;
  out.tail.thresholds = dyadic_thresholds(largest);
  for (std::size_t k = 0; k < out.tail.thresholds.size(); ++k) {
    const long double denom = static_cast<long double>(wsize) * std::max<std::uint64_t>(replicas, 1);
    out.tail.probability.push_back(static_cast<double>(tail_sum[k] / denom));
    out.tail.stderr_.push_back(mean_stderr(tail_sum[k], static_cast<long double>(tail_sumsq[k]), replicas, wsize));
  }
  out.window_mass.value = static_cast<double>(static_cast<long double>(mass_sum) /
                                              (static_cast<long double>(wsize) * std::max<std::uint64_t>(replicas, 1)));
  out.window_mass.stderr_ = mean_stderr(static_cast<long double>(mass_sum), static_cast<long double>(mass_sumsq),
                                        replicas, wsize);
  out.mean_open_edges = replicas ? static_cast<double>(edges) / static_cast<double>(replicas) : 0.0;
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------
// Drivers

std::vector<std::uint64_t> dyadic_thresholds(std::uint64_t largest) {
  std::vector<std::uint64_t> t;
  for (std::uint64_t v = 1; v <= std::max<std::uint64_t>(largest, 1); v *= 2) {
    t.push_back(v);
    if (v > (std::numeric_limits<std::uint64_t>::max() >> 1)) break;
  }
  return t;
}

namespace {

std::int64_t resolve_inner(const BoxLattice& box, std::int64_t requested) {
  const std::int64_t m = requested > 0 ? requested : std::max<std::int64_t>(1, box.radius() / 2);
  if (m > box.radius()) throw std::invalid_argument("inner radius m exceeds box radius n");
  return m;
}

}  // namespace

Measurement measure(const Sampler& sampler, double beta, const MeasureOptions& options) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (options.replicas == 0) throw std::invalid_argument("replica count must be positive");
  const BoxLattice& box = sampler.box();
  const std::int64_t m = resolve_inner(box, options.inner_radius);
  const DisplacementIndex idx(box.dim(), m);
  const std::uint32_t batches = std::max<std::uint32_t>(1, std::min(options.batches, options.replicas));
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, options.replicas));

  struct Worker {
    std::unique_ptr<detail::ReplicaKernel> kernel;
    detail::Accumulator acc;
    detail::ReplicaResult result;
    std::vector<Edge> edges;
  };
  std::vector<Worker> workers(threads);
  for (auto& w : workers) {
    w.kernel = std::make_unique<detail::ReplicaKernel>(box, m, options.fft_min_cluster);
    w.acc.init(idx.size(), batches);
  }
  parallel_for(options.replicas, threads, [&](unsigned wid, std::uint64_t i) {
    auto& w = workers[wid];
    const auto replica = static_cast<std::uint32_t>(options.first_replica + i);
    sampler.sample_into(beta, options.seed, replica, w.edges);
    w.kernel->process(w.edges, w.result);
    const auto batch = static_cast<std::uint32_t>(i * batches / options.replicas);
    w.acc.add(w.result, batch, w.edges.size());
  });
  for (std::size_t k = 1; k < workers.size(); ++k) workers[0].acc.merge(workers[k].acc);
  return workers[0].acc.finish(box, idx, beta);
}

TwoPointTable two_point_estimate(std::span<const Configuration> configs, std::int64_t inner_radius) {
  if (configs.empty()) throw std::invalid_argument("two_point_estimate needs a nonempty batch");
  const BoxLattice& box = configs.front().box;
  const std::int64_t m = resolve_inner(box, inner_radius);
  const DisplacementIndex idx(box.dim(), m);
  const auto batches = static_cast<std::uint32_t>(std::min<std::size_t>(32, configs.size()));
  detail::ReplicaKernel kernel(box, m);
  detail::Accumulator acc;
  acc.init(idx.size(), batches);
  detail::ReplicaResult result;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (!(configs[i].box == box)) throw std::invalid_argument("configurations must share one box");
    kernel.process(configs[i].open_edges, result);
    acc.add(result, static_cast<std::uint32_t>(i * batches / configs.size()), configs[i].open_edges.size());
  }
  return acc.finish(box, idx, configs.front().beta).table;
}

ClusterTail cluster_tail(std::span<const Configuration> configs, std::span<const std::uint64_t> thresholds,
                         std::int64_t inner_radius) {
  if (configs.empty()) throw std::invalid_argument("cluster_tail needs a nonempty batch");
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw std::invalid_argument("tail thresholds must be ascending");
  const BoxLattice& box = configs.front().box;
  const std::int64_t m = resolve_inner(box, inner_radius);
  std::vector<VertexId> window;
  for (VertexId v = 0; v < box.vertex_count(); ++v)
    if (sup_norm(box.site_of(v)) <= m) window.push_back(v);

  const std::size_t k = thresholds.size();
  std::vector<long double> sum(k, 0), sumsq(k, 0);
  for (const auto& cfg : configs) {
    auto forest = build_clusters(cfg);
    std::vector<std::uint64_t> count(k, 0);
    for (const VertexId u : window) {
      const std::uint64_t size = forest.size_of_root(forest.root_of(u));
      for (std::size_t j = 0; j < k && thresholds[j] <= size; ++j) ++count[j];
    }
    for (std::size_t j = 0; j < k; ++j) {
      sum[j] += count[j];
      sumsq[j] += static_cast<long double>(count[j]) * count[j];
    }
  }
  ClusterTail tail;
  tail.thresholds.assign(thresholds.begin(), thresholds.end());
  const long double r = static_cast<long double>(configs.size());
  for (std::size_t j = 0; j < k; ++j) {
    tail.probability.push_back(static_cast<double>(sum[j] / (r * window.size())));
    tail.stderr_.push_back(detail::mean_stderr(sum[j], sumsq[j], configs.size(), window.size()));
  }
  return tail;
}

// ---------------------------------------------------------------------------------------
// Reductions of a table

namespace {

std::vector<double> ball_sums(int d, std::int64_t m, std::span<const double> tau) {
  auto shells = TwoPointTable::shell_sums(d, m, tau);
  for (std::size_t r = 1; r < shells.size(); ++r) shells[r] += shells[r - 1];
  return shells;
}

template <class Stat>
Estimate with_batch_error(const TwoPointTable& table, Stat&& stat) {
  Estimate e{stat(std::span<const double>(table.tau)), 0.0};
  const std::size_t b = table.batches.size();
  if (b >= 2) {
    double mean = 0.0, sq = 0.0;
    std::vector<double> vals;
    for (const auto& bt : table.batches) vals.push_back(stat(std::span<const double>(bt)));
    for (double v : vals) mean += v;
    mean /= static_cast<double>(b);
    for (double v : vals) sq += (v - mean) * (v - mean);
    e.stderr_ = std::sqrt(sq / static_cast<double>(b - 1) / static_cast<double>(b));
  }
  return e;
}

}  // namespace

double spatial_average(const TwoPointTable& table, std::int64_t r) {
  return spatial_average_with_error(table, r).value;
}

Estimate spatial_average_with_error(const TwoPointTable& table, std::int64_t r) {
  if (r < 1 || r > table.m)
    throw std::invalid_argument("spatial average radius r=" + std::to_string(r) + " outside [1, m=" +
                                std::to_string(table.m) + "]");
  const double scale = std::pow(static_cast<double>(r), -table.d);
  return with_batch_error(table, [&](std::span<const double> tau) {
    return ball_sums(table.d, table.m, tau)[static_cast<std::size_t>(r)] * scale;
  });
}

double susceptibility_estimate(const TwoPointTable& table) { return susceptibility_with_error(table).value; }

Estimate susceptibility_with_error(const TwoPointTable& table) {
  return with_batch_error(table, [&](std::span<const double> tau) { return ball_sums(table.d, table.m, tau).back(); });
}

CorrelationLength correlation_length_estimate(const TwoPointTable& table, double chi) {
  const auto balls = ball_sums(table.d, table.m, table.tau);
  for (std::int64_t r = 1; r <= table.m; ++r)
    if (balls[static_cast<std::size_t>(r)] >= chi / 2.0) return {r, false};
  return {table.m, true};
}

// ---------------------------------------------------------------------------------------
// Triangle

namespace {

void require_same_window(const TwoPointTable& a, const TwoPointTable& b) {
  if (a.d != b.d || a.m != b.m) throw std::invalid_argument("triangle factors must share d and window");
}

}  // namespace

double triangle_estimate_direct(const TwoPointTable& a, const TwoPointTable& b, const TwoPointTable& c) {
  require_same_window(a, b);
  require_same_window(a, c);
  const int d = a.d;
  const std::int64_t m = a.m;
  const std::int64_t span = 2 * m + 1;
  std::uint64_t count = 1;
  for (int i = 0; i < d; ++i) count *= static_cast<std::uint64_t>(span);
  std::vector<Site> pts(count);
  for (std::uint64_t w = 0; w < count; ++w) {
    std::uint64_t rest = w;
    for (int i = d - 1; i >= 0; --i) {
      pts[w][i] = static_cast<std::int64_t>(rest % span) - m;
      rest /= span;
    }
  }
  long double total = 0;
  for (const auto& y : pts) {
    const double ty = c.at(y);
    if (ty == 0.0) continue;
    long double conv = 0;
    for (const auto& x : pts) conv += a.at(x) * b.at(y - x);
    total += conv * ty;
  }
  return static_cast<double>(total);
}

double triangle_estimate_fft(const TwoPointTable& a, const TwoPointTable& b, const TwoPointTable& c) {
  require_same_window(a, b);
  require_same_window(a, c);
  const int d = a.d;
  const std::int64_t m = a.m;
  const std::int64_t span = 2 * m + 1;
  const detail::FftGrid grid(d, detail::fft_friendly_size(2 * span - 1));
  const DisplacementIndex idx(d, m);

  auto fill = [&](const TwoPointTable& t, std::vector<double>& real) {
    std::fill(real.begin(), real.end(), 0.0);
    for (std::size_t s = 0; s < idx.size(); ++s) {
      Site x = idx.displacement(s);
      real[grid.wrap(x.data())] = t.tau[s];
      for (auto& v : x) v = -v;
      real[grid.wrap(x.data())] = t.tau[s];
    }
  };
  auto ra = grid.make_real();
  auto rb = grid.make_real();
  auto fa = grid.make_complex();
  auto fb = grid.make_complex();
  fill(a, ra);
  fill(b, rb);
  grid.forward(ra.data(), fa.data());
  grid.forward(rb.data(), fb.data());
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  grid.backward(fa.data(), ra.data());
  const double scale = 1.0 / static_cast<double>(grid.real_count());

  long double total = 0;
  for (std::size_t s = 0; s < idx.size(); ++s) {
    Site y = idx.displacement(s);
    const double cy = c.tau[s];
    if (cy == 0.0) continue;
    const double conv_pos = ra[grid.wrap(y.data())] * scale;
    if (s == 0) {
      total += conv_pos * cy;
      continue;
    }
    for (auto& v : y) v = -v;
    const double conv_neg = ra[grid.wrap(y.data())] * scale;
    total += (conv_pos + conv_neg) * cy;
  }
  return static_cast<double>(total);
}

double triangle_estimate(const TwoPointTable& a, const TwoPointTable& b, const TwoPointTable& c) {
  std::uint64_t count = 1;
  for (int i = 0; i < a.d; ++i) count *= static_cast<std::uint64_t>(2 * a.m + 1);
  if (count <= 257) return triangle_estimate_direct(a, b, c);
  return triangle_estimate_fft(a, b, c);
}

double triangle_estimate(const TwoPointTable& table) { return triangle_estimate(table, table, table); }

// ---------------------------------------------------------------------------------------

Estimate restricted_two_point(const KernelSpec& spec, double beta, const Site& x, std::uint32_t replicas,
                              std::uint64_t seed, unsigned threads) {
  const std::int64_t len = sup_norm(x);
  if (len < 1) throw std::invalid_argument("restricted_two_point needs ||x|| >= 1");
  if (replicas == 0) throw std::invalid_argument("replica count must be positive");
  const BoxLattice box(spec.d, 2 * len);
  const Sampler sampler(spec, box);
  const VertexId origin = box.origin();
  const VertexId target = box.index_of(x);
  threads = std::max(1u, std::min<unsigned>(threads, replicas));
  std::vector<std::uint8_t> hit(replicas, 0);
  struct Worker {
    std::vector<Edge> edges;
    std::unique_ptr<ClusterForest> forest;
  };
  std::vector<Worker> workers(threads);
  for (auto& w : workers) w.forest = std::make_unique<ClusterForest>(box.vertex_count());
  parallel_for(replicas, threads, [&](unsigned wid, std::uint64_t i) {
    auto& w = workers[wid];
    sampler.sample_into(beta, seed, static_cast<std::uint32_t>(i), w.edges);
    w.forest->reset();
    for (const auto& [u, v] : w.edges) w.forest->unite(u, v);
    hit[i] = w.forest->find(origin) == w.forest->find(target);
  });
  std::uint64_t k = 0;
  for (auto h : hit) k += h;
  const double p = static_cast<double>(k) / replicas;
  return {p, replicas > 1 ? std::sqrt(p * (1 - p) / (replicas - 1)) : 0.0};
}

}  // namespace lrp
