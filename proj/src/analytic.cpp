#include "lrperc/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lrp {

namespace {

void check_dim(int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("d must be in 1..3, got " + std::to_string(d));
}

// Calls f(site) for every site of [c - r, c + r]^d.
template <class F>
void for_box(int d, const Site& c, std::int64_t r, F&& f) {
  Site s{};
  for (std::int64_t i = -r; i <= r; ++i) {
    s[0] = c[0] + i;
    if (d == 1) {
      f(s);
      continue;
    }
    for (std::int64_t j = -r; j <= r; ++j) {
      s[1] = c[1] + j;
      if (d == 2) {
        f(s);
        continue;
      }
      for (std::int64_t k = -r; k <= r; ++k) {
        s[2] = c[2] + k;
        f(s);
      }
    }
  }
}

std::int64_t pow2(int j) { return std::int64_t{1} << j; }

}  // namespace

double threshold_convolution_sum(int d, double alpha, double R, const Site& x) {
  check_dim(d);
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
  if (!(R >= 1.0)) throw std::invalid_argument("R must be >= 1");
  const std::int64_t nx = sup_norm(x);
  if (static_cast<double>(nx) < R)
    throw std::invalid_argument("||x||=" + std::to_string(nx) + " must be >= R=" + std::to_string(R));
  const double e = -static_cast<double>(d) - alpha;
  // ||a|| <= ||x||/4 with integer ||a||
  const std::int64_t rad = nx / 4;
  // <.>^e only takes values at integer norms up to 2 ||x||
  std::vector<double> pw(static_cast<std::size_t>(2 * nx + 2));
  for (std::size_t r = 0; r < pw.size(); ++r) pw[r] = std::pow(std::max(2.0, static_cast<double>(r)), e);
  const auto cut = [&](std::int64_t r) { return std::min(1.0, std::max(2.0, static_cast<double>(r)) / R); };

  long double total = 0.0L;
  for_box(d, Site{}, rad, [&](const Site& a) {
    const std::int64_t na = sup_norm(a);
    const double fa = pw[static_cast<std::size_t>(na)] * cut(na);
    long double inner = 0.0L;
    for_box(d, x, rad, [&](const Site& b) {
      const std::int64_t nbx = sup_norm(x - b);
      inner += pw[static_cast<std::size_t>(sup_norm(a - b))] * pw[static_cast<std::size_t>(nbx)] * cut(nbx);
    });
    total += fa * inner;
  });
  return static_cast<double>(total);
}

double threshold_convolution_ratio(int d, double alpha, double R, const Site& x) {
  const double s = threshold_convolution_sum(d, alpha, R, x);
  return s * std::pow(R, 2.0 * alpha) * std::pow(smoothed_norm(x), d + alpha);
}

double box_exit_fraction(int d, int k, const Site& u, const Site& v) {
  check_dim(d);
  if (k < 3) throw std::invalid_argument("k must be >= 3");
  if (k > 30) throw std::invalid_argument("k too large to enumerate");
  if (sup_norm(u) > pow2(k - 1)) throw std::invalid_argument("u must lie in L_{k-1}");
  const std::int64_t half = pow2(k - 2);
  std::uint64_t hits = 0, total = 0;
  for_box(d, Site{}, pow2(k - 3), [&](const Site& z) {
    ++total;
    if (sup_norm(u - z) <= half && sup_norm(v - z) > half) ++hits;
  });
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<ConvolutionCheckResult> threshold_convolution_grid(int d, double alpha, std::span<const double> radii,
                                                               std::span<const double> multipliers) {
  std::vector<ConvolutionCheckResult> out;
  for (double R : radii)
    for (double f : multipliers) {
      ConvolutionCheckResult r;
      r.kind = "convolution";
      r.d = d;
      r.alpha = alpha;
      r.R = R;
      r.x[0] = static_cast<std::int64_t>(std::llround(f * R));
      r.value = threshold_convolution_sum(d, alpha, R, r.x);
      r.ratio = r.value * std::pow(R, 2.0 * alpha) * std::pow(smoothed_norm(r.x), d + alpha);
      out.push_back(r);
    }
  return out;
}

ConvolutionCheckResult box_exit_constant(int d, int k) {
  check_dim(d);
  ConvolutionCheckResult best;
  best.kind = "box_exit";
  best.d = d;
  best.k = k;
  const double scale = static_cast<double>(pow2(k));
  for_box(d, Site{}, pow2(k - 2), [&](const Site& u) {
    for_box(d, Site{}, pow2(k + 1), [&](const Site& v) {
      if (u == v) return;
      const double f = box_exit_fraction(d, k, u, v);
      const double c = f * scale / smoothed_norm(u - v);
      if (c > best.ratio) {
        best.ratio = c;
        best.value = f;
        best.u = u;
        best.v = v;
      }
    });
  });
  return best;
}

}  // namespace lrp
