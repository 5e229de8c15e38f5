#include "lrperc/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "lrperc/rng.hpp"

namespace lrp {

namespace detail {

double t_quantile(std::size_t dof, double level) {
  const boost::math::students_t dist(static_cast<double>(std::max<std::size_t>(dof, 1)));
  return boost::math::quantile(dist, 0.5 + level / 2.0);
}

LineFit weighted_line(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  LineFit f;
  long double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  if (sw <= 0) return f;
  const long double mx = sx / sw, my = sy / sw;
  long double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) return f;
  f.slope = static_cast<double>(sxy / sxx);
  f.intercept = static_cast<double>(my - sxy / sxx * mx);
  long double chi2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double r = y[i] - f.intercept - f.slope * x[i];
    chi2 += w[i] * r * r;
  }
  const std::size_t dof = x.size() > 2 ? x.size() - 2 : 1;
  f.slope_stderr = static_cast<double>(std::sqrt(chi2 / dof / sxx));
  f.ok = true;
  return f;
}

}  // namespace detail

FitResult fit_power_law(std::span<const DataPoint> points, double x_min, double x_max, const FitOptions& options) {
  std::vector<DataPoint> pts;
  for (const auto& p : points) {
    if (p.x < x_min || p.x > x_max) continue;
    if (!(p.x > 0.0) || !(p.y > 0.0))
      throw std::invalid_argument("power-law fit needs positive data (x=" + std::to_string(p.x) +
                                  ", y=" + std::to_string(p.y) + ")");
    pts.push_back(p);
  }
  if (pts.size() < 3) throw std::invalid_argument("power-law fit needs at least 3 points in the window");
  std::sort(pts.begin(), pts.end(), [](const DataPoint& a, const DataPoint& b) {
    return std::tie(a.x, a.y, a.y_stderr) < std::tie(b.x, b.y, b.y_stderr);
  });

  const bool weighted = std::all_of(pts.begin(), pts.end(), [](const DataPoint& p) { return p.y_stderr > 0.0; });
  std::vector<double> lx, ly, w;
  for (const auto& p : pts) {
    lx.push_back(std::log(p.x));
    ly.push_back(std::log(p.y));
    w.push_back(weighted ? (p.y * p.y) / (p.y_stderr * p.y_stderr) : 1.0);
  }
  const auto line = detail::weighted_line(lx, ly, w);
  if (!line.ok) throw std::invalid_argument("power-law fit needs at least two distinct x values");

  FitResult out;
  out.exponent = line.slope;
  out.intercept = line.intercept;
  out.stderr_ = line.slope_stderr;
  out.x_min = pts.front().x;
  out.x_max = pts.back().x;
  out.points = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i)
    out.max_abs_log_residual = std::max(out.max_abs_log_residual, std::abs(ly[i] - line.intercept - line.slope * lx[i]));

  std::vector<double> slopes;
  if (options.bootstrap_resamples > 0) {
    KeyedStream rng(options.seed, 0, 0, StreamTag::kBootstrap);
    std::vector<double> bx(pts.size()), by(pts.size()), bw(pts.size());
    for (std::uint32_t b = 0; b < options.bootstrap_resamples; ++b) {
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto k = rng.below(pts.size());
        bx[i] = lx[k];
        by[i] = ly[k];
        bw[i] = w[k];
      }
      const auto f = detail::weighted_line(bx, by, bw);
      if (f.ok) slopes.push_back(f.slope);
    }
  }
  if (slopes.size() >= 10) {
    std::sort(slopes.begin(), slopes.end());
    const double tail = (1.0 - options.ci_level) / 2.0;
    const auto at = [&](double q) {
      const double pos = q * static_cast<double>(slopes.size() - 1);
      const auto i = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(i);
      return i + 1 < slopes.size() ? slopes[i] * (1 - frac) + slopes[i + 1] * frac : slopes[i];
    };
    out.ci_lo = at(tail);
    out.ci_hi = at(1.0 - tail);
  } else {
    out.ci_lo = out.ci_hi = out.exponent;
  }
  // percentile intervals run narrow for small point counts; never report less than the t interval
  const double half = detail::t_quantile(pts.size() - 2, options.ci_level) * out.stderr_;
  out.ci_lo = std::min({out.ci_lo, out.exponent - half, out.exponent});
  out.ci_hi = std::max({out.ci_hi, out.exponent + half, out.exponent});
  return out;
}

}  // namespace lrp
