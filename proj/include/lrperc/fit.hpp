#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lrp {

struct DataPoint {
  double x = 0.0;
  double y = 0.0;
  double y_stderr = 0.0;  // 0 = unknown; all-unknown falls back to unweighted fitting
};

struct FitResult {
  double exponent = 0.0;
  double intercept = 0.0;  // log y at x = 1
  double stderr_ = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t points = 0;
  double max_abs_log_residual = 0.0;
};

struct FitOptions {
  std::uint32_t bootstrap_resamples = 400;
  std::uint64_t seed = 0x5eed;
  double ci_level = 0.95;
};

/// Weighted least squares of log y on log x for points with x in [x_min, x_max].
/// Weights are y^2 / y_stderr^2 (delta method). The CI is a percentile bootstrap over
/// resampled points, widened to at least the Student-t interval. Input order does not matter. Throws std::invalid_argument on fewer
/// than 3 points in the window or nonpositive data.
FitResult fit_power_law(std::span<const DataPoint> points, double x_min, double x_max,
                        const FitOptions& options = {});

namespace detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  bool ok = false;
};

/// Weighted line fit y = a + b x; slope_stderr from the weighted normal equations,
/// scaled by the reduced chi-square when weights are relative.
/// Two-sided Student-t quantile for the given confidence level.
double t_quantile(std::size_t dof, double level);

LineFit weighted_line(std::span<const double> x, std::span<const double> y, std::span<const double> w);

}  // namespace detail

}  // namespace lrp
