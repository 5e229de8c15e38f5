#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lrperc/critical.hpp"
#include "lrperc/fit.hpp"

namespace lrp {

struct ReportItem {
  std::string name;
  std::string description;
  std::optional<double> expected;  // none where no prediction applies
  bool sufficient = false;
  std::string reason;  // why the fit is missing, when !sufficient
  FitResult fit;
  std::optional<std::pair<double, double>> endpoint_range;  // refits at the CI ends of beta_c
};

struct ExponentReport {
  int d = 1;
  double alpha = 0.0;
  std::optional<double> beta_c;
  std::vector<ReportItem> items;

  const ReportItem& item(const std::string& name) const;
};

/// Measurements at beta_c_hat and optionally at the ends of its CI.
struct CriticalData {
  std::optional<CriticalEstimate> estimate;
  std::optional<SweepRecord> at_critical;
  std::optional<SweepRecord> at_lo;
  std::optional<SweepRecord> at_hi;
};

struct ReportOptions {
  std::int64_t eta_r_min = 0;  // 0: 8
  std::int64_t eta_r_max = 0;  // 0: m / 4
  double xi_min = 4.0;
  double xi_max_over_n = 1.0 / 8.0;
  double far_xi_max_over_n = 1.0 / 32.0;
  double far_r_min_over_xi = 4.0;
  double far_r_max_over_n = 1.0 / 8.0;
  double tail_min = 16.0;
  double tail_max = 2048.0;
  FitOptions fit;
};

/// True when alpha < min(1, d/3), where the mean-field exponents apply.
bool mean_field_regime(int d, double alpha);

/// Fits the exponent relations; items lacking data are flagged, never dropped.
ExponentReport exponent_report(int d, double alpha, const std::vector<SweepRecord>& sweep, const CriticalData& critical,
                               const ReportOptions& options = {});

struct CollapseResult {
  double score = 0.0;  // max |log g - log master(u)|
  double near_level = 0.0;  // log g on u <= 1/2
  double far_intercept = 0.0;
  double far_slope = 0.0;
  double far_slope_stderr = 0.0;
  std::size_t near_points = 0;
  std::size_t far_points = 0;
  std::size_t points = 0;
};

struct CollapseOptions {
  double max_relative_error = 0.25;
  double r_max_over_m = 0.25;
  std::int64_t r_min = 1;
};

/// Rescales (r, tau) to (u, g) = (r / xi, tau r^{d-alpha}) and fits the two-branch master
/// curve min(c, a + s log u). Throws std::invalid_argument("insufficient data") with fewer
/// than 3 betas of finite xi.
CollapseResult collapse_check(const std::map<double, ShellProfile>& profiles, const std::map<double, std::int64_t>& xi,
                              double alpha, const CollapseOptions& options = {});

}  // namespace lrp
