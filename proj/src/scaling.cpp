#include "lrperc/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace lrp {

const ReportItem& ExponentReport::item(const std::string& name) const {
  for (const auto& it : items)
    if (it.name == name) return it;
  throw std::out_of_range("no report item '" + name + "'");
}

bool mean_field_regime(int d, double alpha) { return alpha < std::min(1.0, d / 3.0); }

namespace {

std::vector<DataPoint> profile_points(const ShellProfile& p) {
  std::vector<DataPoint> pts;
  for (std::size_t i = 0; i < p.r.size(); ++i)
    pts.push_back({static_cast<double>(p.r[i]), p.mean[i], p.stderr_[i]});
  return pts;
}

std::vector<DataPoint> tail_points(const ClusterTail& t, double lo, double hi) {
  std::vector<DataPoint> pts;
  for (std::size_t i = 0; i < t.thresholds.size(); ++i) {
    const auto x = static_cast<double>(t.thresholds[i]);
    if (x >= lo && x <= hi) pts.push_back({x, t.probability[i], t.stderr_[i]});
  }
  return pts;
}

ReportItem attempt(std::string name, std::string description, std::optional<double> expected,
                   const std::function<FitResult()>& fit) {
  ReportItem it;
  it.name = std::move(name);
  it.description = std::move(description);
  it.expected = expected;
  try {
    it.fit = fit();
    it.sufficient = true;
  } catch (const std::invalid_argument& e) {
    it.sufficient = false;
    it.reason = std::string("insufficient data: ") + e.what();
  }
  return it;
}

[[noreturn]] void insufficient(const std::string& why) { throw std::invalid_argument(why); }

}  // namespace

ExponentReport exponent_report(int d, double alpha, const std::vector<SweepRecord>& sweep, const CriticalData& critical,
                               const ReportOptions& o) {
  ExponentReport rep;
  rep.d = d;
  rep.alpha = alpha;
  const auto& est = critical.estimate;
  if (est) rep.beta_c = est->beta_c_hat;
  const bool mf = mean_field_regime(d, alpha);

  // subcritical sweep points with a usable correlation length
  const auto usable = [&](const SweepRecord& r) {
    if (r.xi.lower_bound) return false;
    const double xi = static_cast<double>(r.xi.radius);
    if (xi < o.xi_min || xi > o.xi_max_over_n * static_cast<double>(r.n)) return false;
    return !est || r.beta < est->beta_c_hat;
  };
  const auto xi_points = [&](auto&& value) {
    std::vector<DataPoint> pts;
    for (const auto& r : sweep)
      if (usable(r)) pts.push_back(value(r));
    return pts;
  };
  const auto eta_fit = [&](const SweepRecord& r) {
    const std::int64_t rmin = o.eta_r_min > 0 ? o.eta_r_min : 8;
    const std::int64_t rmax = o.eta_r_max > 0 ? o.eta_r_max : r.m / 4;
    return fit_power_law(profile_points(r.shells), static_cast<double>(rmin), static_cast<double>(rmax), o.fit);
  };
  const auto endpoints = [](ReportItem& it, const std::function<double(const SweepRecord&)>& refit,
                            const std::optional<SweepRecord>& a, const std::optional<SweepRecord>& b) {
    if (!it.sufficient || !a || !b) return;
    try {
      const double x = refit(*a), y = refit(*b);
      it.endpoint_range = std::make_pair(std::min(x, y), std::max(x, y));
    } catch (const std::invalid_argument&) {
    }
  };

  auto eta = attempt("eta_slope", "log-log slope of shell-averaged tau at beta_c", -(d - alpha), [&] {
    if (!critical.at_critical) insufficient("no measurement at beta_c");
    return eta_fit(*critical.at_critical);
  });
  endpoints(eta, [&](const SweepRecord& r) { return eta_fit(r).exponent; }, critical.at_lo, critical.at_hi);
  rep.items.push_back(std::move(eta));

  rep.items.push_back(attempt("chi_xi", "slope of log chi against log xi (subcritical)", alpha, [&] {
    const auto pts = xi_points([](const SweepRecord& r) {
      return DataPoint{static_cast<double>(r.xi.radius), r.chi.value, r.chi.stderr_};
    });
    return fit_power_law(pts, 0.0, INFINITY, o.fit);
  }));

  const auto gamma_fit = [&](double beta_c, double below) {
    std::vector<DataPoint> pts;
    for (const auto& r : sweep)
      if (usable(r) && r.beta < below) pts.push_back({beta_c - r.beta, r.chi.value, r.chi.stderr_});
    return fit_power_law(pts, 0.0, INFINITY, o.fit);
  };
  auto gamma = attempt("gamma", "slope of log chi against log(beta_c - beta)", mf ? std::optional<double>(-1.0) : std::nullopt,
                       [&] {
                         if (!est) insufficient("no critical estimate");
                         return gamma_fit(est->beta_c_hat, est->lo);
                       });
  if (gamma.sufficient) {
    try {
      const double a = gamma_fit(est->lo, est->lo).exponent, b = gamma_fit(est->hi, est->lo).exponent;
      gamma.endpoint_range = std::make_pair(std::min(a, b), std::max(a, b));
    } catch (const std::invalid_argument&) {
    }
  }
  rep.items.push_back(std::move(gamma));

  const auto tail_fit = [&](const SweepRecord& r) {
    return fit_power_law(tail_points(r.tail, o.tail_min, o.tail_max), 0.0, INFINITY, o.fit);
  };
  auto tail = attempt("tail", "slope of log P(|K| >= t) against log t at beta_c",
                      mf ? std::optional<double>(-0.5) : std::nullopt, [&] {
                        if (!critical.at_critical) insufficient("no measurement at beta_c");
                        return tail_fit(*critical.at_critical);
                      });
  endpoints(tail, [&](const SweepRecord& r) { return tail_fit(r).exponent; }, critical.at_lo, critical.at_hi);
  rep.items.push_back(std::move(tail));

  rep.items.push_back(attempt("far_field", "subcritical slope of tau for r >> xi", -(d + alpha), [&] {
    // largest xi whose window [4 xi, n/8] spans a factor 4, else any with 3 shells
    std::vector<const SweepRecord*> cands;
    for (const auto& r : sweep)
      if (!r.xi.lower_bound && static_cast<double>(r.xi.radius) <= o.far_xi_max_over_n * static_cast<double>(r.n))
        cands.push_back(&r);
    if (cands.empty()) insufficient("no sweep point with xi <= n/32");
    std::sort(cands.begin(), cands.end(), [](const SweepRecord* a, const SweepRecord* b) {
      return std::tie(a->xi.radius, a->beta) > std::tie(b->xi.radius, b->beta);
    });
    const auto window = [&](const SweepRecord& r) {
      return std::make_pair(o.far_r_min_over_xi * static_cast<double>(r.xi.radius),
                            o.far_r_max_over_n * static_cast<double>(r.n));
    };
    const auto shells_in = [&](const SweepRecord& r) {
      const auto [lo, hi] = window(r);
      return std::count_if(r.shells.r.begin(), r.shells.r.end(), [&](std::int64_t x) {
        return static_cast<double>(x) >= lo && static_cast<double>(x) <= hi;
      });
    };
    const SweepRecord* pick = nullptr;
    for (const auto* r : cands) {
      const auto [lo, hi] = window(*r);
      if (hi >= 4.0 * lo && shells_in(*r) >= 3) {
        pick = r;
        break;
      }
    }
    for (const auto* r : cands)
      if (!pick && shells_in(*r) >= 3) pick = r;
    if (!pick) insufficient("no sweep point leaves 3 shells in [4 xi, n/8]");
    const auto [lo, hi] = window(*pick);
    return fit_power_law(profile_points(pick->shells), lo, hi, o.fit);
  }));

  rep.items.push_back(attempt("triangle_xi", "slope of log triangle against log xi (subcritical)",
                              std::max(0.0, 3.0 * alpha - d), [&] {
                                const auto pts = xi_points([](const SweepRecord& r) {
                                  return DataPoint{static_cast<double>(r.xi.radius), r.nabla, 0.0};
                                });
                                return fit_power_law(pts, 0.0, INFINITY, o.fit);
                              }));
  return rep;
}

CollapseResult collapse_check(const std::map<double, ShellProfile>& profiles, const std::map<double, std::int64_t>& xi,
                              double alpha, const CollapseOptions& o) {
  struct Pt {
    double lu, lg;
  };
  std::vector<Pt> pts;
  std::size_t betas = 0;
  for (const auto& [beta, prof] : profiles) {
    const auto it = xi.find(beta);
    if (it == xi.end() || it->second < 1) continue;
    ++betas;
    const double x = static_cast<double>(it->second);
    const double rmax = o.r_max_over_m * static_cast<double>(prof.m);
    for (std::size_t i = 0; i < prof.r.size(); ++i) {
      const double r = static_cast<double>(prof.r[i]);
      const double t = prof.mean[i];
      if (prof.r[i] < o.r_min || r > rmax || !(t > 0.0)) continue;
      if (prof.stderr_[i] > 0.0 && prof.stderr_[i] / t > o.max_relative_error) continue;
      pts.push_back({std::log(r / x), std::log(t) + (prof.d - alpha) * std::log(r)});
    }
  }
  if (betas < 3) throw std::invalid_argument("insufficient data: collapse needs at least 3 betas with finite xi");
  std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) { return std::tie(a.lu, a.lg) < std::tie(b.lu, b.lg); });

  CollapseResult res;
  const double near_cut = std::log(0.5), far_cut = std::log(2.0);
  long double near_sum = 0;
  std::vector<double> fx, fy, fw;
  for (const auto& p : pts) {
    if (p.lu <= near_cut) {
      near_sum += p.lg;
      ++res.near_points;
    } else if (p.lu >= far_cut) {
      fx.push_back(p.lu);
      fy.push_back(p.lg);
      fw.push_back(1.0);
    }
  }
  res.far_points = fx.size();
  if (res.near_points == 0) throw std::invalid_argument("insufficient data: no points with r <= xi/2");
  const auto line = detail::weighted_line(fx, fy, fw);
  if (!line.ok) throw std::invalid_argument("insufficient data: fewer than 2 distinct points with r >= 2 xi");
  res.near_level = static_cast<double>(near_sum / static_cast<long double>(res.near_points));
  res.far_intercept = line.intercept;
  res.far_slope = line.slope;
  res.far_slope_stderr = line.slope_stderr;
  res.points = pts.size();
  for (const auto& p : pts) {
    const double master = std::min(res.near_level, res.far_intercept + res.far_slope * p.lu);
    res.score = std::max(res.score, std::abs(p.lg - master));
  }
  return res;
}

}  // namespace lrp
