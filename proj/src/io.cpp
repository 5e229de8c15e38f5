#include "lrperc/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lrp {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_two_point_csv(std::ostream& out, const TwoPointTable& t) {
  static const char* names[] = {"dx1", "dx2", "dx3"};
  for (int i = 0; i < t.d; ++i) out << names[i] << ',';
  out << "tau,stderr,pairs\n";
  const auto idx = t.index();
  for (std::size_t s = 0; s < t.tau.size(); ++s) {
    const auto x = idx.displacement(s);
    for (int i = 0; i < t.d; ++i) out << x[i] << ',';
    out << format_double(t.tau[s]) << ',' << format_double(t.stderr_[s]) << ',' << t.pairs[s] << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "beta,n,replicas,chi,xi,nabla,kind,index,value,stderr\n";
  for (const auto& r : records) {
    std::ostringstream head;
    head << format_double(r.beta) << ',' << r.n << ',' << r.replicas << ',' << format_double(r.chi.value) << ',';
    if (r.xi.lower_bound) head << ">=" << r.xi.radius;
    else head << r.xi.radius;
    head << ',' << format_double(r.nabla) << ',';
    const auto h = head.str();
    const auto row = [&](const char* kind, std::uint64_t index, double value, double se) {
      out << h << kind << ',' << index << ',' << format_double(value) << ',' << format_double(se) << '\n';
    };
    row("inner_radius", static_cast<std::uint64_t>(r.m), static_cast<double>(r.m), 0.0);
    row("chi", 0, r.chi.value, r.chi.stderr_);
    row("largest", 0, static_cast<double>(r.largest_cluster), 0.0);
    for (std::size_t i = 0; i < r.s_radii.size(); ++i)
      row("S", static_cast<std::uint64_t>(r.s_radii[i]), r.s_profile[i].value, r.s_profile[i].stderr_);
    for (std::size_t i = 0; i < r.tail.thresholds.size(); ++i)
      row("tail", r.tail.thresholds[i], r.tail.probability[i], r.tail.stderr_[i]);
    for (std::size_t i = 0; i < r.shells.r.size(); ++i)
      row("tau_shell", static_cast<std::uint64_t>(r.shells.r[i]), r.shells.mean[i], r.shells.stderr_[i]);
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> f;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      f.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  f.push_back(cur);
  return f;
}

double to_double(const std::string& s) {
  if (s == "nan") return NAN;
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

std::int64_t to_int(const std::string& s) {
  std::size_t pos = 0;
  const long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

}  // namespace

std::vector<SweepRecord> read_sweep_csv(std::istream& in, int d) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || split(line) != std::vector<std::string>{"beta", "n", "replicas", "chi", "xi", "nabla",
                                                                          "kind", "index", "value", "stderr"})
    throw std::runtime_error("sweep.csv line 1: unexpected header");
  std::vector<SweepRecord> out;
  std::map<double, std::size_t> at;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    try {
      if (f.size() != 10) throw std::invalid_argument("expected 10 fields");
      const double beta = to_double(f[0]);
      auto [it, fresh] = at.try_emplace(beta, out.size());
      if (fresh) {
        SweepRecord r;
        r.beta = beta;
        r.n = to_int(f[1]);
        r.replicas = static_cast<std::uint64_t>(to_int(f[2]));
        r.chi.value = to_double(f[3]);
        if (f[4].rfind(">=", 0) == 0) r.xi = {to_int(f[4].substr(2)), true};
        else r.xi = {to_int(f[4]), false};
        r.nabla = to_double(f[5]);
        r.shells.d = d;
        out.push_back(std::move(r));
      }
      auto& r = out[it->second];
      const auto& kind = f[6];
      const auto index = to_int(f[7]);
      const double value = to_double(f[8]), se = to_double(f[9]);
      if (kind == "inner_radius") {
        r.m = index;
        r.shells.m = index;
      } else if (kind == "chi") {
        r.chi.stderr_ = se;
      } else if (kind == "largest") {
        r.largest_cluster = static_cast<std::uint64_t>(value);
      } else if (kind == "S") {
        r.s_radii.push_back(index);
        r.s_profile.push_back({value, se});
      } else if (kind == "tail") {
        r.tail.thresholds.push_back(static_cast<std::uint64_t>(index));
        r.tail.probability.push_back(value);
        r.tail.stderr_.push_back(se);
      } else if (kind == "tau_shell") {
        r.shells.r.push_back(index);
        r.shells.mean.push_back(value);
        r.shells.stderr_.push_back(se);
      } else {
        throw std::invalid_argument("unknown kind '" + kind + "'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("sweep.csv line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json probe_to_json(const Probe& p) {
  return {{"beta", p.beta},
          {"replicas", p.replicas},
          {"slope", number(p.stat.slope)},
          {"stderr", number(p.stat.stderr_)},
          {"ci", {number(p.stat.ci_lo), number(p.stat.ci_hi)}},
          {"degenerate", p.stat.degenerate},
          {"verdict", p.verdict < 0 ? "subcritical" : p.verdict > 0 ? "supercritical" : "undecided"},
          {"bisection", p.bisection}};
}

nlohmann::json critical_to_json(const CriticalEstimate& est) {
  nlohmann::json probes = nlohmann::json::array();
  for (const auto& p : est.probes) probes.push_back(probe_to_json(p));
  return {{"beta_c_hat", est.beta_c_hat},
          {"ci", {est.lo, est.hi}},
          {"d", est.spec.d},
          {"alpha", est.spec.alpha},
          {"kernel", est.spec},
          {"n", est.n},
          {"m", est.m},
          {"window", {est.r_min, est.r_max}},
          {"replicas", est.replicas},
          {"seed", est.seed},
          {"tolerance", est.tolerance},
          {"target_slope", est.target_slope},
          {"widened", est.widened},
          {"stop_reason", est.stop_reason},
          {"certified", est.certified()},
          {"certificate", {{"lo", probe_to_json(est.lo_probe)}, {"hi", probe_to_json(est.hi_probe)}}},
          {"probes", probes}};
}

CriticalEstimate critical_from_json(const nlohmann::json& j) {
  CriticalEstimate est;
  est.spec = j.at("kernel").get<KernelSpec>();
  est.beta_c_hat = j.at("beta_c_hat").get<double>();
  est.lo = j.at("ci").at(0).get<double>();
  est.hi = j.at("ci").at(1).get<double>();
  est.n = j.at("n").get<std::int64_t>();
  est.m = j.at("m").get<std::int64_t>();
  est.r_min = j.at("window").at(0).get<std::int64_t>();
  est.r_max = j.at("window").at(1).get<std::int64_t>();
  est.replicas = j.at("replicas").get<std::uint32_t>();
  est.seed = j.at("seed").get<std::uint64_t>();
  est.tolerance = j.value("tolerance", 0.0);
  est.target_slope = -(est.spec.d - est.spec.alpha);
  return est;
}

nlohmann::json report_to_json(const ExponentReport& rep, const CollapseResult* collapse, const std::string& collapse_error) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : rep.items) {
    nlohmann::json j = {{"name", it.name},
                        {"description", it.description},
                        {"expected", it.expected ? nlohmann::json(*it.expected) : nlohmann::json(nullptr)},
                        {"sufficient", it.sufficient}};
    if (it.sufficient) {
      const auto& f = it.fit;
      j["exponent"] = f.exponent;
      j["intercept"] = f.intercept;
      j["stderr"] = f.stderr_;
      j["ci"] = {f.ci_lo, f.ci_hi};
      j["window"] = {f.x_min, f.x_max};
      j["points"] = f.points;
      j["max_abs_log_residual"] = f.max_abs_log_residual;
      if (it.endpoint_range) j["endpoint_range"] = {it.endpoint_range->first, it.endpoint_range->second};
    } else {
      j["reason"] = it.reason;
    }
    items.push_back(std::move(j));
  }
  nlohmann::json out = {{"schema", 1},
                        {"d", rep.d},
                        {"alpha", rep.alpha},
                        {"beta_c", rep.beta_c ? nlohmann::json(*rep.beta_c) : nlohmann::json(nullptr)},
                        {"items", items}};
  if (collapse) {
    out["collapse"] = {{"score", collapse->score},
                       {"near_level", collapse->near_level},
                       {"far_intercept", collapse->far_intercept},
                       {"far_slope", collapse->far_slope},
                       {"far_slope_stderr", collapse->far_slope_stderr},
                       {"near_points", collapse->near_points},
                       {"far_points", collapse->far_points},
                       {"points", collapse->points}};
  } else {
    out["collapse"] = {{"error", collapse_error}};
  }
  return out;
}

void write_report_csv(std::ostream& out, const ExponentReport& rep) {
  out << "name,expected,exponent,stderr,ci_lo,ci_hi,x_min,x_max,points,status\n";
  for (const auto& it : rep.items) {
    out << it.name << ',' << (it.expected ? format_double(*it.expected) : "") << ',';
    if (it.sufficient) {
      const auto& f = it.fit;
      out << format_double(f.exponent) << ',' << format_double(f.stderr_) << ',' << format_double(f.ci_lo) << ','
          << format_double(f.ci_hi) << ',' << format_double(f.x_min) << ',' << format_double(f.x_max) << ',' << f.points
          << ",ok\n";
    } else {
      out << ",,,,,,0,insufficient data\n";
    }
  }
}

void write_analytic_csv(std::ostream& out, const std::vector<ConvolutionCheckResult>& rows) {
  out << "kind,d,alpha,R,k,x,u,v,value,ratio\n";
  const auto site = [](const Site& s, int d) {
    std::string r;
    for (int i = 0; i < d; ++i) r += (i ? ";" : "") + std::to_string(s[i]);
    return r;
  };
  for (const auto& r : rows) {
    const bool conv = r.kind == "convolution";
    out << r.kind << ',' << r.d << ',' << (conv ? format_double(r.alpha) : "") << ','
        << (conv ? format_double(r.R) : "") << ',' << (conv ? "" : std::to_string(r.k)) << ','
        << (conv ? site(r.x, r.d) : "") << ',' << (conv ? "" : site(r.u, r.d)) << ',' << (conv ? "" : site(r.v, r.d))
        << ',' << format_double(r.value) << ',' << format_double(r.ratio) << '\n';
  }
}

}  // namespace lrp
