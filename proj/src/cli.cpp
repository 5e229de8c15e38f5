#include "lrperc/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "lrperc/analytic.hpp"
#include "lrperc/clusters.hpp"
#include "lrperc/critical.hpp"
#include "lrperc/io.hpp"
#include "lrperc/parallel.hpp"
#include "lrperc/scaling.hpp"

namespace lrp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(const std::string& param, const std::string& what) : std::runtime_error(param + ": " + what) {}
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": empty key");
    if (value.empty())
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": empty value for '" + key + "'");
    out.emplace_back(key + "@" + std::to_string(lineno), value);
  }
  return out;
}

json emit_outputs(const std::vector<Artifact>& artifacts, json manifest, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto write = [&](const std::string& name, const std::string& bytes) {
    const auto target = dir / name;
    const auto tmp = dir / ("." + name + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      if (!f) throw IoError("cannot write " + tmp.string());
      f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      f.flush();
      if (!f) throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + target.string() + ": " + ec.message());
  };
  json outputs = json::object();
  for (const auto& a : artifacts) {
    write(a.name, a.bytes);
    outputs[a.name] = {{"fnv1a64", hex64(fnv1a64(a.bytes))}, {"bytes", a.bytes.size()}};
  }
  manifest["outputs"] = outputs;
  write("manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

namespace {

struct Params {
  int d = 1;
  double alpha = 0.5;
  double amplitude = 1.0;
  std::string truncate = "none";
  std::optional<double> beta;
  std::string beta_grid;
  std::int64_t n = 1024;
  double inner_fraction = 0.5;
  std::uint32_t replicas = 16;
  std::uint64_t seed = 0;
  std::string window;
  double tol = 0.02;
  std::string out = ".";
  std::string in;
  unsigned threads = 0;
  std::string config;
  std::string bracket;
  int expand = 8;
};

KernelSpec kernel_of(const Params& p) {
  KernelSpec k;
  k.d = p.d;
  k.alpha = p.alpha;
  k.amplitude = p.amplitude;
  if (p.truncate != "none") {
    try {
      std::size_t pos = 0;
      k.truncation = std::stoll(p.truncate, &pos);
      if (pos != p.truncate.size()) throw std::invalid_argument(p.truncate);
    } catch (const std::exception&) {
      throw PreconditionError("--truncate", "expected 'none' or an integer, got '" + p.truncate + "'");
    }
  }
  try {
    k.validate();
  } catch (const std::invalid_argument& e) {
    throw PreconditionError("kernel", e.what());
  }
  return k;
}

std::int64_t inner_radius(const Params& p) {
  if (!(p.inner_fraction > 0.0 && p.inner_fraction <= 1.0))
    throw PreconditionError("--inner-fraction", "must be in (0, 1]");
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(p.inner_fraction * static_cast<double>(p.n))));
}

BoxLattice box_of(const Params& p) {
  if (p.n < 1) throw PreconditionError("--n", "box radius must be >= 1");
  try {
    return BoxLattice(p.d, p.n);
  } catch (const std::exception& e) {
    throw PreconditionError("--n", e.what());
  }
}

double need_beta(const Params& p) {
  if (!p.beta) throw PreconditionError("--beta", "required by this command");
  if (!(*p.beta >= 0.0)) throw PreconditionError("--beta", "must be >= 0");
  return *p.beta;
}

std::vector<double> parse_grid(const std::string& s) {
  double lo = 0, hi = 0;
  long long steps = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
    throw PreconditionError("--beta-grid", "expected lo:hi:steps, got '" + s + "'");
  if (steps < 1) throw PreconditionError("--beta-grid", "steps must be >= 1");
  if (lo < 0) throw PreconditionError("--beta-grid", "lo must be >= 0");
  if (steps > 1 && !(hi > lo)) throw PreconditionError("--beta-grid", "hi must exceed lo");
  std::vector<double> g;
  for (long long i = 0; i < steps; ++i)
    g.push_back(steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
  return g;
}

std::pair<std::int64_t, std::int64_t> parse_window(const std::string& s) {
  long long a = 0, b = 0;
  char c = 0;
  std::istringstream in(s);
  if (!(in >> a >> c >> b) || c != ':' || !(in >> std::ws).eof())
    throw PreconditionError("--window", "expected rmin:rmax, got '" + s + "'");
  return {a, b};
}

json params_json(const Params& p, const std::string& command) {
  json j = {{"command", command},
            {"d", p.d},
            {"alpha", p.alpha},
            {"A", p.amplitude},
            {"truncate", p.truncate},
            {"n", p.n},
            {"inner_fraction", p.inner_fraction},
            {"replicas", p.replicas},
            {"seed", p.seed},
            {"tol", p.tol},
            {"threads", p.threads}};
  j["beta"] = p.beta ? json(*p.beta) : json(nullptr);
  if (!p.beta_grid.empty()) j["beta_grid"] = p.beta_grid;
  if (!p.window.empty()) j["window"] = p.window;
  if (!p.in.empty()) j["in"] = p.in;
  if (!p.bracket.empty()) j["bracket"] = p.bracket;
  if (command == "find-critical") j["expand"] = p.expand;
  return j;
}

template <class F>
std::string render(F&& f) {
  std::ostringstream s;
  f(s);
  return s.str();
}

struct Result {
  std::vector<Artifact> artifacts;
  std::string summary;
  KernelSpec spec;
};

Measurement run_measure(const Params& p, const KernelSpec& k, const BoxLattice& box, double beta,
                        std::uint32_t first_replica = 0) {
  const Sampler sampler(k, box);
  MeasureOptions mo;
  mo.inner_radius = inner_radius(p);
  mo.replicas = p.replicas;
  mo.seed = p.seed;
  mo.first_replica = first_replica;
  mo.threads = p.threads;
  if (mo.inner_radius > box.radius()) throw PreconditionError("--inner-fraction", "window exceeds the box");
  return measure(sampler, beta, mo);
}

void need_replicas(const Params& p) {
  if (p.replicas < 1) throw PreconditionError("--replicas", "must be >= 1");
}

Result cmd_sample(const Params& p) {
  const auto k = kernel_of(p);
  const auto box = box_of(p);
  const double beta = need_beta(p);
  need_replicas(p);
  const Sampler sampler(k, box);
  std::ostringstream summary_csv, edges_csv;
  summary_csv << "replica,open_edges,components,largest,origin_size\n";
  static const char* xs[] = {"x1", "x2", "x3"};
  static const char* ys[] = {"y1", "y2", "y3"};
  edges_csv << "replica";
  for (int i = 0; i < p.d; ++i) edges_csv << ',' << xs[i];
  for (int i = 0; i < p.d; ++i) edges_csv << ',' << ys[i];
  edges_csv << '\n';
  std::uint64_t total = 0;
  for (std::uint32_t r = 0; r < p.replicas; ++r) {
    auto cfg = sampler.sample(beta, p.seed, r);
    auto forest = build_clusters(cfg);
    const auto st = cluster_statistics(forest, box);
    summary_csv << r << ',' << cfg.open_edges.size() << ',' << forest.component_count() << ',' << st.largest << ','
                << st.origin_size << '\n';
    total += cfg.open_edges.size();
    for (const auto& [u, v] : cfg.open_edges) {
      const auto a = box.site_of(u), b = box.site_of(v);
      edges_csv << r;
      for (int i = 0; i < p.d; ++i) edges_csv << ',' << a[i];
      for (int i = 0; i < p.d; ++i) edges_csv << ',' << b[i];
      edges_csv << '\n';
    }
  }
  Result res{{{"samples.csv", summary_csv.str()}, {"edges.csv", edges_csv.str()}}, {}, k};
  res.summary = "sample: " + std::to_string(p.replicas) + " configurations, mean open edges " +
                format_double(static_cast<double>(total) / p.replicas);
  return res;
}

json tail_json(const ClusterTail& t) {
  json a = json::array();
  for (std::size_t i = 0; i < t.thresholds.size(); ++i)
    a.push_back({{"threshold", t.thresholds[i]}, {"probability", t.probability[i]}, {"stderr", t.stderr_[i]}});
  return a;
}

Result cmd_two_point(const Params& p) {
  const auto k = kernel_of(p);
  const auto box = box_of(p);
  const double beta = need_beta(p);
  need_replicas(p);
  const auto meas = run_measure(p, k, box, beta);
  const auto rec = make_sweep_record(meas, p.seed);
  json obs = {{"beta", beta},
              {"n", p.n},
              {"m", meas.table.m},
              {"replicas", p.replicas},
              {"seed", p.seed},
              {"chi", {{"value", rec.chi.value}, {"stderr", rec.chi.stderr_}}},
              {"xi", {{"radius", rec.xi.radius}, {"lower_bound", rec.xi.lower_bound}}},
              {"nabla", rec.nabla},
              {"window_mass", {{"value", meas.window_mass.value}, {"stderr", meas.window_mass.stderr_}}},
              {"largest_cluster", meas.largest_cluster},
              {"mean_open_edges", meas.mean_open_edges},
              {"tail", tail_json(meas.tail)}};
  Result res{{{"two_point.csv", render([&](std::ostream& o) { write_two_point_csv(o, meas.table); })},
              {"observables.json", obs.dump(2) + "\n"}},
             {},
             k};
  res.summary = "two-point: chi " + format_double(rec.chi.value) + ", xi " + (rec.xi.lower_bound ? ">=" : "") +
                std::to_string(rec.xi.radius) + ", triangle " + format_double(rec.nabla);
  return res;
}

Result cmd_sweep(const Params& p) {
  const auto k = kernel_of(p);
  const auto box = box_of(p);
  need_replicas(p);
  if (p.beta_grid.empty()) throw PreconditionError("--beta-grid", "required by sweep");
  const auto grid = parse_grid(p.beta_grid);
  SweepOptions so;
  so.inner_radius = inner_radius(p);
  so.replicas = p.replicas;
  so.seed = p.seed;
  so.threads = p.threads;
  const auto recs = beta_sweep(k, box, grid, so);
  Result res{{{"sweep.csv", render([&](std::ostream& o) { write_sweep_csv(o, recs); })}}, {}, k};
  res.summary = "sweep: " + std::to_string(recs.size()) + " beta values, chi " + format_double(recs.front().chi.value) +
                " .. " + format_double(recs.back().chi.value);
  return res;
}

Result cmd_find_critical(const Params& p, json& manifest_extra) {
  const auto k = kernel_of(p);
  const auto box = box_of(p);
  if (p.replicas < 2) throw PreconditionError("--replicas", "probes need >= 2 replicas");
  if (!(p.tol > 0.0)) throw PreconditionError("--tol", "must be > 0");
  CriticalOptions co;
  co.inner_radius = inner_radius(p);
  co.probe_replicas = p.replicas;
  co.tolerance = p.tol;
  co.seed = p.seed;
  co.threads = p.threads;
  if (!p.window.empty()) std::tie(co.r_min, co.r_max) = parse_window(p.window);
  if (!p.bracket.empty()) {
    double lo = 0, hi = 0;
    char c = 0;
    std::istringstream in(p.bracket);
    if (!(in >> lo >> c >> hi) || c != ':' || !(in >> std::ws).eof() || !(lo > 0.0) || !(hi > lo))
      throw PreconditionError("--bracket", "expected lo:hi with 0 < lo < hi, got '" + p.bracket + "'");
    co.beta_lo = lo;
    co.beta_hi = hi;
  }
  if (p.expand < 0) throw PreconditionError("--expand", "must be >= 0");
  co.max_expansions = p.expand;
  try {
    const auto est = find_beta_c(k, box, co);
    // measurements at the estimate and the CI ends, for the report
    SweepOptions so;
    so.inner_radius = co.inner_radius;
    so.replicas = p.replicas;
    so.seed = p.seed;
    so.threads = p.threads;
    std::vector<double> grid{est.lo, est.beta_c_hat, est.hi};
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const auto recs = beta_sweep(k, box, grid, so);
    Result res{{{"critical.json", critical_to_json(est).dump(2) + "\n"},
                {"critical_sweep.csv", render([&](std::ostream& o) { write_sweep_csv(o, recs); })}},
               {},
               k};
    res.summary = "find-critical: beta_c " + format_double(est.beta_c_hat) + " in [" + format_double(est.lo) + ", " +
                  format_double(est.hi) + "], " + std::to_string(est.probes.size()) + " probes";
    return res;
  } catch (const std::invalid_argument& e) {
    throw PreconditionError("--window", e.what());
  } catch (const BracketError& e) {
    json probes = json::array();
    for (const auto& pr : e.probes()) probes.push_back(probe_to_json(pr));
    manifest_extra = {{"error", e.what()}, {"probes", probes}};
    throw;
  }
}

Result cmd_triangle(const Params& p) {
  const auto k = kernel_of(p);
  const auto box = box_of(p);
  const double beta = need_beta(p);
  need_replicas(p);
  const auto a = run_measure(p, k, box, beta, 0);
  const auto b = run_measure(p, k, box, beta, p.replicas);
  const auto c = run_measure(p, k, box, beta, 2 * p.replicas);
  const double plug = triangle_estimate(a.table);
  const double unbiased = triangle_estimate(a.table, b.table, c.table);
  std::ostringstream o;
  o << "beta,n,m,replicas,mode,value\n";
  o << format_double(beta) << ',' << p.n << ',' << a.table.m << ',' << p.replicas << ",plugin," << format_double(plug)
    << '\n';
  o << format_double(beta) << ',' << p.n << ',' << a.table.m << ',' << 3 * p.replicas << ",independent,"
    << format_double(unbiased) << '\n';
  Result res{{{"triangle.csv", o.str()}}, {}, k};
  res.summary = "triangle: plug-in " + format_double(plug) + ", independent batches " + format_double(unbiased);
  return res;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Result cmd_report(const Params& p) {
  const fs::path dir = p.in.empty() ? fs::path(p.out) : fs::path(p.in);
  KernelSpec k = kernel_of(p);
  CriticalData crit;
  if (fs::exists(dir / "critical.json")) {
    json j;
    try {
      j = json::parse(slurp(dir / "critical.json"));
      crit.estimate = critical_from_json(j);
    } catch (const json::exception& e) {
      throw PreconditionError("critical.json", e.what());
    }
    k = crit.estimate->spec;
  }
  const auto read = [&](const fs::path& f) {
    std::istringstream in(slurp(f));
    try {
      return read_sweep_csv(in, k.d);
    } catch (const std::runtime_error& e) {
      throw PreconditionError(f.filename().string(), e.what());
    }
  };
  if (!fs::exists(dir / "sweep.csv")) throw PreconditionError("--in", "no sweep.csv in " + dir.string());
  const auto sweep = read(dir / "sweep.csv");
  if (crit.estimate && fs::exists(dir / "critical_sweep.csv")) {
    for (auto& r : read(dir / "critical_sweep.csv")) {
      if (r.beta == crit.estimate->beta_c_hat) crit.at_critical = r;
      if (r.beta == crit.estimate->lo) crit.at_lo = r;
      if (r.beta == crit.estimate->hi) crit.at_hi = r;
    }
  }
  const auto rep = exponent_report(k.d, k.alpha, sweep, crit);
  std::map<double, ShellProfile> prof;
  std::map<double, std::int64_t> xi;
  for (const auto& r : sweep) {
    if (r.xi.lower_bound) continue;
    if (crit.estimate && r.beta >= crit.estimate->beta_c_hat) continue;
    prof[r.beta] = r.shells;
    xi[r.beta] = r.xi.radius;
  }
  std::optional<CollapseResult> col;
  std::string col_err;
  try {
    col = collapse_check(prof, xi, k.alpha);
  } catch (const std::invalid_argument& e) {
    col_err = e.what();
  }
  const auto j = report_to_json(rep, col ? &*col : nullptr, col_err);
  Result res{{{"report.json", j.dump(2) + "\n"}, {"report.csv", render([&](std::ostream& o) { write_report_csv(o, rep); })}},
             {},
             k};
  std::size_t ok = 0;
  for (const auto& it : rep.items) ok += it.sufficient ? 1 : 0;
  res.summary = "report: " + std::to_string(ok) + "/" + std::to_string(rep.items.size()) + " exponents fitted";
  return res;
}

Result cmd_verify_analytic(const Params& p) {
  const auto k = kernel_of(p);
  if (!(k.alpha < 1.0)) throw PreconditionError("--alpha", "convolution check needs alpha < 1");
  const std::vector<double> radii{4, 8, 16}, mult{4, 8, 16};
  std::vector<double> rs = radii;
  if (p.d >= 2) rs = {4, 8};
  const std::vector<double> ms = p.d >= 2 ? std::vector<double>{4, 8} : mult;
  auto rows = threshold_convolution_grid(p.d, k.alpha, rs, ms);
  const int kmax = p.d == 1 ? 8 : p.d == 2 ? 5 : 4;
  double cmin = INFINITY, cmax = 0.0;
  for (int kk = p.d == 1 ? 4 : 3; kk <= kmax; ++kk) {
    rows.push_back(box_exit_constant(p.d, kk));
    cmin = std::min(cmin, rows.back().ratio);
    cmax = std::max(cmax, rows.back().ratio);
  }
  double rmin = INFINITY, rmax = 0.0;
  for (const auto& r : rows)
    if (r.kind == "convolution") {
      rmin = std::min(rmin, r.ratio);
      rmax = std::max(rmax, r.ratio);
    }
  Result res{{{"analytic.csv", render([&](std::ostream& o) { write_analytic_csv(o, rows); })}}, {}, k};
  res.summary = "verify-analytic: convolution ratio spread " + format_double(rmax / rmin) + ", box-exit C' spread " +
                format_double(cmax / cmin);
  return res;
}

void add_options(CLI::App* sub, Params& p) {
  sub->add_option("--d", p.d, "dimension (1-3)");
  sub->add_option("--alpha", p.alpha, "long-range exponent");
  sub->add_option("--A", p.amplitude, "kernel amplitude");
  sub->add_option("--truncate", p.truncate, "max sup-norm edge length or 'none'");
  sub->add_option("--beta", p.beta, "inverse temperature");
  sub->add_option("--beta-grid", p.beta_grid, "lo:hi:steps");
  sub->add_option("--n", p.n, "box radius");
  sub->add_option("--inner-fraction", p.inner_fraction, "inner window radius as a fraction of n");
  sub->add_option("--replicas", p.replicas, "replicas (per probe for find-critical)");
  sub->add_option("--seed", p.seed, "master seed");
  sub->add_option("--window", p.window, "rmin:rmax for the slope statistic");
  sub->add_option("--tol", p.tol, "relative bisection tolerance");
  sub->add_option("--out", p.out, "output directory");
  sub->add_option("--in", p.in, "input directory (report)");
  sub->add_option("--threads", p.threads, "worker threads (default PERC_LR_THREADS or all cores)");
  sub->add_option("--bracket", p.bracket, "initial beta bracket lo:hi (find-critical)");
  sub->add_option("--expand", p.expand, "max geometric bracket expansions (find-critical)");
  sub->add_option("--config", p.config, "key = value file; flags override it");
}

const std::vector<std::string> kCommands{"sample", "two-point", "sweep", "find-critical", "triangle", "report",
                                         "verify-analytic"};

}  // namespace

int run_command(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  const auto wall0 = std::chrono::steady_clock::now();
  const auto cpu0 = std::clock();

  // config file values go first so later flags win
  std::vector<std::string> args = args_in;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }

  Params p;
  CLI::App app("Long-range percolation Monte Carlo laboratory", "lrperc");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : kCommands) {
    auto* s = app.add_subcommand(c, "");
    s->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    add_options(s, p);
    subs[c] = s;
  }

  if (!config_path.empty() && !args.empty() && subs.count(args[0])) {
    try {
      std::vector<std::string> injected;
      for (const auto& [tagged, value] : load_config(config_path)) {
        const auto at = tagged.rfind('@');
        const auto key = tagged.substr(0, at);
        if (key == "config" || subs[args[0]]->get_option_no_throw("--" + key) == nullptr)
          throw ConfigError(config_path + ":" + tagged.substr(at + 1) + ": unknown key '" + key + "'");
        injected.push_back("--" + key);
        injected.push_back(value);
      }
      args.insert(args.begin() + 1, injected.begin(), injected.end());
    } catch (const ConfigError& e) {
      err << "error: " << e.what() << '\n';
      return kBadFlags;
    }
  }

  try {
    std::vector<const char*> argv{"lrperc"};
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kBadFlags;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  p.threads = resolve_threads(p.threads);
  json extra;
  try {
    Result res;
    if (command == "sample") res = cmd_sample(p);
    else if (command == "two-point") res = cmd_two_point(p);
    else if (command == "sweep") res = cmd_sweep(p);
    else if (command == "find-critical") res = cmd_find_critical(p, extra);
    else if (command == "triangle") res = cmd_triangle(p);
    else if (command == "report") res = cmd_report(p);
    else res = cmd_verify_analytic(p);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    json manifest = {{"schema", 1},
                     {"command", command},
                     {"kernel", res.spec},
                     {"parameters", params_json(p, command)},
                     {"seed", p.seed},
                     {"wall_seconds", wall},
                     {"core_seconds", static_cast<double>(std::clock() - cpu0) / CLOCKS_PER_SEC}};
    emit_outputs(res.artifacts, manifest, p.out);
    out << res.summary << " -> " << p.out << '\n';
    return kOk;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << '\n';
    return kPrecondition;
  } catch (const BracketError& e) {
    err << "bracketing failed: " << e.what() << '\n';
    try {
      json manifest = {{"schema", 1}, {"command", command}, {"parameters", params_json(p, command)}, {"seed", p.seed}};
      emit_outputs({{"critical.json", extra.dump(2) + "\n"}}, manifest, p.out);
    } catch (const IoError& io) {
      err << "error: " << io.what() << '\n';
      return kIoFailure;
    }
    return kBracketFailure;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::invalid_argument& e) {
    err << "precondition violated: " << e.what() << '\n';
    return kPrecondition;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kPrecondition;
  }
}

}  // namespace lrp::cli
