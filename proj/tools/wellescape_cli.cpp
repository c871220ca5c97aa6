// wellescape: escape-threshold curves, resonance-manifold grids, brute-force
// simulation, MEMS polynomial fits and action-angle tables.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "wellescape/action_angle.hpp"
#include "wellescape/approx.hpp"
#include "wellescape/errors.hpp"
#include "wellescape/io.hpp"
#include "wellescape/resonance.hpp"
#include "wellescape/simulator.hpp"

using namespace wellescape;

namespace {

struct Flags {
  std::string config, well, omega, f, xi, criterion, fit, out, format;
  int horizon = 0, jobs = -1, n_theta = 0, n_xi = 0, psi_scan = -1;
  double psi = 0.0, e_thres = 0.0;
  bool with_simulation = false, dump_config = false;
  CLI::Option *o_horizon{}, *o_psi{}, *o_e_thres{}, *o_n_theta{}, *o_n_xi{}, *o_jobs{}, *o_psi_scan{};
};

void add_common(CLI::App* sub, Flags& fl) {
  sub->add_option("--config", fl.config, "run config JSON (flags override it)");
  sub->add_option("--well", fl.well, "well spec JSON file");
  sub->add_option("--omega", fl.omega, "forcing frequency: x or start:end:step");
  sub->add_option("--f", fl.f, "forcing amplitude: x or start:end:step");
  fl.o_horizon = sub->add_option("--horizon", fl.horizon, "simulation horizon in forcing periods");
  sub->add_option("--criterion", fl.criterion, "escape criterion: hitting|energy");
  fl.o_psi = sub->add_option("--psi", fl.psi, "forcing phase");
  sub->add_option("--fit", fl.fit, "barrier|inflection|three-point|l2|taylor:N");
  sub->add_flag("--with-simulation", fl.with_simulation, "add simulator oracle rows");
  fl.o_jobs = sub->add_option("--jobs", fl.jobs, "worker threads (0: all cores)");
  sub->add_option("--format", fl.format, "csv|json");
  sub->add_option("--out", fl.out, "output path (companion files share its stem)");
  fl.o_e_thres = sub->add_option("--e-thres", fl.e_thres, "escape energy level (default: barrier)");
  sub->add_flag("--dump-config", fl.dump_config, "print the effective run config and exit");
}

RunConfig build_config(const std::string& command, const Flags& fl) {
  RunConfig c;
  if (!fl.config.empty()) {
    std::ifstream in(fl.config);
    if (!in) throw ConfigError("cannot open config '" + fl.config + "'");
    try {
      c = run_config_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
      throw ConfigError("config '" + fl.config + "': " + e.what());
    }
    if (!c.command.empty() && c.command != command) {
      throw ConfigError("config is for '" + c.command + "', not '" + command + "'");
    }
  } else if (fl.well.empty()) {
    throw ConfigError("--well is required");
  }
  c.command = command;
  if (!fl.well.empty()) c.well = load_well_spec(fl.well);
  if (!fl.omega.empty()) c.omega = parse_range(fl.omega);
  if (!fl.f.empty()) c.f = parse_range(fl.f);
  if (!fl.xi.empty()) c.xi = parse_range(fl.xi);
  if (fl.o_horizon->count()) c.horizon = fl.horizon;
  if (!fl.criterion.empty()) c.criterion = parse_criterion(fl.criterion);
  if (fl.o_psi->count()) c.psi = fl.psi;
  if (!fl.fit.empty()) {
    parse_fit_tag(fl.fit);
    c.fit = fl.fit;
  }
  if (fl.with_simulation) c.with_simulation = true;
  if (fl.o_jobs->count()) c.jobs = fl.jobs;
  if (!fl.format.empty()) c.format = fl.format;
  if (!fl.out.empty()) c.out = fl.out;
  if (fl.o_e_thres->count()) c.e_thres = fl.e_thres;
  if (fl.o_n_theta && fl.o_n_theta->count()) c.n_theta = fl.n_theta;
  if (fl.o_n_xi && fl.o_n_xi->count()) c.n_xi = fl.n_xi;
  if (fl.o_psi_scan && fl.o_psi_scan->count()) c.psi_scan = fl.psi_scan;
  // re-validate through the JSON path so both entry points agree
  return run_config_from_json(to_json(c));
}

int jobs_of(const RunConfig& c) {
  if (c.jobs > 0) return c.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---- outputs ---------------------------------------------------------------

std::string companion(const std::string& out, const std::string& suffix, const std::string& ext) {
  auto dot = out.find_last_of('.');
  auto slash = out.find_last_of('/');
  std::string stem = out;
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) stem = out.substr(0, dot);
  return stem + suffix + "." + ext;
}

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw ConfigError("cannot write '" + path + "'");
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// companion files need a named main output
bool companions_enabled(const RunConfig& c, const char* what) {
  if (!c.out.empty()) return true;
  std::cerr << "note: " << what << " not written (needs --out)\n";
  return false;
}

// ---- analysed well ---------------------------------------------------------

struct Analysis {
  PotentialPtr source;                 // the well as configured
  std::optional<FitPolynomial> fit;    // when --fit is given
  std::optional<NormalForm> nf;        // quartic fits
  std::optional<QuarticWell> quartic;  // normal-form quartic
  std::optional<double> E_thres;       // in normal-form units
};

Analysis analyse(const RunConfig& c, bool need_quartic) {
  Analysis a;
  a.source = make_well(c.well);
  if (!c.fit) {
    if (c.well.type == "quartic") {
      a.quartic = make_quartic(c.well);
    } else if (need_quartic) {
      throw ConfigError("the analytic pipeline needs a quartic well; pass --fit for '" + c.well.type + "'");
    }
    a.E_thres = c.e_thres;
    return a;
  }
  const int order = parse_fit_tag(*c.fit);
  const auto w_hat = translate_well(a.source);
  const auto iv = fit_interval(*w_hat);
  if (order > 0) {
    a.fit = fit_taylor(*a.source, order);
  } else if (*c.fit == "barrier") {
    a.fit = fit_global_barrier(*w_hat, iv.q_min, iv.q_max);
  } else if (*c.fit == "inflection") {
    a.fit = fit_global_inflection(*w_hat, iv.q_min);
  } else if (*c.fit == "three-point") {
    a.fit = fit_global_three_point(*w_hat, iv.q_min, iv.q_infl, iv.q_max);
  } else {
    a.fit = fit_l2(*w_hat, iv.q_min, iv.q_max);
  }
  if (order > 4) {
    if (need_quartic) {
      throw ConfigError("no analytic curve for " + *c.fit + " (only quartic fits); use simulate --fit " + *c.fit);
    }
    return a;
  }
  a.nf = normal_form(*a.fit);
  a.quartic = a.nf->well();
  if (a.quartic->kind() == QuarticCase::Unsupported) {
    throw DomainError("fitted quartic " + a.quartic->describe() + " has no supported barrier");
  }
  const auto geo = fit_geometry(*a.fit);
  if (c.e_thres) {
    a.E_thres = a.nf->to_normal_energy(*c.e_thres);
  } else if (a.fit->threshold_q) {
    a.E_thres = a.nf->to_normal_energy(geo.E_thres);
  }
  return a;
}

double to_fit_omega(const Analysis& a, double Omega) { return a.nf ? a.nf->to_fit_omega(Omega) : Omega; }
double to_normal_omega(const Analysis& a, double w) { return a.nf ? a.nf->to_normal_omega(w) : w; }
double to_fit_force(const Analysis& a, double F) { return a.nf ? a.nf->to_fit_force(F) : F; }
double to_normal_force(const Analysis& a, double F) { return a.nf ? a.nf->to_normal_force(F) : F; }

SimConfig sim_config(const RunConfig& c) {
  SimConfig s;
  s.horizon_periods = c.horizon;
  s.criterion = c.criterion;
  s.params.psi = c.psi;
  return s;
}

// the well a simulation runs on: the fit if given, the source otherwise
std::pair<PotentialPtr, std::optional<double>> sim_well(const RunConfig& c, const Analysis& a) {
  if (a.fit) {
    const auto geo = fit_geometry(*a.fit);
    return {a.fit->well(), c.e_thres ? c.e_thres : std::optional<double>(geo.E_thres)};
  }
  return {a.source, c.e_thres};
}

void write_sweep(std::ostream& os, const std::vector<SweepRow>& rows) {
  CsvWriter w(os, {"omega", "f_crit_low", "f_crit_high", "horizon_periods", "criterion"});
  for (const auto& r : rows) {
    const double nan = std::nan("");
    w.row({r.Omega, r.ok() ? r.f_low : nan, r.ok() ? r.f_high : nan, r.horizon_periods, to_string(r.criterion)});
  }
}

json sweep_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json j{{"omega", r.Omega}, {"horizon_periods", r.horizon_periods}, {"criterion", to_string(r.criterion)},
           {"monotone", r.monotone}};
    if (r.ok()) {
      j["f_crit_low"] = r.f_low;
      j["f_crit_high"] = r.f_high;
    } else {
      j["error"] = r.error;
    }
    arr.push_back(j);
  }
  return arr;
}

int report_sweep_errors(const std::vector<SweepRow>& rows) {
  int bad = 0;
  for (const auto& r : rows) {
    if (!r.ok()) {
      std::cerr << "error: Omega=" << format_double(r.Omega) << ": " << r.error << "\n";
      ++bad;
    } else if (!r.monotone) {
      std::cerr << "warning: Omega=" << format_double(r.Omega) << ": escape verdict not monotone in F\n";
    }
  }
  return bad ? 3 : 0;
}

// ---- subcommands -----------------------------------------------------------

int cmd_escape_curve(const RunConfig& c) {
  if (!c.omega) throw ConfigError("escape-curve needs --omega");
  const auto a = analyse(c, true);
  const QuarticAA aa(*a.quartic);
  EnvelopeOptions opt;
  if (a.E_thres) opt.E_thres = *a.E_thres;

  std::vector<double> omegas;
  for (double w : c.omega->values()) omegas.push_back(to_normal_omega(a, w));
  const auto env = combined_escape_curve(aa, omegas, opt, jobs_of(c));

  // branches
  const double E_top = opt.E_thres > 0.0 ? opt.E_thres : aa.E_max();
  const auto line = maximum_line(aa, E_top, opt.separatrix_margin);
  std::vector<double> xi;
  for (int j = 1; j <= c.n_xi; ++j) xi.push_back(line.E_eval * j / (c.n_xi + 1.0));
  const auto saddle = saddle_curve(aa, xi);

  std::vector<SweepRow> sim;
  int status = 0;
  if (c.with_simulation) {
    SweepOptions so;
    so.jobs = jobs_of(c);
    sim = sweep(*a.source, c.omega->values(), sim_config(c), so);
    status = report_sweep_errors(sim);
  }

  Sink main(c.out);
  if (c.format == "json") {
    auto pts = [&](const std::vector<EscapePoint>& v) {
      json arr = json::array();
      for (const auto& p : v) {
        arr.push_back({{"omega", to_fit_omega(a, p.Omega)},
                       {"f_crit", to_fit_force(a, p.F_crit)},
                       {"mechanism", to_string(p.mechanism)}});
      }
      return arr;
    };
    json maxl = json::array();
    for (double w : omegas) {
      if (line.at(w) > 0.0) maxl.push_back({{"omega", to_fit_omega(a, w)}, {"f_crit", to_fit_force(a, line.at(w))}});
    }
    json j{{"well", to_json(c.well)},
           {"envelope", pts(env.curve.points)},
           {"saddle", pts(saddle.points)},
           {"maximum", maxl},
           {"dip_omega", env.curve.points.empty() ? json(nullptr) : json(to_fit_omega(a, env.curve.points[env.dip_index].Omega))}};
    if (c.fit) j["fit"] = *c.fit;
    if (c.with_simulation) j["simulation"] = sweep_json(sim);
    main.os() << j.dump(2) << "\n";
    return status;
  }

  CsvWriter w(main.os(), {"omega", "f_crit", "mechanism"});
  for (const auto& p : env.curve.points) {
    w.row({to_fit_omega(a, p.Omega), to_fit_force(a, p.F_crit), to_string(p.mechanism)});
  }
  for (const auto& r : sim) {
    if (r.ok()) w.row({r.Omega, 0.5 * (r.f_low + r.f_high), std::string("simulation")});
  }
  if (companions_enabled(c, "branch files")) {
    Sink s(companion(c.out, "_saddle", "csv"));
    CsvWriter ws(s.os(), {"omega", "f_crit", "mechanism"});
    for (const auto& p : saddle.points) ws.row({to_fit_omega(a, p.Omega), to_fit_force(a, p.F_crit), std::string("saddle")});
    Sink m(companion(c.out, "_maximum", "csv"));
    CsvWriter wm(m.os(), {"omega", "f_crit", "mechanism"});
    for (double om : omegas) {
      if (line.at(om) > 0.0) wm.row({to_fit_omega(a, om), to_fit_force(a, line.at(om)), std::string("maximum")});
    }
    if (c.with_simulation) {
      Sink sw(companion(c.out, "_sweep", "csv"));
      write_sweep(sw.os(), sim);
    }
  }
  return status;
}

int cmd_rm_grid(const RunConfig& c) {
  if (!c.omega || !c.omega->single()) throw ConfigError("rm-grid needs a single --omega");
  if (!c.f || !c.f->single()) throw ConfigError("rm-grid needs a single --f");
  if (c.n_theta < 2 || c.n_xi < 2) throw ConfigError("rm-grid needs --n-theta, --n-xi >= 2");
  const auto a = analyse(c, true);
  const QuarticAA aa(*a.quartic);
  ForcingParams p;
  p.Omega = to_normal_omega(a, c.omega->start);
  p.F = to_normal_force(a, c.f->start);
  p.psi = c.psi;
  // grids are in normal-form units
  const auto g = rm_grid(aa, p, c.n_theta, c.n_xi, a.E_thres.value_or(0.0));
  std::cerr << "lpt reaches threshold: " << (g.lpt_reaches_threshold ? "yes" : "no") << "\n";

  Sink main(c.out);
  if (c.format == "json") {
    json lpt = json::array();
    for (const auto& q : g.lpt) lpt.push_back({q.theta, q.xi});
    main.os() << json{{"theta", g.theta}, {"xi", g.xi}, {"C", g.C}, {"lpt", lpt},
                      {"lpt_reaches_threshold", g.lpt_reaches_threshold}}
                     .dump()
              << "\n";
    return 0;
  }
  CsvWriter w(main.os(), {"theta", "xi", "C"});
  for (std::size_t j = 0; j < g.xi.size(); ++j) {
    for (std::size_t i = 0; i < g.theta.size(); ++i) w.row({g.theta[i], g.xi[j], g.C[j * g.theta.size() + i]});
  }
  if (companions_enabled(c, "lpt contour")) {
    Sink l(companion(c.out, "_lpt", "csv"));
    CsvWriter wl(l.os(), {"theta", "xi"});
    for (const auto& q : g.lpt) wl.row({q.theta, q.xi});
  }
  return 0;
}

int cmd_simulate(const RunConfig& c) {
  if (!c.omega) throw ConfigError("simulate needs --omega");
  const auto a = analyse(c, false);
  auto [well, e_thres] = sim_well(c, a);
  SimConfig s = sim_config(c);
  s.E_thres = e_thres;
  Sink main(c.out);

  if (!c.omega->single()) {
    SweepOptions so;
    so.jobs = jobs_of(c);
    if (c.f) {
      if (c.f->single()) throw ConfigError("a sweep takes --f as start:end:step (scan step and cap)");
      so.f_step = c.f->step;
      so.f_max = c.f->end;
    }
    const auto rows = sweep(*well, c.omega->values(), s, so);
    if (c.format == "json") {
      main.os() << sweep_json(rows).dump(2) << "\n";
    } else {
      write_sweep(main.os(), rows);
    }
    return report_sweep_errors(rows);
  }

  s.params.Omega = c.omega->start;
  if (!c.f) throw ConfigError("simulate needs --f (a value, or start:end:step for bisection)");
  if (!c.f->single()) {
    const auto b = critical_force_bisect(*well, s.params.Omega, {c.f->start, c.f->end}, s);
    SweepRow row;
    row.Omega = s.params.Omega;
    row.f_low = b.low;
    row.f_high = b.high;
    row.horizon_periods = c.horizon;
    row.criterion = c.criterion;
    if (c.format == "json") {
      main.os() << sweep_json({row}).dump(2) << "\n";
    } else {
      write_sweep(main.os(), {row});
    }
    return 0;
  }

  s.params.F = c.f->start;
  if (c.psi_scan > 0) {
    const auto rows = psi_scan(*well, s, c.psi_scan, jobs_of(c));
    CsvWriter w(main.os(), {"psi", "escaped", "t_escape"});
    for (const auto& r : rows) w.row({r.psi, r.escaped ? 1 : 0, r.t_escape.value_or(std::nan(""))});
    return 0;
  }
  s.trace = true;
  const auto r = integrate_orbit(*well, s);
  std::cerr << (r.escaped ? "escaped" : "stayed");
  if (r.t_escape) std::cerr << " at t=" << format_double(*r.t_escape);
  if (r.singular) std::cerr << " (electrostatic collapse)";
  std::cerr << ", max energy " << format_double(r.max_energy) << "\n";
  if (c.format == "json") {
    json tr = json::array();
    for (const auto& p : r.trace) tr.push_back({p.t, p.q, p.p, p.E});
    main.os() << json{{"escaped", r.escaped},
                      {"t_escape", r.t_escape ? json(*r.t_escape) : json(nullptr)},
                      {"max_energy", r.max_energy},
                      {"singular", r.singular},
                      {"trace", tr}}
                     .dump()
              << "\n";
    return 0;
  }
  CsvWriter w(main.os(), {"t", "q", "p", "E"});
  for (const auto& p : r.trace) w.row({p.t, p.q, p.p, p.E});
  return 0;
}

int cmd_fit(const RunConfig& c) {
  const auto source = make_well(c.well);
  const auto w_hat = translate_well(source);
  const auto iv = fit_interval(*w_hat);
  std::vector<FitPolynomial> fits;
  const std::vector<std::string> tags =
      c.fit ? std::vector<std::string>{*c.fit}
            : std::vector<std::string>{"barrier", "inflection", "three-point", "l2", "taylor:4", "taylor:6",
                                       "taylor:8", "taylor:10"};
  for (const auto& t : tags) {
    const int order = parse_fit_tag(t);
    if (order > 0) {
      fits.push_back(fit_taylor(*source, order));
    } else if (t == "barrier") {
      fits.push_back(fit_global_barrier(*w_hat, iv.q_min, iv.q_max));
    } else if (t == "inflection") {
      fits.push_back(fit_global_inflection(*w_hat, iv.q_min));
    } else if (t == "three-point") {
      fits.push_back(fit_global_three_point(*w_hat, iv.q_min, iv.q_infl, iv.q_max));
    } else {
      fits.push_back(fit_l2(*w_hat, iv.q_min, iv.q_max));
    }
  }
  json reports = json::array();
  for (const auto& f : fits) reports.push_back(to_json(fit_report(*w_hat, f, iv)));
  const json doc{{"well", to_json(c.well)},
                 {"interval", {{"q_min", iv.q_min}, {"q_max", iv.q_max}, {"q_infl", iv.q_infl}}},
                 {"source_E_max", w_hat->value(iv.q_max)},
                 {"fits", reports}};
  Sink main(c.out);
  if (c.format == "json") {
    main.os() << doc.dump(2) << "\n";
    return 0;
  }
  CsvWriter w(main.os(), {"scheme", "degree", "coefficient"});
  for (const auto& f : fits) {
    for (std::size_t n = 2; n < f.coeffs.size(); ++n) w.row({f.tag(), static_cast<int>(n), f.coeffs[n]});
  }
  if (companions_enabled(c, "fit report")) {
    Sink r(companion(c.out, "_report", "json"));
    r.os() << doc.dump(2) << "\n";
  }
  return 0;
}

int cmd_aa_table(const RunConfig& c) {
  const auto a = analyse(c, true);
  const QuarticAA aa(*a.quartic);
  std::vector<double> xi;
  if (c.xi) {
    xi = c.xi->values();
  } else {
    for (int j = 1; j <= c.n_xi; ++j) xi.push_back(aa.E_max() * j / (c.n_xi + 1.0));
  }
  for (double x : xi) {
    if (!(x > 0.0 && x < aa.E_max())) {
      throw EnergyRangeError("xi=" + format_double(x) + " outside (0, E_max=" + format_double(aa.E_max()) + ")");
    }
  }
  const auto rows = aa_table(*a.quartic, xi);
  Sink main(c.out);
  if (c.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"xi", r.xi}, {"J", r.J}, {"Omega", r.Omega}, {"G", r.G}, {"k", r.k}, {"gamma2", r.gamma2}});
    }
    main.os() << arr.dump(2) << "\n";
    return 0;
  }
  CsvWriter w(main.os(), {"xi", "J", "Omega", "G", "k", "gamma2"});
  for (const auto& r : rows) w.row({r.xi, r.J, r.Omega, r.G, r.k, r.gamma2});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"escape thresholds of forced particles in quartic and MEMS potential wells"};
  app.require_subcommand(1);

  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
    Flags flags;
    CLI::App* sub = nullptr;
  };
  std::vector<Cmd> cmds{
      {"escape-curve", "analytic saddle branch, maximum line and envelope", cmd_escape_curve, {}},
      {"rm-grid", "conservation-law grid on the phase cylinder and the LPT", cmd_rm_grid, {}},
      {"simulate", "single orbit, bisection, sweep or psi-scan", cmd_simulate, {}},
      {"fit", "quartic and Taylor fits of a translated well", cmd_fit, {}},
      {"aa-table", "action-angle quantities on an energy grid", cmd_aa_table, {}},
  };
  for (auto& c : cmds) {
    c.sub = app.add_subcommand(c.name, c.help);
    add_common(c.sub, c.flags);
    c.flags.o_n_theta = c.sub->add_option("--n-theta", c.flags.n_theta, "phase grid points");
    c.flags.o_n_xi = c.sub->add_option("--n-xi", c.flags.n_xi, "energy grid points");
    c.flags.o_psi_scan = c.sub->add_option("--psi-scan", c.flags.psi_scan, "simulate: number of phases to scan");
    c.sub->add_option("--xi", c.flags.xi, "aa-table: energy range");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto& c : cmds) {
    if (!c.sub->parsed()) continue;
    try {
      const RunConfig cfg = build_config(c.name, c.flags);
      if (c.flags.dump_config) {
        std::cout << to_json(cfg).dump(2) << "\n";
        return 0;
      }
      return c.run(cfg);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "numerical failure: " << e.what() << "\n";
      return 3;
    }
  }
  return 2;
}
