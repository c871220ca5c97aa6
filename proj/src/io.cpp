#include "wellescape/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "wellescape/errors.hpp"

namespace wellescape {

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(what + ": unknown field '" + key + "'");
  }
}

double get_number(const json& j, const std::string& key, const std::string& what) {
  if (!j.contains(key)) throw ConfigError(what + ": missing field '" + key + "'");
  if (!j[key].is_number()) throw ConfigError(what + ": field '" + key + "' must be a number");
  return j[key].get<double>();
}

template <class T>
void read_opt(const json& j, const std::string& key, T& out, const std::string& what) {
  if (!j.contains(key)) return;
  try {
    out = j[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError(what + ": field '" + key + "' has the wrong type");
  }
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || p != e || !std::isfinite(x)) throw ConfigError("not a number: '" + s + "'");
  return x;
}

}  // namespace

WellSpec well_spec_from_json(const json& j) {
  const std::string what = "well";
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ConfigError("well: missing string field 'type'");
  }
  WellSpec w;
  w.type = j["type"].get<std::string>();
  if (w.type == "quartic") {
    reject_unknown(j, {"type", "alpha", "beta", "force_case"}, what);
    w.alpha = get_number(j, "alpha", what);
    w.beta = get_number(j, "beta", what);
    read_opt(j, "force_case", w.force_case, what);
    if (w.force_case != "none" && w.force_case != "inverted") {
      throw ConfigError("well: force_case must be \"none\" or \"inverted\"");
    }
  } else if (w.type == "electrostatic") {
    reject_unknown(j, {"type", "nu", "d"}, what);
    w.nu = get_number(j, "nu", what);
    w.d = get_number(j, "d", what);
  } else {
    throw ConfigError("well: unknown type '" + w.type + "' (expected quartic|electrostatic)");
  }
  return w;
}

json to_json(const WellSpec& w) {
  if (w.type == "electrostatic") return {{"type", w.type}, {"nu", w.nu}, {"d", w.d}};
  json j{{"type", w.type}, {"alpha", w.alpha}, {"beta", w.beta}};
  if (w.force_case != "none") j["force_case"] = w.force_case;
  return j;
}

WellSpec load_well_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open well file '" + path + "'");
  try {
    return well_spec_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("well file '" + path + "': " + e.what());
  }
}

QuarticWell make_quartic(const WellSpec& w) {
  if (w.type != "quartic") throw ConfigError("expected a quartic well, got '" + w.type + "'");
  const double beta = w.force_case == "inverted" ? -std::abs(w.beta) : w.beta;
  if (classify_quartic(w.alpha, beta) == QuarticCase::Unsupported) {
    throw ConfigError("quartic well alpha=" + format_double(w.alpha) + ", beta=" + format_double(beta) +
                      " has no supported barrier (set force_case to \"inverted\" for beta < 0)");
  }
  return QuarticWell(w.alpha, beta);
}

PotentialPtr make_well(const WellSpec& w) {
  if (w.type == "quartic") return std::make_shared<const QuarticWell>(make_quartic(w));
  try {
    return std::make_shared<const ElectrostaticWell>(w.nu, w.d);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("electrostatic well: ") + e.what());
  }
}

std::vector<double> Range::values() const {
  if (single()) return {start};
  std::vector<double> v;
  const auto n = static_cast<long>(std::floor((end - start) / step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    // 0.8 + 2 * 0.01 prints as 0.8200000000000001; keep grid values tidy
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", start + static_cast<double>(i) * step);
    v.push_back(parse_double(buf));
  }
  return v;
}

Range parse_range(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const auto c = s.find(':', pos);
    parts.push_back(s.substr(pos, c == std::string::npos ? std::string::npos : c - pos));
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  if (parts.size() == 1) return {parse_double(parts[0]), parse_double(parts[0]), 0.0};
  if (parts.size() != 3) throw ConfigError("range '" + s + "': expected start:end:step");
  Range r{parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2])};
  if (!(r.step > 0.0)) throw ConfigError("range '" + s + "': step must be positive");
  if (!(r.end >= r.start)) throw ConfigError("range '" + s + "': end before start");
  if ((r.end - r.start) / r.step > 1e7) throw ConfigError("range '" + s + "': too many points");
  return r;
}

std::string format_range(const Range& r) {
  if (r.single()) return format_double(r.start);
  return format_double(r.start) + ":" + format_double(r.end) + ":" + format_double(r.step);
}

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, p);
}

int parse_fit_tag(const std::string& tag) {
  if (tag == "barrier" || tag == "inflection" || tag == "three-point" || tag == "l2") return 0;
  if (tag.rfind("taylor:", 0) == 0) {
    const std::string n = tag.substr(7);
    int order = 0;
    auto [p, ec] = std::from_chars(n.data(), n.data() + n.size(), order);
    if (ec == std::errc() && p == n.data() + n.size() && (order == 4 || order == 6 || order == 8 || order == 10)) {
      return order;
    }
  }
  throw ConfigError("unknown fit '" + tag + "' (expected barrier|inflection|three-point|l2|taylor:{4,6,8,10})");
}

RunConfig run_config_from_json(const json& j) {
  const std::string what = "run config";
  reject_unknown(j,
                 {"command", "well", "omega", "f", "xi", "horizon", "criterion", "psi", "fit", "with_simulation",
                  "e_thres", "n_theta", "n_xi", "psi_scan", "jobs", "format", "out"},
                 what);
  RunConfig c;
  read_opt(j, "command", c.command, what);
  if (j.contains("well")) c.well = well_spec_from_json(j["well"]);
  auto range = [&](const char* key, std::optional<Range>& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_string()) throw ConfigError(what + ": field '" + key + "' must be a range string");
    out = parse_range(j[key].get<std::string>());
  };
  range("omega", c.omega);
  range("f", c.f);
  range("xi", c.xi);
  read_opt(j, "horizon", c.horizon, what);
  if (j.contains("criterion")) {
    std::string s;
    read_opt(j, "criterion", s, what);
    c.criterion = parse_criterion(s);
  }
  read_opt(j, "psi", c.psi, what);
  if (j.contains("fit")) {
    std::string s;
    read_opt(j, "fit", s, what);
    parse_fit_tag(s);
    c.fit = s;
  }
  read_opt(j, "with_simulation", c.with_simulation, what);
  if (j.contains("e_thres")) {
    double e = 0.0;
    read_opt(j, "e_thres", e, what);
    c.e_thres = e;
  }
  read_opt(j, "n_theta", c.n_theta, what);
  read_opt(j, "n_xi", c.n_xi, what);
  read_opt(j, "psi_scan", c.psi_scan, what);
  read_opt(j, "jobs", c.jobs, what);
  read_opt(j, "format", c.format, what);
  read_opt(j, "out", c.out, what);
  if (c.format != "csv" && c.format != "json") throw ConfigError(what + ": format must be csv or json");
  if (c.horizon < 1) throw ConfigError(what + ": horizon must be at least 1");
  if (c.jobs < 0) throw ConfigError(what + ": jobs must be non-negative");
  return c;
}

json to_json(const RunConfig& c) {
  json j{{"command", c.command},
         {"well", to_json(c.well)},
         {"horizon", c.horizon},
         {"criterion", to_string(c.criterion)},
         {"psi", c.psi},
         {"with_simulation", c.with_simulation},
         {"n_theta", c.n_theta},
         {"n_xi", c.n_xi},
         {"psi_scan", c.psi_scan},
         {"jobs", c.jobs},
         {"format", c.format},
         {"out", c.out}};
  if (c.omega) j["omega"] = format_range(*c.omega);
  if (c.f) j["f"] = format_range(*c.f);
  if (c.xi) j["xi"] = format_range(*c.xi);
  if (c.fit) j["fit"] = *c.fit;
  if (c.e_thres) j["e_thres"] = *c.e_thres;
  return j;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header)
    : os_(os), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
  os_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            os_ << format_double(v);
          } else {
            os_ << v;
          }
        },
        cells[i]);
  }
  os_ << '\n';
  ++rows_;
}

json to_json(const WellGeometry& g) {
  const char* side = g.side == EscapeSide::Right ? "right" : g.side == EscapeSide::Left ? "left" : "both";
  return {{"q_equilibrium", g.q_equilibrium}, {"q_thres", g.q_thres}, {"E_max", g.E_max},
          {"E_thres", g.E_thres},             {"q_low", g.q_low},     {"q_high", g.q_high},
          {"side", side}};
}

json to_json(const FitReport& r) {
  json coeffs = json::object();
  for (std::size_t n = 2; n < r.fit.coeffs.size(); ++n) coeffs[std::to_string(n)] = r.fit.coeffs[n];
  json j{{"scheme", r.fit.tag()},
         {"coefficients", coeffs},
         {"constraint_residuals", r.residuals},
         {"l2_residual", r.l2},
         {"barrier_discrepancy", r.barrier_discrepancy}};
  j["geometry"] = r.geometry ? to_json(*r.geometry) : json(nullptr);
  if (!r.geometry_error.empty()) j["geometry_error"] = r.geometry_error;
  if (r.fit.threshold_q) j["threshold_q"] = *r.fit.threshold_q;
  if (r.normal) {
    j["normal_form"] = {{"alpha", r.normal->alpha}, {"beta", r.normal->beta}, {"lambda", r.normal->lambda},
                        {"mu", r.normal->mu}};
  } else {
    j["normal_form"] = nullptr;
  }
  return j;
}

}  // namespace wellescape
