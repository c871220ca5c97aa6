#pragma once

// Config and output plumbing: well specs and run configs as JSON,
// start:end:step ranges, CSV writing and the fit report.

#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wellescape/approx.hpp"
#include "wellescape/potentials.hpp"
#include "wellescape/simulator.hpp"

namespace wellescape {

using json = nlohmann::json;

/// {"type":"quartic","alpha":a,"beta":b[,"force_case":"none"|"inverted"]}
/// {"type":"electrostatic","nu":n,"d":d}
struct WellSpec {
  std::string type = "quartic";
  double alpha = 0.0;
  double beta = 0.0;
  std::string force_case = "none";  // "inverted": beta -> -|beta|
  double nu = 0.0;
  double d = 1.0;

  bool operator==(const WellSpec&) const = default;
};

WellSpec well_spec_from_json(const json& j);  // throws ConfigError
json to_json(const WellSpec& w);
WellSpec load_well_spec(const std::string& path);

/// Throws ConfigError for parameters the well constructors reject.
PotentialPtr make_well(const WellSpec& w);
/// The quartic described by a quartic spec (force_case applied).
QuarticWell make_quartic(const WellSpec& w);

struct Range {
  double start = 0.0;
  double end = 0.0;
  double step = 0.0;  // 0 for a single value

  std::vector<double> values() const;
  bool single() const { return step == 0.0; }
  bool operator==(const Range&) const = default;
};

/// "x" or "start:end:step" (locale-independent). Throws ConfigError.
Range parse_range(const std::string& s);
std::string format_range(const Range& r);

/// Shortest round-trip decimal form.
std::string format_double(double x);

struct RunConfig {
  std::string command;
  WellSpec well;
  std::optional<Range> omega;
  std::optional<Range> f;
  std::optional<Range> xi;
  int horizon = 1000;
  EscapeCriterion criterion = EscapeCriterion::FirstHitting;
  double psi = 1.5707963267948966;
  std::optional<std::string> fit;  // barrier|inflection|three-point|l2|taylor:N
  bool with_simulation = false;
  std::optional<double> e_thres;
  int n_theta = 181;
  int n_xi = 120;
  int psi_scan = 0;
  int jobs = 0;  // 0: hardware concurrency
  std::string format = "csv";
  std::string out;

  bool operator==(const RunConfig&) const = default;
};

RunConfig run_config_from_json(const json& j);  // throws ConfigError
json to_json(const RunConfig& c);

/// Validates a --fit value and returns the Taylor order (0 for the global schemes).
int parse_fit_tag(const std::string& tag);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  using Cell = std::variant<double, int, std::string>;
  void row(const std::vector<Cell>& cells);
  std::size_t rows() const { return rows_; }

 private:
  std::ostream& os_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

json to_json(const WellGeometry& g);
json to_json(const FitReport& r);

}  // namespace wellescape
