#include <catch2/catch_amalgamated.hpp>

#include <clocale>
#include <sstream>

#include "wellescape/errors.hpp"
#include "wellescape/io.hpp"

using namespace wellescape;
using Catch::Approx;

TEST_CASE("well spec JSON round trip") {
  const auto q = well_spec_from_json(json::parse(R"({"type":"quartic","alpha":-0.5,"beta":0.05})"));
  CHECK(q.alpha == -0.5);
  CHECK(q.beta == 0.05);
  CHECK(well_spec_from_json(to_json(q)) == q);
  const auto e = well_spec_from_json(json::parse(R"({"type":"electrostatic","nu":0.06,"d":1})"));
  CHECK(e.nu == 0.06);
  CHECK(well_spec_from_json(to_json(e)) == e);
  CHECK(to_json(e).dump() == R"({"d":1.0,"nu":0.06,"type":"electrostatic"})");
  const auto inv =
      well_spec_from_json(json::parse(R"({"type":"quartic","alpha":-0.06,"beta":0.068,"force_case":"inverted"})"));
  CHECK(well_spec_from_json(to_json(inv)) == inv);
  CHECK(make_quartic(inv).beta() == -0.068);
  CHECK(make_quartic(inv).kind() == QuarticCase::InvertedQuartic);
}

TEST_CASE("well spec rejects bad input") {
  CHECK_THROWS_AS(well_spec_from_json(json::parse(R"({"type":"quartic","alpha":1,"beta":0,"gamma":2})")),
                  ConfigError);
  CHECK_THROWS_AS(well_spec_from_json(json::parse(R"({"type":"quartic","alpha":1})")), ConfigError);
  CHECK_THROWS_AS(well_spec_from_json(json::parse(R"({"type":"cubic"})")), ConfigError);
  CHECK_THROWS_AS(well_spec_from_json(json::parse(R"({"type":"electrostatic","nu":"x","d":1})")), ConfigError);
  CHECK_THROWS_AS(well_spec_from_json(json::parse(R"({"type":"quartic","alpha":1,"beta":1,"force_case":"up"})")),
                  ConfigError);
  CHECK_THROWS_AS(well_spec_from_json(json::parse("[1,2]")), ConfigError);
  // no barrier / static pull-in are config errors at construction
  CHECK_THROWS_AS(make_well(well_spec_from_json(json::parse(R"({"type":"quartic","alpha":-0.06,"beta":0.068})"))),
                  ConfigError);
  CHECK_THROWS_AS(make_well(well_spec_from_json(json::parse(R"({"type":"electrostatic","nu":0.2,"d":1})"))),
                  ConfigError);
  CHECK_THROWS_AS(load_well_spec("/nonexistent/well.json"), ConfigError);
}

TEST_CASE("ranges") {
  const auto r = parse_range("0.8:1.0:0.005");
  CHECK(r.values().size() == 41);
  CHECK(r.values().back() == Approx(1.0));
  CHECK(parse_range("0.85").values() == std::vector<double>{0.85});
  CHECK(parse_range(format_range(r)) == r);
  CHECK(parse_range("0.80:1.00:0.01").values().size() == 21);
  for (const char* bad : {"", "a", "1:2", "1:2:0", "2:1:0.1", "1:2:-1", "0.8,0.9", "1:2:3:4", "nan"}) {
    CHECK_THROWS_AS(parse_range(bad), ConfigError);
  }
  // independent of the C locale's decimal separator
  const char* old = std::setlocale(LC_NUMERIC, nullptr);
  std::string saved = old ? old : "C";
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) {
    CHECK(parse_range("0.5").start == 0.5);
    CHECK(format_double(0.5) == "0.5");
  }
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST_CASE("run config round trip") {
  RunConfig c;
  c.command = "escape-curve";
  c.well = WellSpec{"electrostatic", 0.0, 0.0, "none", 0.06, 1.0};
  c.omega = parse_range("0.8:1:0.01");
  c.f = parse_range("0.07");
  c.horizon = 100;
  c.criterion = EscapeCriterion::Energy;
  c.fit = "taylor:6";
  c.with_simulation = true;
  c.e_thres = 0.5;
  c.jobs = 3;
  c.format = "json";
  c.out = "x.csv";
  const auto back = run_config_from_json(json::parse(to_json(c).dump()));
  CHECK(back == c);
  CHECK(run_config_from_json(to_json(RunConfig{})) == RunConfig{});
  auto j = to_json(c);
  j["colour"] = "red";
  CHECK_THROWS_AS(run_config_from_json(j), ConfigError);
  j = to_json(c);
  j["fit"] = "taylor:5";
  CHECK_THROWS_AS(run_config_from_json(j), ConfigError);
  j = to_json(c);
  j["criterion"] = "sometimes";
  CHECK_THROWS_AS(run_config_from_json(j), ConfigError);
  j = to_json(c);
  j["horizon"] = 0;
  CHECK_THROWS_AS(run_config_from_json(j), ConfigError);
  j = to_json(c);
  j["horizon"] = "long";
  CHECK_THROWS_AS(run_config_from_json(j), ConfigError);
}

TEST_CASE("fit tags") {
  CHECK(parse_fit_tag("l2") == 0);
  CHECK(parse_fit_tag("taylor:10") == 10);
  CHECK_THROWS_AS(parse_fit_tag("taylor:"), ConfigError);
  CHECK_THROWS_AS(parse_fit_tag("taylor:4x"), ConfigError);
  CHECK_THROWS_AS(parse_fit_tag("spline"), ConfigError);
}

TEST_CASE("csv writer") {
  std::ostringstream os;
  CsvWriter w(os, {"omega", "f_crit", "mechanism"});
  w.row({0.85, 0.09946, std::string("saddle")});
  w.row({1.0, 1e-20, std::string("maximum")});
  CHECK(w.rows() == 2);
  CHECK(os.str() == "omega,f_crit,mechanism\n0.85,0.09946,saddle\n1,1e-20,maximum\n");
  CHECK_THROWS(w.row({1.0}));
  // shortest round trip
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("fit report JSON") {
  const auto w = translate_well(std::make_shared<const ElectrostaticWell>(0.06, 1.0));
  const auto iv = fit_interval(*w);
  const auto rep = fit_report(*w, fit_l2(*w, iv.q_min, iv.q_max), iv);
  const auto j = to_json(rep);
  CHECK(j["scheme"] == "l2");
  CHECK(j["coefficients"]["2"].get<double>() == Approx(0.45386).margin(1e-4));
  CHECK(j["normal_form"]["lambda"] == 1.0);
  CHECK(j["geometry"]["side"] == "right");
  CHECK(j.contains("l2_residual"));
  CHECK(j["constraint_residuals"].empty());
}
