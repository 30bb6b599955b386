#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "memoryflow/runner.hpp"
#include "oracles.hpp"

using namespace memoryflow;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

RunConfig preset(const std::string& name, const json& overrides = json::object()) {
  return resolve_config(name, std::nullopt, overrides);
}

}  // namespace

TEST(Config, DefaultsValidate) { EXPECT_NO_THROW(resolve_config(std::nullopt, std::nullopt, json::object())); }

TEST(Config, UnknownFieldNamesTheField) {
  try {
    resolve_config(std::nullopt, json{{"bogus", 1}}, json::object());
    FAIL() << "no error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
  EXPECT_THROW(resolve_config(std::nullopt, json{{"oracle", {{"nope", true}}}}, json::object()), ConfigError);
  EXPECT_THROW(resolve_config(std::nullopt, json{{"sweep", {{"param", "eta"}}}}, json::object()), ConfigError);
}

TEST(Config, DomainViolationsAreUsageErrors) {
  EXPECT_THROW(resolve_config(std::nullopt, json{{"A", 2.0}}, json::object()), ConfigError);
  EXPECT_THROW(resolve_config(std::nullopt, json{{"eta", -0.5}}, json::object()), ConfigError);
  EXPECT_THROW(resolve_config(std::nullopt, json{{"sweep", {{"count", 0}}}}, json::object()), ConfigError);
  EXPECT_THROW(resolve_config(std::nullopt, json{{"steps", "ten"}}, json::object()), ConfigError);
  EXPECT_THROW(resolve_config(std::nullopt, json{{"engine", "magic"}}, json::object()), ConfigError);
  EXPECT_THROW(resolve_config(std::nullopt, json{{"r1", {2.0, 0.0, 0.0}}}, json::object()), ConfigError);
  EXPECT_THROW(resolve_config(std::string("fig9"), std::nullopt, json::object()), ConfigError);
}

TEST(Config, PrecedencePresetFileFlags) {
  const RunConfig a = resolve_config(std::string("fig2"), json{{"steps", 12}, {"eta", 0.3}}, json{{"steps", 4}});
  EXPECT_EQ(a.steps, 4);
  EXPECT_DOUBLE_EQ(a.eta, 0.3);
  EXPECT_DOUBLE_EQ(*a.dt_factor, 0.014);
  const RunConfig b = resolve_config(std::string("fig2"), json{{"delta_t", 3.0}}, json::object());
  EXPECT_FALSE(b.dt_factor.has_value());
  EXPECT_DOUBLE_EQ(b.dephasing().step_duration, 3.0);
}

TEST(Config, JsonRoundTrip) {
  const RunConfig a = preset("fig4");
  RunConfig b;
  apply_json(to_json(a), b);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(Presets, AllShippedAndValid) {
  for (const char* name : {"fig1", "fig2", "fig3", "fig4", "fig5"}) EXPECT_NO_THROW(preset(name)) << name;
  EXPECT_EQ(preset("fig4").sweep.count, 161);
}

TEST(Dephasing, HeaderAndShapes) {
  const RunOutput out = cmd_dephasing(preset("fig1"));
  const auto a0 = parse_csv(out.files.at("kappa_A0.csv"));
  EXPECT_EQ(a0[0], (std::vector<std::string>{"t", "abs_kappa"}));
  for (std::size_t i = 2; i < a0.size(); ++i) EXPECT_LE(std::stod(a0[i][1]), std::stod(a0[i - 1][1]));
  EXPECT_EQ(out.files.at("spectrum.csv").substr(0, 16), "A,omega,density\n");

  const auto a1 = parse_csv(out.files.at("kappa_A1.csv"));
  const double step = std::stod(a1[2][0]) - std::stod(a1[1][0]);
  const double period = 2.0 * std::numbers::pi / (9.0 * 0.009);
  std::vector<double> maxima;
  for (std::size_t i = 2; i + 1 < a1.size(); ++i) {
    const double p = std::stod(a1[i - 1][1]), v = std::stod(a1[i][1]), n = std::stod(a1[i + 1][1]);
    if (v > p && v >= n) maxima.push_back(std::stod(a1[i][0]));
  }
  ASSERT_EQ(maxima.size(), 4u);
  // The Gaussian envelope pulls each maximum slightly before m * period; compare with the
  // maximizer of the quadrature oracle near each revival.
  SpectrumParams p;
  p.amplitude_ratio = 1.0;
  for (std::size_t m = 0; m < maxima.size(); ++m) {
    const double guess = (m + 1) * period;
    const auto best = boost::math::tools::brent_find_minima(
        [&](double t) { return -std::abs(oracle::kappa_quadrature(p, 0.009, t)); },
        guess - 0.25 * period, guess + 0.25 * period, 40);
    EXPECT_LE(std::abs(maxima[m] - best.first), step) << "revival " << m + 1;
    EXPECT_LT(best.first, guess);
  }
}

TEST(ControlledQubit, ManifestAndSpecialRows) {
  const RunOutput fig2 = cmd_controlled_qubit(preset("fig2"));
  EXPECT_NEAR(fig2.manifest["derived"]["Omega_tilde_over_sigma"].get<double>(), 643.0, 0.5);
  EXPECT_NEAR(cmd_controlled_qubit(preset("fig3")).manifest["derived"]["Omega_tilde_over_sigma"].get<double>(), 4.5, 1e-12);
  const auto rows = parse_csv(fig2.files.at("controlled_qubit.csv"));
  EXPECT_EQ(rows[0].size(), 11u);
  EXPECT_EQ(rows[0][8], "D");
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][0] == "0" && std::stoi(rows[i][1]) % 2 == 0) { EXPECT_NEAR(std::stod(rows[i][8]), 1.0, 1e-10); }
}

TEST(ControlledQubit, OptionalScanFile) {
  const RunOutput out = cmd_controlled_qubit(preset("fig3", json{{"scan_resolution", 2}, {"steps", 6}}));
  ASSERT_TRUE(out.files.count("controlled_qubit_scan.csv"));
  EXPECT_NE(out.files.at("controlled_qubit_scan.csv").find("orthogonal-scan"), std::string::npos);
}

TEST(StrongLimitError, RegimesAndZeroStep) {
  const RunOutput out = cmd_strong_limit_error(preset("fig5"));
  const auto& regimes = out.manifest["derived"]["dt_factors"];
  EXPECT_NEAR(regimes[0]["Omega_tilde_over_sigma"].get<double>(), 450.0, 1.0);
  EXPECT_NEAR(regimes[1]["Omega_tilde_over_sigma"].get<double>(), 9.0, 0.5);
  EXPECT_EQ(regimes[0]["regime"], "weak");
  EXPECT_EQ(regimes[1]["regime"], "intermediate");
  for (const auto& row : parse_csv(out.files.at("strong_limit_error.csv")))
    if (row[3] == "0") { EXPECT_EQ(row[4], "0"); }
}

TEST(Walk, TwoStepExampleAndNormalization) {
  const RunOutput out = cmd_walk(resolve_config(std::nullopt, json{{"steps", 2}, {"check_integrals", true}, {"amplitudes", true}}, json::object()));
  const auto rows = parse_csv(out.files.at("walk.csv"));
  EXPECT_EQ(rows[0].size(), 7u);
  std::map<int, double> last;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][0] == "2") last[std::stoi(rows[i][1])] = std::stod(rows[i][2]);
  EXPECT_EQ(last.size(), 3u);
  EXPECT_NEAR(last[-2], 0.25, 1e-15);
  EXPECT_NEAR(last[0], 0.5, 1e-15);
  EXPECT_NEAR(last[2], 0.25, 1e-15);
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_LT(out.manifest["derived"]["integral_max_dev"].get<double>(), 1e-6);
}

TEST(OpenWalkNm, ZeroContrastAndStrongRows) {
  const json small = {{"sweep", {{"min", 0.5}, {"max", 1.5}, {"count", 3}}}, {"steps", 6}};
  const RunOutput out = cmd_open_walk_nm(preset("fig4", small));
  const auto rows = parse_csv(out.files.at("open_walk_nm.csv"));
  EXPECT_EQ(rows[0], (std::vector<std::string>{"A", "dt_omega_dn", "N10", "mode"}));
  EXPECT_EQ(rows.size(), 1u + 3u * 3u * 2u);
  std::set<std::string> strong;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][3] == "strong_limit") strong.insert(rows[i][2]);
  EXPECT_EQ(strong.size(), 1u);

  json zero = small;
  zero["delta_n"] = 0.0;
  const auto zrows = parse_csv(cmd_open_walk_nm(preset("fig4", zero)).files.at("open_walk_nm.csv"));
  for (std::size_t i = 1; i < zrows.size(); ++i)
    if (zrows[i][3] == "filter") { EXPECT_EQ(zrows[i][2], "0"); }
}

TEST(Oracle, DefaultPassesAndSchema) {
  const RunOutput out = cmd_oracle(resolve_config(std::nullopt, std::nullopt, json::object()));
  EXPECT_EQ(out.exit_code, 0);
  const json report = json::parse(out.files.at("oracle.json"));
  ASSERT_TRUE(report["checks"].is_array());
  for (const auto& c : report["checks"]) {
    for (const char* key : {"name", "max_dev", "tol", "pass"}) EXPECT_TRUE(c.contains(key)) << key;
    EXPECT_TRUE(c["pass"].get<bool>()) << c.dump();
  }
}

TEST(Oracle, PerturbedFilterFailsWithLocation) {
  const RunOutput out = cmd_oracle(resolve_config(std::nullopt, json{{"oracle", {{"perturb_filter", 1e-6}, {"engines", false}}}}, json::object()));
  EXPECT_EQ(out.exit_code, exit_code::kNumeric);
  const json report = json::parse(out.files.at("oracle.json"));
  const auto& c = report["checks"][0];
  EXPECT_FALSE(c["pass"].get<bool>());
  EXPECT_TRUE(c.contains("location"));
}

TEST(Oracle, ResourceCapIsSkippedWithReason) {
  const RunOutput out = cmd_oracle(resolve_config(std::nullopt, json{{"oracle", {{"K", {500}}, {"engines", false}}}}, json::object()));
  const json report = json::parse(out.files.at("oracle.json"));
  EXPECT_TRUE(report["checks"][0]["skipped"].get<bool>());
  EXPECT_TRUE(report["checks"][0].contains("reason"));
  EXPECT_EQ(out.exit_code, 0);
}

TEST(Determinism, ThreadCountDoesNotChangeBytes) {
  const json small = {{"sweep", {{"min", 0.1}, {"max", 2.0}, {"count", 7}}}, {"steps", 6}};
  json one = small, many = small;
  one["threads"] = 1;
  many["threads"] = 8;
  const RunOutput a = cmd_open_walk_nm(preset("fig4", one));
  const RunOutput b = cmd_open_walk_nm(preset("fig4", many));
  EXPECT_EQ(a.files, b.files);
  const RunOutput c = cmd_strong_limit_error(preset("fig5", json{{"threads", 8}}));
  const RunOutput d = cmd_strong_limit_error(preset("fig5", json{{"threads", 1}}));
  EXPECT_EQ(c.files, d.files);
}

TEST(Manifest, RecordsVersionConfigAndFiles) {
  const RunOutput out = cmd_walk(preset("fig2", json{{"steps", 3}}));
  const json m = json::parse(render_manifest(out));
  EXPECT_EQ(m["version"], kVersion);
  EXPECT_EQ(m["files"][0], "walk.csv");
  EXPECT_EQ(m["config"]["steps"], 3);
  EXPECT_EQ(manifest_name(out), "walk.manifest.json");
}

TEST(Csv, ShortestRoundTripFormat) {
  EXPECT_EQ(csv::format(0.1), "0.1");
  EXPECT_EQ(csv::format(1e-20), "1e-20");
  EXPECT_EQ(csv::format(3), "3");
  EXPECT_EQ(std::stod(csv::format(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(RunCommand, UnknownCommand) { EXPECT_THROW(run_command("plot", RunConfig{}), ConfigError); }
