#include <doctest.h>

#include <fstream>
#include <sstream>
#include <unistd.h>

#include "abel/cli.hpp"

using namespace abel;
using namespace abel::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("abel_cli_" + std::to_string(::getpid())) / name;
  std::filesystem::create_directories(p);
  return p;
}

std::filesystem::path write_config(const std::string& name, const std::string& body) {
  const auto p = scratch("configs") / (name + ".json");
  std::ofstream(p) << body;
  return p;
}

json read_json(const std::filesystem::path& p) {
  std::ifstream is(p);
  return json::parse(is);
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    rows.push_back(f);
  }
  return rows;
}

AnalysisConfig config(const std::string& text) { return AnalysisConfig::from_json(json::parse(text)); }

}  // namespace

TEST_CASE("config defaults are filled in and echoed") {
  const auto c = config(R"({"family": {"kind": "quad_poly", "t_A": 0.3, "t_B": "1/5"}})");
  CHECK(c.family.t_A == make_rational(3, 10));
  CHECK(c.family.t_B == make_rational(1, 5));
  const auto j = c.to_json();
  CHECK(j["schema_version"] == kSchemaVersion);
  for (const char* key : {"family", "integrator", "cycles", "curves", "infinity", "flags", "outputs"})
    CHECK(j.contains(key));
  CHECK(j["integrator"]["rel_tol"] == c.integrator.rel_tol);
  // The echo is itself a valid config that reproduces the same effective settings.
  CHECK(AnalysisConfig::from_json(j).to_json() == j);
}

TEST_CASE("malformed configs are rejected") {
  CHECK_THROWS_AS(config(R"({"family": {"kind": "quad_poly", "t_A": "2/3"}})"), ConfigError);
  CHECK_THROWS_AS(config(R"({"family": {"kind": "cubic"}})"), ConfigError);
  CHECK_THROWS_AS(config(R"({"family": {"kind": "lin_trig"}, "integrator": {"rel_tol": -1}})"), ConfigError);
  CHECK_THROWS_AS(config(R"({"family": {"kind": "lin_trig"}, "integrator": {"rtol": 1e-9}})"), ConfigError);
  CHECK_THROWS_AS(config(R"({"family": {"kind": "lin_trig"}, "sweep": {"parameter": "b0", "lo": 0, "hi": 1, "steps": 0}})"),
                  ConfigError);
  CHECK_THROWS_AS(config(R"({"family": {"kind": "lin_trig"}, "sweep": {"parameter": "b0", "lo": 1, "hi": 0, "steps": 3}})"),
                  ConfigError);
  CHECK_THROWS_AS(config(R"({"family": {"kind": "lin_trig"}, "sweep": {"parameter": "t_A", "lo": 0, "hi": 1, "steps": 3}})"),
                  ConfigError);
  CHECK_THROWS_AS(config(R"({"schema_version": 7, "family": {"kind": "lin_trig"}})"), ConfigError);
}

TEST_CASE("exit codes") {
  std::ostringstream log;
  const auto out = scratch("exit");
  CHECK(dispatch("analyze", write_config("broken", "{ not json"), out, 1, log) == 1);
  CHECK(dispatch("analyze", write_config("nofile", "{}"), out, 1, log) == 1);
  CHECK(dispatch("analyze", scratch("configs") / "missing.json", out, 1, log) == 1);
  CHECK(dispatch("explode", write_config("ok", R"({"family": {"kind": "lin_trig"}})"), out, 1, log) == 1);
  // b0 + b2 = 0 violates the trigonometric family's requirement.
  CHECK(dispatch("analyze", write_config("pre", R"({"family": {"kind": "lin_trig", "b0": -1, "b2": 1}})"), out, 1, log) == 2);
  CHECK(dispatch("sweep", write_config("nosweep", R"({"family": {"kind": "lin_trig"}})"), out, 1, log) == 1);
  CHECK(dispatch("trig-infinity", write_config("quad", R"({"family": {"kind": "quad_poly", "t_A": "2/3", "t_B": "1/3"}})"),
                 out, 1, log) == 1);
}

TEST_CASE("analysis reports") {
  std::ostringstream log;
  SUBCASE("double Hopf point") {
    const auto out = scratch("double_hopf");
    REQUIRE(dispatch("analyze", write_config("dh", R"({"family": {"kind": "quad_poly", "t_A": "2/3", "t_B": "1/3"}})"),
                     out, 1, log) == 0);
    const auto r = read_json(out / "report.json");
    CHECK(r["schema_version"] == kSchemaVersion);
    CHECK(r["config"]["cycles"]["n_grid"] == 512);
    CHECK(r["hopf"]["exact"]["c4"] == "-1/540");
    CHECK(r["hopf"]["exact"]["c2"] == "0");
    CHECK(r["criteria"]["c2"]["verdict"] == "true");
    CHECK(r["criteria"]["c3"]["verdict"] == "true");
    CHECK(r["zero_structure"]["interleaved"] == true);
    CHECK(r["short_circuit"] == false);
  }
  SUBCASE("uniqueness by combination") {
    const auto r = run_analyze(config(R"({"family": {"kind": "quad_poly", "t_A": 0.3, "t_B": 0.5}})"));
    CHECK(r["uniqueness"]["verdict"] == "AtMostOneByCombination");
    CHECK(r["short_circuit"] == true);
    CHECK(r["criteria"].contains("skipped"));
    CHECK(r["cycles"]["count"].get<int>() <= 1);
  }
  SUBCASE("general pair with B vanishing at the zero of A") {
    CHECK_THROWS_AS(run_analyze(config(R"({"family": {"kind": "general_trig", "A": [0, 1, 0], "B": [1, 0, 1]}})")),
                    PreconditionError);
  }
  SUBCASE("negative trigonometric coefficients") {
    const auto r = run_analyze(config(R"({"family": {"kind": "lin_trig", "a0": -0.1, "b0": -0.1, "b1": 0, "b2": 1}})"));
    CHECK(r["status"] == "ok");
    CHECK(r["cycles"]["count"] == 0);
  }
  SUBCASE("general trigonometric pair") {
    // A = sin t, B = 1 + cos t / 2 normalizes to a canonical pair.
    const auto r = run_analyze(config(R"({"family": {"kind": "general_trig", "A": [0, 1, 0], "B": [1, 0, 0.5]}})"));
    CHECK(r["status"] == "ok");
    CHECK(r["family"]["kind"] == "general_trig");
  }
}

TEST_CASE("single-point sweep equals the analysis row") {
  const auto cfg = config(R"({"family": {"kind": "quad_poly", "t_A": "0.64", "t_B": "47/150"},
                              "sweep": {"parameter": "t_A", "lo": "0.645", "hi": "0.645", "steps": 1}})");
  const auto s = run_sweep(cfg, 1);
  REQUIRE(s.rows.size() == 1);
  auto single = config(R"({"family": {"kind": "quad_poly", "t_A": "0.645", "t_B": "47/150"}})");
  auto row = run_analyze(single)["row"];
  auto swept = s.rows[0].to_json();
  CHECK(swept["N"] == 2);
  for (auto* j : {&row, &swept}) {
    j->erase("index");
    j->erase("value");
  }
  CHECK(row == swept);
}

TEST_CASE("sweep output is deterministic and ordered") {
  const auto cfg = config(R"({"family": {"kind": "quad_poly", "t_A": "2/3", "t_B": "47/150"},
                              "sweep": {"parameter": "t_A", "lo": "0.63", "hi": "0.66", "steps": 13}})");
  std::ostringstream one, four;
  const auto s1 = run_sweep(cfg, 1, &one);
  const auto s4 = run_sweep(cfg, 4, &four);
  CHECK(one.str() == four.str());
  CHECK(one.str().rfind("# abel atlas schema_version=1\n", 0) == 0);
  for (std::size_t i = 0; i < s4.rows.size(); ++i) CHECK(s4.rows[i].index == static_cast<int>(i));
  CHECK(atlas_json(cfg, s1) == atlas_json(cfg, s4));
}

TEST_CASE("sweep through the two-cycle regime") {
  const auto cfg = config(R"({"family": {"kind": "quad_poly", "t_A": "2/3", "t_B": "47/150"},
                              "sweep": {"parameter": "t_A", "lo": "0.62", "hi": "0.70", "steps": 41}})");
  const auto s = run_sweep(cfg, 0);
  CHECK(s.max_N == 2);
  CHECK(s.violations.empty());
  // A cycle enters from infinity near t_A = 0.6405; the pair merges at the fold near t_A = 0.6494.
  for (const auto& r : s.rows) {
    CHECK(r.status == "ok");
    const int expected = r.index <= 10 ? 1 : (r.index <= 14 ? 2 : 0);
    CHECK_MESSAGE(r.N() == expected, "row " << r.index);
    if (r.N() == 2) {
      CHECK(r.cycles[0].multiplier > 1.0);
      CHECK(r.cycles[1].multiplier < 1.0);
    }
  }
  CHECK(s.rows[11].hopf_infinity);
}

TEST_CASE("sweep of t_A at t_B = 1/3") {
  const auto cfg = config(R"({"family": {"kind": "quad_poly", "t_A": "2/3", "t_B": "1/3"},
                              "sweep": {"parameter": "t_A", "lo": "0.34", "hi": "0.99", "steps": 66}})");
  const auto s = run_sweep(cfg, 0);
  CHECK(s.max_N == 1);
  // One cycle exists for t_A in roughly (0.6455, 2/3) and disappears into the origin at t_A = 2/3.
  for (const auto& r : s.rows) {
    const double ta = to_double(r.family.t_A);
    CHECK_MESSAGE(r.N() == (ta > 0.6455 && ta < 2.0 / 3 ? 1 : 0), "t_A = " << ta);
  }
}

TEST_CASE("trigonometric sweep in b0") {
  const auto cfg = config(R"({"family": {"kind": "lin_trig", "a0": 0.05, "b0": 0, "b1": 0, "b2": 1},
                              "sweep": {"parameter": "b0", "lo": "-0.3", "hi": "0.3", "steps": 31}})");
  const auto s = run_sweep(cfg, 0);
  CHECK(s.max_N <= 2);
  for (const auto& r : s.rows) CHECK(r.status == "ok");
  CHECK(s.rows[10].N() == 0);  // b0 = -0.1: both coefficients negative enough for no cycles
  CHECK(s.rows[20].N() == 1);
}

TEST_CASE("failed rows are kept with their status") {
  const auto cfg = config(R"({"family": {"kind": "lin_trig", "a0": 0, "b0": 0, "b1": 0, "b2": 1},
                              "sweep": {"parameter": "b0", "lo": "-1.5", "hi": "-0.5", "steps": 3}})");
  std::ostringstream csv;
  const auto s = run_sweep(cfg, 2, &csv);
  REQUIRE(s.rows.size() == 3);
  CHECK(s.rows[0].status.rfind("precondition", 0) == 0);
  CHECK(s.rows[1].status.rfind("precondition", 0) == 0);
  CHECK(s.rows[2].status == "ok");
  std::size_t lines = 0;
  for (char c : csv.str()) lines += c == '\n';
  CHECK(lines == 5);
}

TEST_CASE("curve exports at a fold") {
  const auto out = scratch("curves");
  std::ostringstream log;
  REQUIRE(dispatch("curves", write_config("curves", R"({
      "family": {"kind": "quad_poly", "t_A": "2/3", "t_B": "47/150"},
      "sweep": {"parameter": "t_A", "lo": "0.6", "hi": "0.7", "steps": 2},
      "curves": {"samples": 801, "fold_x": [1.5, 4.0], "x_lo": 0.5, "x_hi": 8, "x_count": 12}})"),
                   out, 1, log) == 0);
  const auto manifest = read_json(out / "curves.json");
  CHECK(manifest["fold"]["semistability"]["consistent"] == true);
  CHECK(manifest["fold"]["parameter"].get<double>() == doctest::Approx(0.649437).epsilon(1e-5));
  const double t1 = manifest["fold"]["t1"], t2 = manifest["fold"]["t2"];

  // phi of the configured family, -B / (2A): poles at 0 and t_A = 2/3, zeros at t_B = 47/150 and 1.
  const auto phi = read_csv(out / "phi.csv");
  REQUIRE(phi.size() == 802);
  const double ta = 2.0 / 3;
  CHECK(phi[1][3].empty());
  int poles = 0, zeros = 0;
  double prev = std::stod(phi[2][3]);
  for (std::size_t i = 3; i < phi.size(); ++i) {
    if (phi[i][3].empty()) continue;
    const double t = std::stod(phi[i][0]), v = std::stod(phi[i][3]);
    if (prev * v < 0) {
      if (std::abs(prev - v) > 1.0) {
        ++poles;
        CHECK(std::abs(t - ta) < 2e-3);
      } else {
        ++zeros;
        CHECK(std::abs(t - 47.0 / 150) < 2e-3);
      }
    }
    prev = v;
  }
  CHECK(poles == 1);
  CHECK(zeros == 1);
  CHECK(std::abs(std::stod(phi.back()[3])) < 1e-12);

  // alpha blows up next to t1 and t2; beta peaks at t1 and bottoms out at t2.
  const auto ab = read_csv(out / "alpha_beta.csv");
  REQUIRE(ab.size() == 802);
  double amax_near = 0.0;
  std::size_t imax = 1, imin = 1;
  for (std::size_t i = 1; i < ab.size(); ++i) {
    const double t = std::stod(ab[i][0]);
    if (!ab[i][4].empty() && (std::abs(t - t1) < 3e-3 || std::abs(t - t2) < 3e-3))
      amax_near = std::max(amax_near, std::abs(std::stod(ab[i][4])));
    if (std::stod(ab[i][5]) > std::stod(ab[imax][5])) imax = i;
    if (std::stod(ab[i][5]) < std::stod(ab[imin][5])) imin = i;
  }
  CHECK(amax_near > 50.0);
  CHECK(std::abs(std::stod(ab[imax][0]) - t1) < 1.5e-3);
  CHECK(std::abs(std::stod(ab[imin][0]) - t2) < 1.5e-3);

  const auto lam = read_csv(out / "lambda.csv");
  CHECK(lam.size() == 13);
  CHECK(lam[0][1] == "lambda");
}

TEST_CASE("infinity report export") {
  const auto out = scratch("infinity");
  std::ostringstream log;
  REQUIRE(dispatch("trig-infinity", write_config("inf", R"({"family": {"kind": "lin_trig", "a0": 0, "b0": 0, "b1": 0, "b2": 1}})"),
                   out, 1, log) == 0);
  const auto r = read_json(out / "infinity.json");
  CHECK(r["infinity"]["lambda_minus"].get<double>() == doctest::Approx((-1 - std::sqrt(5.0)) / 2).epsilon(1e-12));
  CHECK(r["infinity"]["lambda_plus"].get<double>() == doctest::Approx((-1 + std::sqrt(5.0)) / 2).epsilon(1e-12));
  CHECK(r["infinity"]["decay"]["reached"] == true);
  CHECK(r["infinity"]["return_map"].size() == 20);
  const auto m = read_csv(out / "manifolds.csv");
  CHECK(m[0] == std::vector<std::string>{"branch", "t", "y"});
  CHECK(m.size() > 100);
}
