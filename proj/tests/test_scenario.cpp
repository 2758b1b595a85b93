#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fts/scenario.hpp"

using namespace fts;

namespace {

std::string scenario_path(const std::string& file) {
  return std::string(FTS_SCENARIO_DIR) + "/" + file;
}

const char* kMiniToml = R"(
name = "mini"
count = 3
ratio = 0.5
flag = true

[sim]
dt = 1e-3

[[block]]
v = [1.0, 2.0]

[[block]]
v = [3.0, 4.0]

[nested.deep]
label = "x"
m = [[1.0, 0.0], [0.0, 2.0]]
)";

}  // namespace

TEST_CASE("toml subset parses typed values") {
  auto doc = toml::parse(kMiniToml);
  const auto* root = doc.get("");
  REQUIRE(root);
  CHECK(root->get_str("name") == "mini");
  CHECK(root->get_int("count", 0) == 3);
  CHECK(root->get_num("ratio") == doctest::Approx(0.5));
  CHECK(root->get_bool("flag", false));
  CHECK(doc.get("sim")->get_num("dt") == doctest::Approx(1e-3));

  const auto* blocks = doc.get_array("block");
  REQUIRE(blocks);
  REQUIRE(blocks->size() == 2);
  CHECK((*blocks)[1].get_vec("v") == std::vector<double>{3.0, 4.0});

  const auto* deep = doc.get("nested.deep");
  REQUIRE(deep);
  CHECK(deep->get_str("label") == "x");
  auto m = deep->get_mat("m");
  REQUIRE(m.size() == 2);
  CHECK(m[1][1] == doctest::Approx(2.0));
}

TEST_CASE("toml serialize and reparse round-trips") {
  auto doc = toml::parse(kMiniToml);
  auto doc2 = toml::parse(toml::serialize(doc));
  CHECK(doc == doc2);
}

TEST_CASE("toml rejects malformed input") {
  CHECK_THROWS_AS(toml::parse("key = "), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("[unclosed"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("a = [1,"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("= 3"), toml::ParseError);
}

TEST_CASE("scalar scenario loads with expected fields") {
  auto sc = load_scenario(scenario_path("scalar_fts.toml"));
  CHECK(sc.name == "scalar_fts");
  CHECK(sc.dimension == 1);
  CHECK(sc.sim.dt == doctest::Approx(1e-4));
  CHECK(sc.sim.stop_norm == doctest::Approx(1e-10));
  CHECK(sc.x0.size() == 1);
  CHECK(sc.x0(0) == doctest::Approx(1.0));
  REQUIRE(sc.certificate);
  CHECK(sc.certificate->F == 1);
  CHECK(sc.certificate->beta == doctest::Approx(0.75));
  CHECK(sc.certificate->alpha0(2.0) == doctest::Approx(1.1 * 4.0));
  CHECK(sc.policy.variant == SwitchingPolicy::Variant::TimeTable);
  REQUIRE(sc.lyapunov.size() == 1);
  CHECK(sc.lyapunov[0](sc.x0) == doctest::Approx(1.0));
}

TEST_CASE("linear scenario assembles the augmented system") {
  auto sc = load_scenario(scenario_path("example2.toml"));
  CHECK(sc.dimension == 4);  // plant + observer stack
  CHECK(sc.system.n_flows() == 5);
  CHECK(sc.system.n_jumps() == 0);
  REQUIRE(sc.plant);
  CHECK(sc.plant->sigma0 == 5);
  CHECK(sc.plant->canonical_sigma0());
  REQUIRE(sc.law);
  CHECK(sc.law->F == 5);
  CHECK(sc.law->state_dim == 2);
  CHECK(sc.policy.variant == SwitchingPolicy::Variant::StateLaw);
  // x0 is the plant state padded with xhat = 0.
  REQUIRE(sc.x0.size() == 4);
  CHECK(sc.x0(2) == 0.0);
  CHECK(sc.x0(3) == 0.0);
}

TEST_CASE("scenario errors carry context") {
  CHECK_THROWS_AS(load_scenario_text("name = \"x\"\n"), ScenarioError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/path.toml"), ScenarioError);
  // Unknown registry flow name.
  CHECK_THROWS(load_scenario_text(R"(
name = "bad"
[sim]
dt = 0.01
t_end = 1.0
[system]
type = "registry"
dimension = 1
[[system.flow]]
name = "no_such_flow"
[policy]
variant = "time-table"
pattern = [1]
interval = 1.0
[x0]
value = [1.0]
[[lyapunov]]
kind = "quadratic"
P = [[1.0]]
)"));
}

TEST_CASE("scheduled F-activation accounting") {
  TimeTable tt;
  tt.intervals = {{0.2, 5}, {0.2, 3}};
  tt.repeat = true;
  // No jumps: each mode-5 interval contributes its full 0.2.
  CHECK(scheduled_tbar_F(tt, 5, 1.0) == doctest::Approx(0.6));
  // A jump mid-interval halves the largest jump-free piece.
  tt.jump_offsets = {{0.1, 1}};
  CHECK(scheduled_tbar_F(tt, 5, 1.0) == doctest::Approx(0.3));
}

TEST_CASE("run_scenario honours overrides and writes artifacts") {
  auto sc = load_scenario(scenario_path("scalar_fts.toml"));
  RunOptions opt;
  opt.certify = true;
  opt.t_end = 3.0;
  opt.report_dir = "run_scenario_test_out";
  std::ostringstream log;
  auto res = run_scenario(sc, opt, log);
  CHECK(res.exit_code == 0);
  CHECK(res.traj.converged());
  REQUIRE(res.report);
  CHECK(res.report->certified);
  CHECK(log.str().find("certified: true") != std::string::npos);

  for (const char* f : {"trajectory.csv", "jump_events.csv", "lyapunov.csv",
                        "certificate.txt", "certificate.json"}) {
    std::string path = std::string("run_scenario_test_out/") + f;
    std::ifstream in(path);
    CHECK_MESSAGE(in.good(), path);
  }
  std::filesystem::remove_all("run_scenario_test_out");
}

TEST_CASE("sweep scales the base direction and fits envelopes") {
  auto sc = load_scenario(scenario_path("scalar_fts.toml"));
  sc.sim.t_end = 3.0;
  std::vector<Vec> x0s;
  for (double n : {0.5, 1.0, 2.0}) {
    Vec v(1);
    v << n;
    x0s.push_back(v);
  }
  std::ostringstream log;
  auto sw = sweep(sc, x0s, log);
  REQUIRE(sw.rows.size() == 3);
  for (const auto& row : sw.rows) {
    CHECK(row.converged);
    CHECK(row.gamma > 0.0);
  }
  // Larger x0 needs more budget.
  CHECK(sw.rows[2].gamma > sw.rows[0].gamma);
}

TEST_CASE("sweep file accepts vectors and norm shorthand") {
  const char* path = "sweep_test_input.txt";
  {
    std::ofstream out(path);
    out << "# comment\n1.0, 2.0\n5\n";
  }
  Vec base(2);
  base << 3.0, 4.0;  // norm 5
  auto x0s = parse_sweep_file(path, base);
  std::remove(path);
  REQUIRE(x0s.size() == 2);
  CHECK(x0s[0](0) == doctest::Approx(1.0));
  CHECK(x0s[0](1) == doctest::Approx(2.0));
  CHECK(x0s[1].norm() == doctest::Approx(5.0));
  CHECK(x0s[1](0) == doctest::Approx(3.0));
}
