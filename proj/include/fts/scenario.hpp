#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fts/core.hpp"
#include "fts/linplant.hpp"
#include "fts/monitor.hpp"
#include "fts/simulator.hpp"
#include "fts/switchlaw.hpp"
#include "fts/toml.hpp"

namespace fts {

struct Scenario {
  std::string name;
  int dimension = 0;  // simulated state dimension (2n for linear stacks)
  HybridSystem system;
  SwitchingPolicy policy;
  std::vector<LyapunovFunction> lyapunov;
  std::shared_ptr<SwitchLaw> law;
  std::optional<CertificateInputs> certificate;
  SimConfig sim;
  Vec x0;
  std::optional<LinearSwitchedPlant> plant;  // linear stacks only
  toml::Document doc;                        // retained for round-trips
};

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Scenario load_scenario(const std::string& path);
Scenario load_scenario_text(const std::string& text);

// Cumulative jump-free F-activation promised by a time table over [0, t_end]
// (sum over F intervals of the largest jump-free sub-length).
double scheduled_tbar_F(const TimeTable& table, int F, double t_end);

struct RunOptions {
  bool certify = false;
  std::string report_dir;  // empty: no artifacts written
  std::optional<double> dt, t_end, stop_norm;
  std::optional<Vec> x0;
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 3 diverged/zeno, 4 certificate failed
  HybridTrajectory traj;
  std::optional<CertificateReport> report;
};

RunResult run_scenario(const Scenario& sc, const RunOptions& opt,
                       std::ostream& log);

struct SweepRow {
  double x0_norm = 0.0;
  double gamma = 0.0;
  double achieved_Tbar_F = 0.0;
  double cond_i_max = 0.0, cond_ii_max = 0.0;
  bool converged = false;
  double t_conv = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // Power-law envelopes a*r^b fitted over the observed condition sums
  // (valid when >= 2 rows with positive sums).
  double env_i_a = 0.0, env_i_b = 0.0;
  double env_ii_a = 0.0, env_ii_b = 0.0;
};

SweepResult sweep(const Scenario& sc, const std::vector<Vec>& x0s,
                  std::ostream& log);

// Each nonempty, non-comment line is either a full state vector
// (comma/space separated) or, for dimension > 1, a single number read as a
// target norm for the scenario's x0 direction.
std::vector<Vec> parse_sweep_file(const std::string& path, const Vec& base_x0);

}  // namespace fts
