#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "fts/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "fts: simulation and certification of finite-time stability for "
      "switched and hybrid systems"};

  std::string scenario_path, report_dir, sweep_file, x0_csv;
  double dt = 0.0, t_end = 0.0, stop_norm = -1.0;
  bool certify = false;

  app.add_option("--scenario", scenario_path, "Scenario TOML file")
      ->required();
  app.add_option("--dt", dt, "Override integration step (s)");
  app.add_option("--t-end", t_end, "Override simulation horizon (s)");
  app.add_option("--x0", x0_csv, "Override initial state, comma separated");
  app.add_option("--stop-norm", stop_norm, "Override convergence norm");
  app.add_flag("--certify", certify, "Evaluate the FTS certificate");
  app.add_option("--report", report_dir, "Directory for CSV/JSON artifacts");
  app.add_option("--sweep", sweep_file,
                 "Sweep file: one initial state (or norm) per line");

  CLI11_PARSE(app, argc, argv);

  std::cout.precision(12);
  try {
    fts::Scenario sc = fts::load_scenario(scenario_path);

    fts::RunOptions opt;
    opt.certify = certify;
    if (dt > 0.0) opt.dt = dt;
    if (t_end > 0.0) opt.t_end = t_end;
    if (stop_norm >= 0.0) opt.stop_norm = stop_norm;
    if (!x0_csv.empty()) {
      std::string s = x0_csv;
      for (char& ch : s)
        if (ch == ',') ch = ' ';
      std::istringstream ss(s);
      std::vector<double> vals;
      double v;
      while (ss >> v) vals.push_back(v);
      fts::Vec x0(vals.size());
      for (std::size_t i = 0; i < vals.size(); ++i) x0(i) = vals[i];
      opt.x0 = x0;
    }
    if (const char* env = std::getenv("FTS_REPORT_DIR")) opt.report_dir = env;
    if (!report_dir.empty()) opt.report_dir = report_dir;
    if (!opt.report_dir.empty())
      std::filesystem::create_directories(opt.report_dir);

    if (!sweep_file.empty()) {
      auto x0s = fts::parse_sweep_file(sweep_file, sc.x0);
      fts::sweep(sc, x0s, std::cout);
      return 0;
    }
    auto res = fts::run_scenario(sc, opt, std::cout);
    return res.exit_code;
  } catch (const fts::toml::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const fts::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
