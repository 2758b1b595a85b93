#include "fts/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fts/registry.hpp"

namespace fts {

namespace {

Params table_params(const toml::Table& t) {
  Params p;
  for (const auto& [k, v] : t.kv) {
    if (k == "name") continue;
    p[k] = v.as_number();
  }
  return p;
}

Mat to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ScenarioError("empty matrix");
  Mat m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw ScenarioError("ragged matrix");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Vec to_vector(const std::vector<double>& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i];
  return out;
}

LyapunovFunction load_lyapunov(const toml::Table& t) {
  std::string kind = t.get_str("kind");
  if (kind == "quadratic")
    return LyapunovFunction::quadratic(to_matrix(t.get_mat("P")));
  if (kind == "power")
    return LyapunovFunction::power_form(t.get_num("k2"), t.get_num("alpha"));
  throw ScenarioError("unknown lyapunov kind '" + kind + "'");
}

GKFunction load_gk(const toml::Table& t, const std::string& key) {
  if (!t.has(key)) return gk_zero();
  auto ab = t.get_vec(key);
  if (ab.size() != 2)
    throw ScenarioError("certificate " + key + " must be [a, b]");
  if (ab[0] == 0.0) return gk_zero();
  GKFunction g = gk_power(ab[0], ab[1]);
  auto chk = check_gk(g, {0.0, 0.5, 1.0, 2.0, 5.0, 10.0});
  if (!chk.ok)
    throw ScenarioError("certificate " + key + " fails the GK check");
  return g;
}

TimeTable load_time_table(const toml::Table& pt, double t_end) {
  TimeTable tab;
  double interval = pt.get_num("interval");
  auto expand = [&](const std::vector<double>& pattern) {
    for (double m : pattern)
      tab.intervals.emplace_back(interval, static_cast<int>(m));
  };
  if (pt.has("head_pattern")) {
    // Head played once, then the pattern repeated explicitly to cover t_end.
    expand(pt.get_vec("head_pattern"));
    auto pattern = pt.get_vec("pattern");
    double covered = interval * static_cast<double>(tab.intervals.size());
    while (covered < t_end + interval) {
      expand(pattern);
      covered += interval * pattern.size();
    }
    tab.repeat = false;
  } else {
    expand(pt.get_vec("pattern"));
    tab.repeat = pt.get_bool("repeat", true);
  }
  if (pt.has("jump_offset"))
    tab.jump_offsets.emplace_back(
        pt.get_num("jump_offset"),
        static_cast<int>(pt.get_int("jump_index", 1)));
  return tab;
}

std::shared_ptr<SwitchLaw> load_law(const toml::Table& lt,
                                    const std::vector<LyapunovFunction>& lyap,
                                    int state_dim) {
  auto law = std::make_shared<SwitchLaw>();
  law->lyapunov = lyap;
  law->F = static_cast<int>(lt.get_int("F", 1));
  law->t_d = lt.get_num("t_d");
  law->surface_tol = lt.get_num("surface_tol", 1e-6);
  law->state_dim = state_dim;
  int N = static_cast<int>(lyap.size());
  law->mu_table = MuTable::zeros(N);
  if (lt.has("mu_rows")) {
    const auto& rows = lt.at("mu_rows");
    if (rows.kind != toml::Value::Kind::Array ||
        static_cast<int>(rows.arr.size()) != N)
      throw ScenarioError("law mu_rows must list one entry per mode");
    for (int i = 1; i <= N; ++i) {
      const std::string& kind = rows.arr[i - 1].str;
      if (kind == "negnorm2")
        law->mu_table.set_row_neg_norm_squared(i);
      else if (kind == "zero")
        law->mu_table.set_row_zero(i);
      else
        throw ScenarioError("unknown mu row kind '" + kind + "'");
    }
  }
  return law;
}

}  // namespace

double scheduled_tbar_F(const TimeTable& table, int F, double t_end) {
  if (table.intervals.empty()) return 0.0;
  auto jumps = table.jump_schedule(t_end);
  double total = 0.0;
  double start = 0.0;
  std::size_t k = 0, nj = 0;
  while (start < t_end) {
    double len = std::min(table.intervals[k].first, t_end - start);
    double end = start + len;
    if (table.intervals[k].second == F) {
      double best = 0.0, prev = start;
      while (nj < jumps.size() && jumps[nj].first < end) {
        if (jumps[nj].first > start)
          best = std::max(best, jumps[nj].first - prev);
        prev = std::max(prev, jumps[nj].first);
        ++nj;
      }
      best = std::max(best, end - prev);
      total += best;
    } else {
      while (nj < jumps.size() && jumps[nj].first < end) ++nj;
    }
    start += table.intervals[k].first;
    if (++k == table.intervals.size()) {
      if (!table.repeat) break;
      k = 0;
    }
  }
  return total;
}

Scenario load_scenario_text(const std::string& text) {
  Scenario sc;
  sc.doc = toml::parse(text);
  const toml::Table* root = sc.doc.get("");
  sc.name = root ? root->get_str("name", "scenario") : "scenario";

  const toml::Table* simt = sc.doc.get("sim");
  if (!simt) throw ScenarioError("missing [sim]");
  sc.sim.dt = simt->get_num("dt");
  sc.sim.t_end = simt->get_num("t_end");
  sc.sim.stop_norm = simt->get_num("stop_norm", 1e-10);
  sc.sim.zeno_window = simt->get_num("zeno_window", 1.0);
  sc.sim.zeno_max_jumps =
      static_cast<int>(simt->get_int("zeno_max_jumps", 1000));

  const toml::Table* syst = sc.doc.get("system");
  if (!syst) throw ScenarioError("missing [system]");
  std::string type = syst->get_str("type");

  if (const auto* lys = sc.doc.get_array("lyapunov")) {
    for (const auto& lt : *lys) sc.lyapunov.push_back(load_lyapunov(lt));
  }

  if (type == "registry") {
    sc.dimension = static_cast<int>(syst->get_int("dimension", 0));
    if (sc.dimension <= 0) throw ScenarioError("system.dimension required");
    sc.system.dimension = sc.dimension;
    const auto* flows = sc.doc.get_array("system.flow");
    if (!flows || flows->empty()) throw ScenarioError("no [[system.flow]]");
    for (const auto& ft : *flows)
      sc.system.flows.push_back(
          make_flow(ft.get_str("name"), table_params(ft)));
    if (const auto* jumps = sc.doc.get_array("system.jump")) {
      for (const auto& jt : *jumps)
        sc.system.jumps.push_back(
            make_jump(jt.get_str("name"), table_params(jt)));
    }
  } else if (type == "linear") {
    LinearSwitchedPlant plant;
    plant.sigma0 = static_cast<int>(syst->get_int("sigma0", 1));
    const auto* modes = sc.doc.get_array("system.mode");
    if (!modes || modes->empty()) throw ScenarioError("no [[system.mode]]");
    for (const auto& mt : *modes) {
      plant.A.push_back(to_matrix(mt.get_mat("A")));
      plant.B.push_back(to_vector(mt.get_vec("B")));
      plant.C.push_back(to_vector(mt.get_vec("C")));
    }
    const int n = plant.dim();
    sc.dimension = 2 * n;

    const toml::Table* ot = sc.doc.get("observer");
    const toml::Table* ct = sc.doc.get("controller");
    if (!ot || !ct)
      throw ScenarioError("linear system needs [observer] and [controller]");
    ObserverConfig obs;
    obs.l = to_vector(ot->get_vec("l"));
    obs.alpha = ot->get_num("alpha");
    obs.clamp = ot->get_num("clamp", 10.0 * sc.sim.stop_norm);
    ControllerConfig ctrl;
    ctrl.k = to_vector(ct->get_vec("k"));
    ctrl.beta = ct->get_num("beta");
    ctrl.clamp = ct->get_num("clamp", 10.0 * sc.sim.stop_norm);
    if (!obs.exponents_valid() || !obs.abar_hurwitz())
      throw ScenarioError("observer config invalid (exponents or Abar)");
    if (!ctrl.exponents_valid())
      throw ScenarioError("controller exponent recursion invalid");

    const toml::Table* lt = sc.doc.get("law");
    if (!lt) throw ScenarioError("linear system needs [law]");
    sc.law = load_law(*lt, sc.lyapunov, n);
    sc.system = assemble_closed_loop(plant, obs, ctrl, *sc.law);
    sc.plant = std::move(plant);
  } else {
    throw ScenarioError("unknown system type '" + type + "'");
  }

  const toml::Table* pt = sc.doc.get("policy");
  if (!pt) throw ScenarioError("missing [policy]");
  std::string variant = pt->get_str("variant");
  if (variant == "time-table") {
    sc.policy.variant = SwitchingPolicy::Variant::TimeTable;
    sc.policy.table = load_time_table(*pt, sc.sim.t_end);
    if (!sc.policy.table.minimal())
      throw ScenarioError("time table not minimal (repeated adjacent mode)");
  } else if (variant == "state-law") {
    sc.policy.variant = SwitchingPolicy::Variant::StateLaw;
    if (!sc.law) {
      const toml::Table* lt = sc.doc.get("law");
      if (!lt) throw ScenarioError("state-law policy needs [law]");
      sc.law = load_law(*lt, sc.lyapunov, 0);
    }
    sc.policy.law = sc.law;
    sc.policy.initial_mode =
        static_cast<int>(pt->get_int("initial_mode", sc.law->F));
  } else {
    throw ScenarioError("unknown policy variant '" + variant + "'");
  }

  const toml::Table* xt = sc.doc.get("x0");
  if (!xt) throw ScenarioError("missing [x0]");
  Vec x0 = to_vector(xt->get_vec("value"));
  if (sc.plant && x0.size() * 2 == sc.dimension) {
    // Plant-only initial condition; the observer starts at zero.
    Vec aug = Vec::Zero(sc.dimension);
    aug.head(x0.size()) = x0;
    x0 = aug;
  }
  if (x0.size() != sc.dimension)
    throw ScenarioError("x0 dimension mismatch");
  sc.x0 = x0;

  if (const toml::Table* cert = sc.doc.get("certificate")) {
    CertificateInputs in;
    in.lyapunov_set = sc.lyapunov;
    in.F = static_cast<int>(cert->get_int("F", 1));
    in.c = cert->get_num("c");
    in.beta = cert->get_num("beta");
    in.t_d = cert->get_num("t_d", 0.0);
    in.alpha0 = load_gk(*cert, "alpha0");
    in.alpha1 = load_gk(*cert, "alpha1");
    in.alpha2 = load_gk(*cert, "alpha2");
    in.alpha3 = load_gk(*cert, "alpha3");
    in.N_f = sc.system.n_flows();
    if (in.beta <= 0.0 || in.beta >= 1.0 || in.c <= 0.0)
      throw ScenarioError("certificate needs c > 0 and beta in (0,1)");
    if (in.F < 1 || in.F > in.N_f)
      throw ScenarioError("certificate F out of range");
    if (static_cast<int>(in.lyapunov_set.size()) != in.N_f)
      throw ScenarioError("need one lyapunov entry per mode");
    if (sc.policy.variant == SwitchingPolicy::Variant::TimeTable)
      in.scheduled_Tbar_F =
          scheduled_tbar_F(sc.policy.table, in.F, sc.sim.t_end);
    sc.certificate = std::move(in);
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario_text(ss.str());
}

namespace {

void write_artifacts(const Scenario& sc, const RunResult& res,
                     const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& file) {
    std::ofstream os(dir + "/" + file);
    if (!os) throw ScenarioError("cannot write " + dir + "/" + file);
    return os;
  };
  {
    auto os = open("trajectory.csv");
    export_trajectory_csv(res.traj, os);
  }
  {
    auto os = open("jump_events.csv");
    export_jump_events_csv(res.traj, os);
  }
  if (!sc.lyapunov.empty()) {
    auto os = open("lyapunov.csv");
    export_lyapunov_csv(res.traj, sc.lyapunov, os);
  }
  if (res.report) {
    auto os = open("certificate.txt");
    os << res.report->to_text();
    auto js = open("certificate.json");
    js << res.report->to_json().dump(2) << "\n";
  }
}

}  // namespace

RunResult run_scenario(const Scenario& sc, const RunOptions& opt,
                       std::ostream& log) {
  log << std::setprecision(12);
  SimConfig cfg = sc.sim;
  if (opt.dt) cfg.dt = *opt.dt;
  if (opt.t_end) cfg.t_end = *opt.t_end;
  if (opt.stop_norm) cfg.stop_norm = *opt.stop_norm;
  Vec x0 = opt.x0.value_or(sc.x0);

  RunResult res;
  res.traj = simulate(sc.system, sc.policy, x0, cfg);
  log << "scenario: " << sc.name << "\n"
      << "status: " << res.traj.message << "\n"
      << "t_stop: " << res.traj.t_stop << "\n"
      << "final_norm: " << res.traj.samples.back().x.norm() << "\n"
      << "jumps: " << res.traj.jump_events.size() << "\n"
      << "switches: " << res.traj.mode_intervals.size() - 1 << "\n";
  if (res.traj.law_hold_warnings > 0)
    log << "warning: law held current mode off-interior at "
        << res.traj.law_hold_warnings << " steps\n";

  if (res.traj.failed()) res.exit_code = 3;

  if (opt.certify) {
    if (!sc.certificate)
      throw ScenarioError("scenario has no [certificate] section");
    CertificateInputs in = *sc.certificate;
    if (opt.t_end && sc.policy.variant == SwitchingPolicy::Variant::TimeTable)
      in.scheduled_Tbar_F = scheduled_tbar_F(sc.policy.table, in.F, cfg.t_end);
    res.report = certify(res.traj, in);
    log << res.report->to_text();
    if (!res.report->certified && res.exit_code == 0) res.exit_code = 4;
  }
  if (!opt.report_dir.empty()) write_artifacts(sc, res, opt.report_dir);
  return res;
}

std::vector<Vec> parse_sweep_file(const std::string& path, const Vec& base_x0) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open sweep file '" + path + "'");
  std::vector<Vec> out;
  std::string line;
  while (std::getline(in, line)) {
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ss(line);
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    if (vals.empty() || (!line.empty() && line[0] == '#')) continue;
    if (static_cast<int>(vals.size()) == base_x0.size()) {
      out.push_back(to_vector(vals));
    } else if (vals.size() == 1 && base_x0.size() > 1) {
      double norm = base_x0.norm();
      if (norm == 0.0) throw ScenarioError("sweep norm with zero base x0");
      out.push_back(base_x0 * (vals[0] / norm));
    } else {
      throw ScenarioError("sweep line has wrong arity: " + line);
    }
  }
  if (out.empty()) throw ScenarioError("sweep file lists no initial states");
  return out;
}

namespace {

// Least-squares a*r^b fit through positive points.
std::pair<double, double> fit_power_law(
    const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (auto [r, v] : pts) {
    if (r <= 0.0 || v <= 0.0) continue;
    double lx = std::log(r), ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return {0.0, 0.0};
  double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double a = std::exp((sy - b * sx) / n);
  return {a, b};
}

}  // namespace

SweepResult sweep(const Scenario& sc, const std::vector<Vec>& x0s,
                  std::ostream& log) {
  if (x0s.empty()) throw ScenarioError("sweep: no initial states");
  SweepResult out;
  log << std::setprecision(12);
  log << "x0_norm,gamma,achieved_Tbar_F,converged,t_conv\n";
  const int F = sc.certificate ? sc.certificate->F
                               : (sc.law ? sc.law->F : 1);
  for (const Vec& x0 : x0s) {
    SweepRow row;
    row.x0_norm = x0.norm();
    try {
      HybridTrajectory traj = simulate(sc.system, sc.policy, x0, sc.sim);
      row.achieved_Tbar_F = mode_timeline(traj, F).cumulative_jump_free;
      row.converged = traj.converged();
      row.t_conv = traj.converged() ? traj.t_stop : -1.0;
      row.cond_i_max = condition_i_sum(traj, sc.lyapunov).prefix_max;
      row.cond_ii_max = condition_ii_sum(traj, sc.lyapunov).prefix_max;
      if (sc.certificate) {
        const auto& in = *sc.certificate;
        row.gamma = gamma_budget(row.x0_norm, in.alpha0, in.alpha1, in.alpha2,
                                 in.alpha3, in.N_f, in.c, in.beta);
      }
    } catch (const std::exception& e) {
      log << "# run failed at norm " << row.x0_norm << ": " << e.what()
          << "\n";
    }
    log << row.x0_norm << "," << row.gamma << "," << row.achieved_Tbar_F
        << "," << (row.converged ? 1 : 0) << "," << row.t_conv << "\n";
    out.rows.push_back(row);
  }
  std::vector<std::pair<double, double>> pi, pii;
  for (const auto& r : out.rows) {
    pi.emplace_back(r.x0_norm, r.cond_i_max);
    pii.emplace_back(r.x0_norm, r.cond_ii_max);
  }
  std::tie(out.env_i_a, out.env_i_b) = fit_power_law(pi);
  std::tie(out.env_ii_a, out.env_ii_b) = fit_power_law(pii);
  if (out.env_i_a > 0.0)
    log << "# condition_i envelope: " << out.env_i_a << " * r^" << out.env_i_b
        << "\n";
  if (out.env_ii_a > 0.0)
    log << "# condition_ii envelope: " << out.env_ii_a << " * r^"
        << out.env_ii_b << "\n";
  return out;
}

}  // namespace fts
