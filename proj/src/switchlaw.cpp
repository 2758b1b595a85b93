#include "fts/switchlaw.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fts {

MuTable MuTable::zeros(int N) {
  MuTable t;
  t.N = N;
  t.mu.assign(N, std::vector<ScalarField>(N));
  t.grad.assign(N, std::vector<Field>(N));
  return t;
}

void MuTable::set_row_neg_norm_squared(int i) {
  for (int j = 0; j < N; ++j) {
    if (j == i - 1) continue;
    mu[i - 1][j] = [](const Vec& x) { return -x.squaredNorm(); };
    grad[i - 1][j] = [](const Vec& x) -> Vec { return -2.0 * x; };
  }
}

void MuTable::set_row_zero(int i) {
  for (int j = 0; j < N; ++j) {
    mu[i - 1][j] = nullptr;
    grad[i - 1][j] = nullptr;
  }
}

double MuTable::value(int i, int j, const Vec& x) const {
  if (i == j) return 0.0;
  const auto& f = mu[i - 1][j - 1];
  return f ? f(x) : 0.0;
}

bool MuTable::has_gradient(int i, int j) const {
  return i == j || !mu[i - 1][j - 1] || static_cast<bool>(grad[i - 1][j - 1]);
}

Vec MuTable::gradient(int i, int j, const Vec& x) const {
  if (i == j || !mu[i - 1][j - 1]) return Vec::Zero(x.size());
  const auto& g = grad[i - 1][j - 1];
  if (!g) throw std::invalid_argument("MuTable: gradient not provided");
  return g(x);
}

MuTable::CheckResult MuTable::check_invariants(const std::vector<Vec>& samples,
                                               double tol) const {
  CheckResult res;
  if (samples.empty()) {
    res.ok = false;
    res.what = "no samples";
    return res;
  }
  Vec zero = Vec::Zero(samples.front().size());
  for (int i = 1; i <= N; ++i) {
    for (int j = 1; j <= N; ++j) {
      if (i == j && std::abs(value(i, j, samples.front())) != 0.0) {
        res.ok = false;
        res.what = "mu_ii != 0";
        return res;
      }
      if (std::abs(value(i, j, zero)) > tol) {
        res.ok = false;
        res.what = "mu_ij(0) != 0";
        return res;
      }
    }
  }
  for (const Vec& x : samples) {
    for (int i = 1; i <= N; ++i)
      for (int j = 1; j <= N; ++j)
        for (int k = 1; k <= N; ++k) {
          double lhs = value(i, j, x) + value(j, k, x);
          double bound = std::min(0.0, value(i, k, x));
          if (lhs > bound + tol) {
            std::ostringstream ss;
            ss << "triangle violated at (i,j,k)=(" << i << "," << j << ","
               << k << ")";
            res.ok = false;
            res.what = ss.str();
            res.where = x;
            return res;
          }
        }
  }
  return res;
}

Vec SwitchLaw::project(const Vec& x) const {
  if (state_dim <= 0 || state_dim >= x.size()) return x;
  return x.head(state_dim);
}

double SwitchLaw::s(int i, int j, const Vec& x) const {
  Vec y = project(x);
  return lyapunov[i - 1](y) - lyapunov[j - 1](y) + mu_table.value(i, j, y);
}

bool in_omega_i(const SwitchLaw& law, int i, const Vec& x) {
  for (int j = 1; j <= law.n_modes(); ++j) {
    if (j == i) continue;
    if (law.s(i, j, x) > 0.0) return false;
  }
  return true;
}

bool on_omega_ij(const SwitchLaw& law, int i, int j, const Vec& x,
                 double extra_band) {
  return std::abs(law.s(i, j, x)) <= law.surface_tol + extra_band;
}

NextModeResult next_mode_ex(const SwitchLaw& law, int current,
                            const Vec& x_prev, double elapsed,
                            double extra_band) {
  // Surface cases first (F-target priority, then lowest index), interior
  // second, hold-and-warn third. See on_omega_ij for the band semantics.
  const int N = law.n_modes();
  int target = 0;
  if (current == law.F) {
    if (elapsed >= law.t_d) {
      for (int j = 1; j <= N; ++j) {
        if (j == current) continue;
        if (on_omega_ij(law, current, j, x_prev, extra_band)) {
          target = j;
          break;
        }
      }
    }
  } else {
    if (law.F != current &&
        on_omega_ij(law, current, law.F, x_prev, extra_band)) {
      target = law.F;
    } else {
      for (int j = 1; j <= N; ++j) {
        if (j == current) continue;
        if (on_omega_ij(law, current, j, x_prev, extra_band)) {
          target = j;
          break;
        }
      }
    }
  }
  if (target != 0) return {target, false};
  if (in_omega_i(law, current, x_prev)) return {current, false};
  return {current, true};
}

int next_mode(const SwitchLaw& law, int current, const Vec& x_prev,
              double elapsed, double extra_band) {
  return next_mode_ex(law, current, x_prev, elapsed, extra_band).mode;
}

SurfaceKind sliding_check(const SwitchLaw& law, const HybridSystem& sys, int i,
                          int j, const Vec& x, double tangent_tol) {
  Vec y = law.project(x);
  if (!law.lyapunov[i - 1].has_gradient() ||
      !law.lyapunov[j - 1].has_gradient() || !law.mu_table.has_gradient(i, j))
    throw std::invalid_argument("sliding_check: gradients required");
  Vec n = law.lyapunov[i - 1].gradient(y) - law.lyapunov[j - 1].gradient(y) +
          law.mu_table.gradient(i, j, y);
  double di = n.dot(sys.flows[i - 1](x).head(y.size()));
  double dj = n.dot(sys.flows[j - 1](x).head(y.size()));
  if (std::abs(di) <= tangent_tol || std::abs(dj) <= tangent_tol)
    return SurfaceKind::Tangent;
  if (di > 0.0 && dj < 0.0) return SurfaceKind::Sliding;
  return SurfaceKind::Transversal;
}

Theorem3Report check_theorem3(
    const SwitchLaw& law, const HybridSystem& sys,
    const std::vector<std::vector<ScalarField>>& beta_table,
    const std::vector<Vec>& samples, double tol) {
  Theorem3Report rep;
  const int N = law.n_modes();
  auto beta = [&](int i, int j, const Vec& x) -> double {
    const auto& f = beta_table[i - 1][j - 1];
    return f ? f(x) : 0.0;
  };
  auto note = [&](const std::string& what) {
    if (rep.first_violation.empty()) rep.first_violation = what;
  };
  for (const Vec& x : samples) {
    for (int i = 1; i <= N && (rep.beta_sign_ok || rep.eq17_ok || rep.eq18_ok);
         ++i) {
      Vec y = law.project(x);
      Vec fi = sys.flows[i - 1](x).head(y.size());
      double lhs17 = law.lyapunov[i - 1].gradient(y).dot(fi);
      for (int j = 1; j <= N; ++j) {
        if (j == i) continue;
        double b = beta(i, j, x);
        if (b > tol && rep.beta_sign_ok) {
          rep.beta_sign_ok = false;
          note("beta_ij > 0");
        }
        lhs17 += b * law.s(i, j, x);
        if (law.mu_table.has_gradient(i, j)) {
          if (law.mu_table.gradient(i, j, y).dot(fi) > tol && rep.eq18_ok) {
            rep.eq18_ok = false;
            note("grad mu_ij . f_i > 0");
          }
        }
      }
      if (lhs17 > tol && rep.eq17_ok) {
        rep.eq17_ok = false;
        note("grad V_i . f_i + sum beta_ij s_ij > 0");
      }
    }
  }
  auto mu_res = law.mu_table.check_invariants(samples, tol);
  if (!mu_res.ok) {
    rep.mu_ok = false;
    note("mu table: " + mu_res.what);
  }
  return rep;
}

}  // namespace fts
