#include "fts/linplant.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace fts {

bool LinearSwitchedPlant::canonical_sigma0() const {
  const int n = dim();
  const Mat& A0 = A[sigma0 - 1];
  const Vec& B0 = B[sigma0 - 1];
  const Vec& C0 = C[sigma0 - 1];
  Mat shift = Mat::Zero(n, n);
  shift.topRightCorner(n - 1, n - 1) = Mat::Identity(n - 1, n - 1);
  Vec en = Vec::Unit(n, n - 1), e1 = Vec::Unit(n, 0);
  return A0.isApprox(shift, 1e-12) && B0.isApprox(en, 1e-12) &&
         C0.isApprox(e1, 1e-12);
}

std::vector<double> ObserverConfig::exponents() const {
  std::vector<double> a(n());
  for (int i = 1; i <= n(); ++i) a[i - 1] = i * alpha - (i - 1);
  return a;
}

Mat ObserverConfig::abar() const {
  const int m = n();
  Mat A = Mat::Zero(m, m);
  A.col(0) = -l;
  A.topRightCorner(m - 1, m - 1) = Mat::Identity(m - 1, m - 1);
  return A;
}

bool ObserverConfig::abar_hurwitz() const {
  Eigen::EigenSolver<Mat> es(abar());
  return es.eigenvalues().real().maxCoeff() < 0.0;
}

bool ObserverConfig::exponents_valid() const {
  for (double a : exponents())
    if (a <= 0.0 || a > 1.0) return false;
  return true;
}

std::vector<double> ControllerConfig::exponents() const {
  const int m = n();
  std::vector<double> b(m + 1);
  b[m] = 1.0;  // beta_{n+1}
  if (m >= 1) b[m - 1] = beta;
  for (int j = m - 1; j >= 1; --j) {
    double denom = 2.0 * b[j + 1] - b[j];
    if (denom <= 0.0)
      throw std::invalid_argument("controller exponents: recursion breaks");
    b[j - 1] = b[j] * b[j + 1] / denom;
  }
  b.resize(m);
  return b;
}

bool ControllerConfig::exponents_valid() const {
  try {
    for (double b : exponents())
      if (b <= 0.0 || b > 1.0) return false;
  } catch (const std::invalid_argument&) {
    return false;
  }
  return true;
}

std::vector<double> ControllerConfig::char_poly() const {
  std::vector<double> c(n() + 1);
  c[0] = 1.0;
  for (int i = 1; i <= n(); ++i) c[i] = k(n() - i);
  return c;
}

namespace {

// Largest eigenvalue real part of the companion matrix.
double companion_max_real(const std::vector<double>& coeffs) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  Mat comp = Mat::Zero(deg, deg);
  for (int i = 0; i < deg; ++i) comp(0, i) = -coeffs[i + 1];
  comp.bottomLeftCorner(deg - 1, deg - 1) =
      Mat::Identity(deg - 1, deg - 1);
  Eigen::EigenSolver<Mat> es(comp);
  return es.eigenvalues().real().maxCoeff();
}

// Routh table first-column sign test. Returns false on a zero pivot (treated
// as not strictly Hurwitz).
bool hurwitz_routh(const std::vector<double>& coeffs) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n == 0) return false;
  std::vector<std::vector<double>> rows(2);
  for (int i = 0; i <= n; i += 2) rows[0].push_back(coeffs[i]);
  for (int i = 1; i <= n; i += 2) rows[1].push_back(coeffs[i]);
  if (rows[1].empty()) return false;
  std::vector<double> first = {rows[0][0], rows[1][0]};
  std::vector<double> a = rows[0], b = rows[1];
  for (int r = 2; r <= n; ++r) {
    if (b[0] == 0.0) return false;
    std::vector<double> c;
    for (std::size_t i = 0; i + 1 <= a.size(); ++i) {
      double ai1 = (i + 1 < a.size()) ? a[i + 1] : 0.0;
      double bi1 = (i + 1 < b.size()) ? b[i + 1] : 0.0;
      c.push_back((b[0] * ai1 - a[0] * bi1) / b[0]);
    }
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    if (c.empty()) return false;
    first.push_back(c[0]);
    a = b;
    b = c;
  }
  for (double v : first)
    if (v <= 0.0) return false;
  return true;
}

}  // namespace

bool is_hurwitz_poly(const std::vector<double>& coeffs) {
  if (coeffs.size() < 2)
    throw std::invalid_argument("is_hurwitz_poly: degree must be >= 1");
  if (coeffs[0] != 1.0)
    throw std::invalid_argument("is_hurwitz_poly: leading coefficient != 1");
  double max_real = companion_max_real(coeffs);
  // Roots numerically on the imaginary axis are not strictly Hurwitz; the
  // Routh pivot vanishes there, so skip the cross-check in that band.
  if (std::abs(max_real) <= 1e-9) return false;
  bool comp = max_real < 0.0;
  if (coeffs.size() <= 7) {
    bool routh = hurwitz_routh(coeffs);
    if (routh != comp)
      throw std::runtime_error(
          "is_hurwitz_poly: Routh and companion tests disagree");
  }
  return comp;
}

CtrbObsvReport ctrb_obsv_check(const LinearSwitchedPlant& plant,
                               double sv_tol) {
  const int n = plant.dim();
  CtrbObsvReport rep;
  for (int m = 0; m < plant.n_modes(); ++m) {
    Mat ctrb(n, n), obsv(n, n);
    Vec col = plant.B[m];
    Vec row = plant.C[m];
    for (int i = 0; i < n; ++i) {
      ctrb.col(i) = col;
      obsv.row(i) = row.transpose();
      col = plant.A[m] * col;
      row = plant.A[m].transpose() * row;
    }
    auto rank = [&](const Mat& M) {
      Eigen::JacobiSVD<Mat> svd(M);
      return (svd.singularValues().array() > sv_tol).count();
    };
    rep.controllable.push_back(rank(ctrb) == n);
    rep.observable.push_back(rank(obsv) == n);
  }
  rep.sigma0_ok = rep.controllable[plant.sigma0 - 1] &&
                  rep.observable[plant.sigma0 - 1];
  return rep;
}

Vec observer_step_term(const ObserverConfig& cfg, double y_err,
                       bool active_is_sigma0) {
  Vec g = Vec::Zero(cfg.n());
  if (!active_is_sigma0) return g;
  auto a = cfg.exponents();
  for (int i = 0; i < cfg.n(); ++i)
    g(i) = cfg.l(i) * sgnpow(y_err, a[i], cfg.clamp);
  return g;
}

double control_input(const ControllerConfig& cfg, const Vec& x_hat,
                     bool active_is_sigma0) {
  if (!active_is_sigma0) return 0.0;
  auto b = cfg.exponents();
  double u = 0.0;
  for (int i = 0; i < cfg.n(); ++i)
    u -= cfg.k(i) * sgnpow(x_hat(i), b[i], cfg.clamp);
  return u;
}

HybridSystem assemble_closed_loop(const LinearSwitchedPlant& plant,
                                  const ObserverConfig& obs,
                                  const ControllerConfig& ctrl,
                                  const SwitchLaw& law) {
  if (law.F != plant.sigma0)
    throw std::invalid_argument(
        "assemble_closed_loop: law F must equal sigma0");
  auto rep = ctrb_obsv_check(plant);
  if (!rep.sigma0_ok)
    throw std::invalid_argument(
        "assemble_closed_loop: sigma0 not controllable/observable");
  if (!obs.abar_hurwitz())
    throw std::invalid_argument("assemble_closed_loop: Abar not Hurwitz");
  if (!is_hurwitz_poly(ctrl.char_poly()))
    throw std::invalid_argument(
        "assemble_closed_loop: controller polynomial not Hurwitz");

  const int n = plant.dim();
  HybridSystem sys;
  sys.dimension = 2 * n;
  for (int m = 1; m <= plant.n_modes(); ++m) {
    const Mat A = plant.A[m - 1];
    const Vec B = plant.B[m - 1];
    const Vec C = plant.C[m - 1];
    const bool is_s0 = (m == plant.sigma0);
    sys.flows.push_back([A, B, C, obs, ctrl, is_s0, n](const Vec& z) -> Vec {
      Vec x = z.head(n), xh = z.tail(n);
      double u = control_input(ctrl, xh, is_s0);
      double y_err = C.dot(x - xh);
      Vec g = observer_step_term(obs, y_err, is_s0);
      Vec out(2 * n);
      out.head(n) = A * x + B * u;
      out.tail(n) = A * xh + g + B * u;
      return out;
    });
  }
  return sys;
}

}  // namespace fts
