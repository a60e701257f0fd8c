#include "cvloc/threemode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cvloc {

namespace {

constexpr double kPi = 3.14159265358979323846;

double atanh_clamped(double y) {
  return std::atanh(std::min(y, 1.0 - 1e-16));
}

double clamp_f(double delta, double Delta) {
  double disc = delta * delta - 4 * Delta;
  const double scale = std::max({1.0, delta * delta, 4 * std::abs(Delta)});
  if (disc < -1e-9 * scale)
    throw NumericError("objective_f: negative discriminant");
  if (disc < 0) disc = 0;
  return delta - std::sqrt(disc);
}

double mu2_from_f(double f) { return std::sqrt(std::max(f, 0.0) / 2); }

double elg_from_mu2(double mu2) {
  return mu2 > 0 ? std::max(0.0, -std::log2(mu2))
                 : std::numeric_limits<double>::infinity();
}

}  // namespace

ThreeModeState ThreeModeState::standardized_from(const CovarianceMatrix& g) {
  if (g.n_modes != 3)
    throw DimensionError("ThreeModeState: expected a 6x6 three-mode CM");
  const ValidityReport rep = validate_cm(g);
  if (!rep.physical)
    throw ValidityError("ThreeModeState: unphysical CM, min nu = " +
                        std::to_string(rep.min_symplectic_eig));
  auto [std_cm, c] = standardize_measured_mode(g, 2);
  ThreeModeState s;
  s.gamma = std::move(std_cm);
  s.c = c;
  return s;
}

ChiMatrix chi_matrix(const ThreeModeState& s) {
  const Eigen::Matrix2d J = symplectic_J();
  const Eigen::Matrix2d E = s.E(), F = s.F();
  ChiMatrix x;
  x.chi = 2.0 * E.transpose() * J.transpose() * s.D() * J * F -
          E.transpose() * J.transpose() * s.A() * J * E -
          F.transpose() * J.transpose() * s.B() * J * F;
  x.chi1 = x.chi(0, 1) + x.chi(1, 0);
  x.chi2 = x.chi(1, 1) - x.chi(0, 0);
  x.norm = std::hypot(x.chi1, x.chi2);
  return x;
}

GammaCBlock gamma_c_block(const ThreeModeState& s) {
  GammaCBlock g;
  const Eigen::MatrixXd inv = s.gamma.data.inverse();
  g.gamma_c = inv.block<2, 2>(4, 4);
  g.gamma_c = ((g.gamma_c + g.gamma_c.transpose()) / 2).eval();
  g.g1 = g.gamma_c(0, 1) + g.gamma_c(1, 0);
  g.g2 = g.gamma_c(1, 1) - g.gamma_c(0, 0);
  return g;
}

double invariant_delta(const ThreeModeState& s, const ChiMatrix& x, double r,
                       double theta) {
  const double I = s.A().determinant() + s.B().determinant() -
                   2 * s.D().determinant();
  const double dEF = s.E().determinant() - s.F().determinant();
  const double ch = std::cosh(2 * r), sh = std::sinh(2 * r);
  const double den = 1 + s.c * s.c + 2 * s.c * ch;
  return I + (dEF * dEF + (s.c + ch) * x.chi.trace() +
              sh * (x.chi1 * std::sin(2 * theta) + x.chi2 * std::cos(2 * theta))) /
                 den;
}

double invariant_Delta(const ThreeModeState& s, const GammaCBlock& g, double r,
                       double theta) {
  const double detg = s.gamma.data.determinant();
  const double ch = std::cosh(2 * r), sh = std::sinh(2 * r);
  const double den = 1 + s.c * s.c + 2 * s.c * ch;
  return detg *
         (1 + g.gamma_c.determinant() + ch * g.gamma_c.trace() -
          sh * (g.g1 * std::sin(2 * theta) + g.g2 * std::cos(2 * theta))) /
         den;
}

double objective_f(const ThreeModeState& s, double r, double theta) {
  const ChiMatrix x = chi_matrix(s);
  const GammaCBlock g = gamma_c_block(s);
  return clamp_f(invariant_delta(s, x, r, theta), invariant_Delta(s, g, r, theta));
}

namespace {

// precomputed evaluation context for the optimizer
struct FContext {
  const ThreeModeState& s;
  ChiMatrix x;
  GammaCBlock g;

  explicit FContext(const ThreeModeState& state)
      : s(state), x(chi_matrix(state)), g(gamma_c_block(state)) {}

  double f(double y, double theta) const {
    const double r = atanh_clamped(y);
    return clamp_f(invariant_delta(s, x, r, theta),
                   invariant_Delta(s, g, r, theta));
  }
};

// golden-section minimization of a 1-D slice
template <typename Fn>
double golden_min(Fn fn, double a, double b, double* xbest, double tol = 1e-12) {
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = fn(d);
    }
  }
  *xbest = (a + b) / 2;
  return fn(*xbest);
}

}  // namespace

std::pair<double, double> homodyne_invariants(const ThreeModeState& s,
                                              const ChiMatrix& x,
                                              const GammaCBlock& g,
                                              double theta) {
  const Eigen::Matrix2d U = rotation_matrix(theta);
  const Eigen::Matrix2d chit = U.transpose() * x.chi * U;
  const Eigen::Matrix2d gct = U.transpose() * g.gamma_c * U;
  const double I = s.A().determinant() + s.B().determinant() -
                   2 * s.D().determinant();
  const double delta = I + chit(1, 1) / s.c;
  const double Delta = s.gamma.data.determinant() * gct(0, 0) / s.c;
  return {delta, Delta};
}

QuarticCoefficients homodyne_quartic_coeffs(const ThreeModeState& s,
                                            const ChiMatrix& x,
                                            const GammaCBlock& g) {
  QuarticCoefficients q;
  q.I = s.A().determinant() + s.B().determinant() - 2 * s.D().determinant();
  q.u = x.chi(0, 0) + s.c * q.I;
  q.v = x.chi(1, 1) + s.c * q.I;
  const double c = s.c, dg = s.gamma.data.determinant();
  const double chi1 = x.chi1, chi2 = x.chi2;
  const double g1 = g.g1, g2 = g.g2;
  const double G11 = g.gamma_c(0, 0), G22 = g.gamma_c(1, 1);
  const double trG = g.gamma_c.trace();
  q.coeff[4] = G22 * chi1 * chi1 + chi1 * g1 * q.u + c * g1 * g1 * dg;
  q.coeff[3] = 2 * chi1 * g2 * q.u + 2 * chi2 * g1 * q.u +
               4 * G22 * chi1 * chi2 + 4 * c * g1 * g2 * dg;
  q.coeff[2] = 4 * G22 * chi2 * chi2 - chi1 * chi1 * trG + 4 * chi2 * g2 * q.u -
               chi1 * g1 * (q.u + q.v) + 2 * c * (2 * g2 * g2 - g1 * g1) * dg;
  q.coeff[1] = -4 * G11 * chi1 * chi2 - 2 * q.v * (chi2 * g1 + chi1 * g2) -
               4 * c * g1 * g2 * dg;
  q.coeff[0] = G11 * chi1 * chi1 + chi1 * g1 * q.v + c * g1 * g1 * dg;
  return q;
}

std::vector<double> real_quartic_roots(const std::array<double, 5>& c) {
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  std::vector<double> roots;
  if (scale == 0.0) return roots;
  int deg = 4;
  while (deg > 0 && std::abs(c[deg]) < 1e-14 * scale) --deg;
  if (deg == 0) return roots;
  if (deg == 1) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int j = 0; j < deg; ++j) comp(0, j) = -c[deg - 1 - j] / c[deg];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  for (int i = 0; i < deg; ++i) {
    const std::complex<double> ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) < 1e-8 * std::max(1.0, std::abs(ev)))
      roots.push_back(ev.real());
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

HomodyneResult optimal_homodyne(const ThreeModeState& s) {
  const ChiMatrix x = chi_matrix(s);
  const GammaCBlock g = gamma_c_block(s);
  const QuarticCoefficients q = homodyne_quartic_coeffs(s, x, g);
  HomodyneResult res;
  double scale = 0.0;
  for (double v : q.coeff) scale = std::max(scale, std::abs(v));
  const double ref = std::max(1.0, std::abs(s.gamma.data.determinant()));
  auto mu2_at = [&](double theta) {
    auto [d, D] = homodyne_invariants(s, x, g, theta);
    return mu2_from_f(clamp_f(d, D));
  };
  if (scale <= 1e-12 * ref) {
    res.degenerate = true;
    res.theta = 0.0;
    res.mu2 = mu2_at(0.0);
    res.e = elg_from_mu2(res.mu2);
    return res;
  }
  std::vector<double> cands;
  for (double root : real_quartic_roots(q.coeff)) {
    double th = std::atan(root);
    if (th < 0) th += kPi;
    cands.push_back(th);
  }
  cands.push_back(kPi / 2);  // the x -> infinity limit
  res.mu2 = std::numeric_limits<double>::infinity();
  for (double th : cands) {
    const double m = mu2_at(th);
    if (m < res.mu2) {
      res.mu2 = m;
      res.theta = th;
    }
  }
  res.e = elg_from_mu2(res.mu2);
  return res;
}

OptResult optimize_gaussian(const CovarianceMatrix& gamma_abc) {
  const ThreeModeState s = ThreeModeState::standardized_from(gamma_abc);
  const FContext ctx(s);

  // interior: coarse grid in (y, theta), then coordinate golden refinement
  const int ny = 64, nth = 64;
  double best_f = std::numeric_limits<double>::infinity();
  double best_y = 0, best_th = 0;
  for (int i = 0; i < ny; ++i) {
    const double y = double(i) / ny;
    for (int j = 0; j < nth; ++j) {
      const double th = kPi * j / nth;
      const double f = ctx.f(y, th);
      if (f < best_f) {
        best_f = f;
        best_y = y;
        best_th = th;
      }
    }
  }
  const double dy = 1.0 / ny, dth = kPi / nth;
  double y = best_y, th = best_th;
  for (int round = 0; round < 6; ++round) {
    const double prev = best_f;
    best_f = golden_min([&](double yy) { return ctx.f(yy, th); },
                        std::max(0.0, y - dy), std::min(1.0 - 1e-12, y + dy), &y);
    best_f = golden_min([&](double tt) { return ctx.f(y, tt); }, th - dth,
                        th + dth, &th);
    if (prev - best_f < 1e-12 * std::max(1.0, prev)) break;
  }
  OptResult res;
  res.tag = Strategy::interior;
  res.r = atanh_clamped(y);
  res.theta = std::fmod(std::fmod(th, kPi) + kPi, kPi);
  double f_best = best_f;

  // boundary candidate: homodyne over a theta refinement of the exact limit
  {
    auto mu2_hom = [&](double theta) {
      const CovarianceMatrix gab =
          condition_on_homodyne(s.gamma, 2, HomodyneSpec{theta});
      return ptranspose_eigs_unchecked(gab.data).second;
    };
    double bth = 0;
    double bmu = std::numeric_limits<double>::infinity();
    const int n = 512;
    for (int j = 0; j <= n; ++j) {
      const double t = kPi * j / n;
      const double m = mu2_hom(t);
      if (m < bmu) {
        bmu = m;
        bth = t;
      }
    }
    double tref;
    golden_min(mu2_hom, bth - kPi / n, bth + kPi / n, &tref);
    const double f_hom = 2 * mu2_hom(tref) * mu2_hom(tref);
    if (f_hom < f_best + 1e-9) {  // ties prefer the boundary
      f_best = std::min(f_best, f_hom);
      res.tag = Strategy::homodyne;
      res.r = std::numeric_limits<double>::infinity();
      res.theta = std::fmod(std::fmod(tref, kPi) + kPi, kPi);
    }
  }

  // boundary candidate: coherent projection (r = 0, theta irrelevant)
  {
    const double f_coh = ctx.f(0.0, 0.0);
    if (f_coh < f_best + 1e-9) {
      f_best = std::min(f_best, f_coh);
      res.tag = Strategy::coherent;
      res.r = 0.0;
      res.theta = 0.0;
    }
  }

  res.mu2 = mu2_from_f(f_best);
  res.e_lg = elg_from_mu2(res.mu2);
  return res;
}

IsotropyReport isotropic_check(const CovarianceMatrix& gamma_abc) {
  IsotropyReport rep;
  if (gamma_abc.n_modes != 3) return rep;
  SymplecticEigs eigs;
  try {
    eigs = symplectic_eigenvalues(gamma_abc);
  } catch (const NumericError&) {
    return rep;
  }
  const double nu = eigs.values.front();
  for (double v : eigs.values)
    if (std::abs(v - nu) > 1e-8 * std::max(1.0, nu)) return rep;
  const Eigen::MatrixXd gp = gamma_abc.data / nu;
  const Eigen::MatrixXd Og = symplectic_form(3) * gp;
  if ((Og * Og + Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() > 1e-8)
    return rep;
  rep.is_isotropic = true;
  rep.nu = nu;
  rep.gamma_p = gp;
  return rep;
}

OptResult isotropic_optimal(const ThreeModeState& s, double nu) {
  const FContext ctx(s);
  const ChiMatrix& x = ctx.x;
  const double c = s.c;
  const double I = s.A().determinant() + s.B().determinant() -
                   2 * s.D().determinant();
  const double dEF2 = std::pow(s.E().determinant() - s.F().determinant(), 2);

  double theta = 0.0;
  const bool chi_degenerate = x.norm <= 1e-12 * std::max(1.0, x.chi.cwiseAbs().maxCoeff());
  if (!chi_degenerate) {
    // sin(2 theta) = chi1/|chi|, cos(2 theta) = chi2/|chi|
    theta = 0.5 * std::atan2(x.chi1, x.chi2);
    if (theta < 0) theta += kPi;
  }

  // q-quartic in y = tanh r
  const double nrm = x.norm, trchi = x.chi.trace();
  const double ap = nu * nu * (nu * nu + c) * (nu * nu + c);
  const double am = -nu * nu * (nu * nu - c) * (nu * nu - c);
  const double bp = (1 + c) * (1 + c);
  const double bm = -(1 - c) * (1 - c);
  const double dp = (1 + c) * (1 + c) * I + dEF2 + (1 + c) * trchi;
  const double dm = -(1 - c) * (1 - c) * I - dEF2 + (1 - c) * trchi;
  std::array<double, 5> q{};
  q[4] = nrm * nrm * bm * am;
  q[3] = nrm * (2 * am * bm * dp - (ap * bm + am * bp) * dm);
  q[2] = (am * bp - ap * bm) * (am * bp - ap * bm) -
         nrm * nrm * (am * bp + ap * bm) +
         (dm * ap - dp * am) * (dm * bp - dp * bm);
  q[1] = nrm * (2 * ap * bp * dm - (ap * bm + am * bp) * dp);
  q[0] = nrm * nrm * bp * ap;

  struct Cand {
    double y;
    Strategy tag;
  };
  std::vector<Cand> cands{{0.0, Strategy::coherent}};
  for (double root : real_quartic_roots(q))
    if (root > 1e-14 && root < 1.0) cands.push_back({root, Strategy::interior});

  OptResult res;
  double f_best = std::numeric_limits<double>::infinity();
  for (const Cand& cand : cands) {
    const double f = ctx.f(cand.y, theta);
    if (f < f_best) {
      f_best = f;
      res.tag = cand.tag;
      res.r = atanh_clamped(cand.y);
    }
  }
  // homodyne candidate via the closed-form limit
  {
    const double dmin = I + (trchi + nrm) / (2 * c);
    const double f_hom = clamp_f(dmin, nu * nu * nu * nu);
    if (f_hom < f_best + 1e-9) {  // ties prefer the boundary
      f_best = std::min(f_best, f_hom);
      res.tag = Strategy::homodyne;
      res.r = std::numeric_limits<double>::infinity();
    }
  }
  res.theta = theta;
  res.mu2 = mu2_from_f(f_best);
  res.e_lg = elg_from_mu2(res.mu2);
  return res;
}

}  // namespace cvloc
