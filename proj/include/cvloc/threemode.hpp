#pragma once

#include "cvloc/core.hpp"
#include "cvloc/measurement.hpp"

#include <array>
#include <vector>

// Optimal Gaussian measurement on mode C of a generic three-mode mixed state:
// closed-form symplectic invariants of the conditioned state, 2-D numeric
// optimization over (r, theta), the homodyne quartic, and the isotropic-state
// analytic path.

namespace cvloc {

/// Three-mode state with the C block in standard form c * identity.
struct ThreeModeState {
  CovarianceMatrix gamma;  // 6x6
  double c = 1.0;

  static ThreeModeState standardized_from(const CovarianceMatrix& gamma_abc);

  Eigen::Matrix2d A() const { return gamma.mode_block(0, 0); }
  Eigen::Matrix2d B() const { return gamma.mode_block(1, 1); }
  Eigen::Matrix2d D() const { return gamma.mode_block(0, 1); }
  Eigen::Matrix2d E() const { return gamma.mode_block(0, 2); }
  Eigen::Matrix2d F() const { return gamma.mode_block(1, 2); }
  Eigen::Matrix2d Cblk() const { return gamma.mode_block(2, 2); }
};

struct ChiMatrix {
  Eigen::Matrix2d chi;
  double chi1 = 0.0;  // chi12 + chi21
  double chi2 = 0.0;  // chi22 - chi11
  double norm = 0.0;  // sqrt(chi1^2 + chi2^2)
};

/// chi = 2 E^T J^T D J F - E^T J^T A J E - F^T J^T B J F.
ChiMatrix chi_matrix(const ThreeModeState& s);

struct GammaCBlock {
  Eigen::Matrix2d gamma_c;  // C block of gamma_ABC^{-1}
  double g1 = 0.0;
  double g2 = 0.0;
};

GammaCBlock gamma_c_block(const ThreeModeState& s);

/// Symplectic invariant delta of the conditioned AB state, closed form.
double invariant_delta(const ThreeModeState& s, const ChiMatrix& x, double r,
                       double theta);

/// Symplectic invariant Delta = det of the conditioned AB CM, closed form.
double invariant_Delta(const ThreeModeState& s, const GammaCBlock& g, double r,
                       double theta);

/// f = 2 mu2^2 = delta - sqrt(delta^2 - 4 Delta), clamped discriminant.
double objective_f(const ThreeModeState& s, double r, double theta);

enum class Strategy { interior, homodyne, coherent };

struct OptResult {
  double r = 0.0;
  double theta = 0.0;
  double mu2 = 0.0;
  double e_lg = 0.0;
  Strategy tag = Strategy::interior;
};

/// Global minimum of f over r in [0, inf), theta in [0, pi): 64x64 grid in
/// (y = tanh r, theta) + coordinate golden-section refinement, with explicit
/// homodyne and coherent boundary candidates. Ties within 1e-9 prefer the
/// boundary tag.
OptResult optimize_gaussian(const CovarianceMatrix& gamma_abc);

struct QuarticCoefficients {
  std::array<double, 5> coeff{};  // coeff[i] multiplies x^i
  double u = 0.0, v = 0.0, I = 0.0;
};

QuarticCoefficients homodyne_quartic_coeffs(const ThreeModeState& s,
                                            const ChiMatrix& x,
                                            const GammaCBlock& g);

struct HomodyneResult {
  double theta = 0.0;
  double mu2 = 0.0;
  double e = 0.0;
  bool degenerate = false;  // objective independent of theta
};

/// Homodyne invariants at phase theta (the r -> infinity limit).
std::pair<double, double> homodyne_invariants(const ThreeModeState& s,
                                              const ChiMatrix& x,
                                              const GammaCBlock& g,
                                              double theta);

/// Optimal homodyne phase from the real roots of the quartic in x = tan(theta)
/// plus the theta = pi/2 candidate.
HomodyneResult optimal_homodyne(const ThreeModeState& s);

struct IsotropyReport {
  bool is_isotropic = false;
  double nu = 0.0;
  Eigen::MatrixXd gamma_p;  // gamma / nu when isotropic
};

/// gamma = nu * gamma_p with gamma_p pure: all symplectic eigenvalues equal
/// within 1e-8 and (Omega gamma_p)^2 = -1 within 1e-8.
IsotropyReport isotropic_check(const CovarianceMatrix& gamma_abc);

/// Analytic optimum for an isotropic state: optimal phase from chi, optimal
/// squeezing among the real roots of the q-quartic in y = tanh r plus the
/// y = 0 and homodyne candidates.
OptResult isotropic_optimal(const ThreeModeState& s, double nu);

/// Real roots of sum_i c[i] x^i (degree <= 4) via companion-matrix
/// eigenvalues; near-zero leading coefficients are dropped.
std::vector<double> real_quartic_roots(const std::array<double, 5>& c);

}  // namespace cvloc
