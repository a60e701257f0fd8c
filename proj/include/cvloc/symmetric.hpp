#pragma once

#include "cvloc/core.hpp"

#include <optional>
#include <vector>

// Closed-form localizable entanglement for fully symmetric and bisymmetric
// N-mode Gaussian states, plus the beam-splitter-network reduction that
// block-diagonalizes them.

namespace cvloc {

enum class Quadrature { x, p };

/// Fully symmetric state: diagonal blocks beta = diag(b,b), off-diagonal
/// blocks eps = diag(eps1, eps2).
struct SymmetricStateParams {
  int n_modes = 3;  // >= 3
  double b = 1.0;   // >= 1
  double eps1 = 0.0;
  double eps2 = 0.0;
};

struct BisymmetricStateParams {
  int n_modes = 3;  // >= 3, modes A, B plus (N-2) C modes
  double b = 1.0;
  double alpha = 1.0;
  double eps1 = 0.0, eps2 = 0.0;
  double xi1 = 0.0, xi2 = 0.0;   // ignored for n_modes == 3
  Eigen::Matrix2d tau = Eigen::Matrix2d::Zero();
};

/// Builds the 2N x 2N CM; throws ValidityError (with witness) if unphysical.
CovarianceMatrix build_symmetric_cm(const SymmetricStateParams& p);
CovarianceMatrix build_bisymmetric_cm(const BisymmetricStateParams& p);

/// 1 + min_j 2 eps_j / (b + (N-3) eps_j).
double lambda_min(const SymmetricStateParams& p);

struct SymmetricResult {
  double mu2 = 0.0;
  double e_lg = 0.0;
  Quadrature optimal_quadrature = Quadrature::p;  // collective homodyne axis
};

/// mu2^2 = (b - eps1)(b - eps2) lambda_min; E_LG = max(0, -log2 mu2).
SymmetricResult symmetric_localizable(const SymmetricStateParams& p);

struct BisymResult {
  double mu2 = 0.0;
  double e_lg = 0.0;
  double lambda = 0.0;
};

/// lambda from the smallest root of min-eig D(lambda) = 0 in [0, lambda_pos],
/// falling back to lambda_pos (the no-measurement value) when D stays
/// positive definite on the whole bracket (e.g. tau = 0).
BisymResult bisymmetric_localizable(const BisymmetricStateParams& p);

struct BlockReport {
  Eigen::Matrix4d ac1_block;               // coupled A-C1 block
  std::vector<Eigen::Matrix2d> decoupled;  // B, C2, ..., C_{N-2}
  double max_residual_coupling = 0.0;
};

/// Applies U_AB = B_AB(pi/4) and the C-side beam-splitter array; verifies the
/// state decouples into the A-C1 block plus single-mode blocks.
BlockReport bs_network_reduce(const CovarianceMatrix& gamma);

/// Total symplectic matrix of the reducing network (exposed for tests).
Eigen::MatrixXd bs_network_matrix(int n_modes);

}  // namespace cvloc
