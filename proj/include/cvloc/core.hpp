#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <utility>
#include <vector>

// Symplectic covariance-matrix algebra for N-mode Gaussian states.
//
// Conventions (fixed for the whole library):
//   * quadrature ordering is interleaved (x1, p1, ..., xN, pN)
//   * vacuum covariance matrix is the identity, so a physical CM has all
//     symplectic eigenvalues >= 1

namespace cvloc {

inline constexpr double kTolPhys = 1e-9;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Single-mode symplectic unit J = [[0,1],[-1,0]].
Eigen::Matrix2d symplectic_J();

/// Omega = J ⊕ J ⊕ ... ⊕ J (n_modes blocks).
Eigen::MatrixXd symplectic_form(int n_modes);

/// 2N x 2N real symmetric covariance matrix.
struct CovarianceMatrix {
  int n_modes = 0;
  Eigen::MatrixXd data;

  CovarianceMatrix() = default;

  /// Validates squareness, even dimension and symmetry (1e-12 relative).
  explicit CovarianceMatrix(Eigen::MatrixXd m);

  int dim() const { return 2 * n_modes; }
  Eigen::Block<const Eigen::MatrixXd> mode_block(int i, int j) const {
    return data.block(2 * i, 2 * j, 2, 2);
  }
};

struct TwoModeBlocks {
  Eigen::Matrix2d A;
  Eigen::Matrix2d B;
  Eigen::Matrix2d C;  // off-diagonal block, gamma = [[A, C], [C^T, B]]

  Eigen::Matrix4d assemble() const;
};

struct SymplecticEigs {
  std::vector<double> values;  // sorted descending

  double min() const { return values.back(); }
};

struct ValidityReport {
  bool symmetric = false;
  bool positive_semidefinite = false;
  bool physical = false;
  double min_symplectic_eig = 0.0;  // witness
};

/// Physicality check: gamma + i*Omega >= 0, i.e. gamma PSD and min nu >= 1.
ValidityReport validate_cm(const CovarianceMatrix& gamma);

/// {nu_i} from eig(Omega*gamma) = {±i nu_i}; throws NumericError if the
/// spectrum does not form conjugate imaginary pairs within tolerance.
SymplecticEigs symplectic_eigenvalues(const CovarianceMatrix& gamma);

/// Partial transpose of a two-mode CM: sign-flips the p quadrature of the
/// chosen mode (Lambda gamma Lambda^T).
CovarianceMatrix ptranspose_two_mode(const CovarianceMatrix& gamma_ab,
                                     int transposed_mode);

/// Symplectic eigenvalues (mu1, mu2), mu2 <= mu1, of the partially
/// transposed CM, from the invariants delta = detA + detB - 2 detC and
/// Delta = det gamma_AB.
std::pair<double, double> ptranspose_symplectic_eigs(const TwoModeBlocks& blocks);

TwoModeBlocks two_mode_blocks(const CovarianceMatrix& gamma_ab);

/// E_N = max(0, -log2 mu2) in e-bits. Throws ValidityError on unphysical input.
double log_negativity(const CovarianceMatrix& gamma_ab);

/// Same, but on a raw 4x4 matrix with no physicality gate (for use on
/// numerically conditioned states inside optimizers).
double log_negativity_unchecked(const Eigen::Matrix4d& gamma_ab);
std::pair<double, double> ptranspose_eigs_unchecked(const Eigen::Matrix4d& gamma_ab);

/// gamma -> S gamma S^T. Throws if S fails S Omega S^T = Omega to 1e-10.
CovarianceMatrix apply_symplectic(const CovarianceMatrix& gamma,
                                  const Eigen::MatrixXd& S);

/// Beam splitter between modes i and j:
///   x_i -> x_i cos(t) + x_j sin(t),  x_j -> x_i sin(t) - x_j cos(t)
/// (same for p). Involutive and symplectic.
Eigen::MatrixXd beam_splitter_matrix(double theta, int i, int j, int n_modes);

/// det P + det Q + Tr[P J Q^T J^T]; equals det(P+Q) for 2x2 P, Q.
double det_sum_2x2(const Eigen::Matrix2d& P, const Eigen::Matrix2d& Q);

}  // namespace cvloc
