#include "cvloc/core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace cvloc {

Eigen::Matrix2d symplectic_J() {
  Eigen::Matrix2d J;
  J << 0, 1, -1, 0;
  return J;
}

Eigen::MatrixXd symplectic_form(int n_modes) {
  if (n_modes < 1) throw DimensionError("symplectic_form: n_modes must be positive");
  Eigen::MatrixXd O = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) O.block<2, 2>(2 * i, 2 * i) = symplectic_J();
  return O;
}

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd m) {
  if (m.rows() != m.cols())
    throw DimensionError("CovarianceMatrix: matrix must be square");
  if (m.rows() % 2 != 0 || m.rows() == 0)
    throw DimensionError("CovarianceMatrix: dimension must be even and positive");
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j) {
      const double tol = 1e-12 * std::max(1.0, std::abs(m(i, j)));
      if (std::abs(m(i, j) - m(j, i)) > tol)
        throw ShapeError("CovarianceMatrix: matrix not symmetric at (" +
                         std::to_string(i) + "," + std::to_string(j) + ")");
    }
  n_modes = static_cast<int>(m.rows()) / 2;
  data = std::move(m);
  // exact symmetrization so downstream eigensolves see a symmetric matrix
  data = ((data + data.transpose()) / 2).eval();
}

Eigen::Matrix4d TwoModeBlocks::assemble() const {
  Eigen::Matrix4d g;
  g.block<2, 2>(0, 0) = A;
  g.block<2, 2>(0, 2) = C;
  g.block<2, 2>(2, 0) = C.transpose();
  g.block<2, 2>(2, 2) = B;
  return g;
}

SymplecticEigs symplectic_eigenvalues(const CovarianceMatrix& gamma) {
  const int N = gamma.n_modes;

  // Positive-definite input: Williamson route. The singular values of the
  // skew-symmetric L^T Omega L (gamma = L L^T) are the symplectic eigenvalues,
  // each twice. This stays accurate for degenerate spectra, where the general
  // eigensolver on Omega*gamma loses ~sqrt(eps) of precision.
  Eigen::LLT<Eigen::MatrixXd> llt(gamma.data);
  if (llt.info() == Eigen::Success) {
    const Eigen::MatrixXd L = llt.matrixL();
    const Eigen::MatrixXd K = L.transpose() * symplectic_form(N) * L;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(K);
    const Eigen::VectorXd& sv = svd.singularValues();  // descending
    SymplecticEigs out;
    out.values.resize(N);
    for (int i = 0; i < N; ++i) {
      const double a = sv(2 * i), b = sv(2 * i + 1);
      if (std::abs(a - b) > 1e-8 * std::max(1.0, a))
        throw NumericError("symplectic_eigenvalues: unpaired singular values");
      out.values[i] = (a + b) / 2;
    }
    return out;
  }

  // Indefinite (unphysical) input: fall back to the spectrum of Omega*gamma
  // so callers still get a witness or a NumericError to catch.
  Eigen::MatrixXd M = symplectic_form(N) * gamma.data;
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericError("symplectic_eigenvalues: eigensolver failed");
  std::vector<double> pos, neg;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  for (int i = 0; i < 2 * N; ++i) {
    const std::complex<double> ev = es.eigenvalues()(i);
    if (std::abs(ev.real()) > 1e-8 * scale)
      throw NumericError("symplectic_eigenvalues: eigenvalue with large real part");
    (ev.imag() >= 0 ? pos : neg).push_back(std::abs(ev.imag()));
  }
  if (pos.size() != neg.size())
    throw NumericError("symplectic_eigenvalues: unpaired spectrum");
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end(), std::greater<>());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const double tol = 1e-10 * std::max(1.0, pos[i]);
    if (std::abs(pos[i] - neg[i]) > tol)
      throw NumericError("symplectic_eigenvalues: conjugate pairing failed");
  }
  SymplecticEigs out;
  out.values.resize(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i)
    out.values[i] = (pos[i] + neg[i]) / 2;
  return out;
}

ValidityReport validate_cm(const CovarianceMatrix& gamma) {
  ValidityReport rep;
  rep.symmetric = true;  // guaranteed by construction
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma.data,
                                                    Eigen::EigenvaluesOnly);
  rep.positive_semidefinite = es.eigenvalues().minCoeff() >= -kTolPhys;
  try {
    rep.min_symplectic_eig = symplectic_eigenvalues(gamma).min();
  } catch (const NumericError&) {
    // Omega*gamma spectrum is not imaginary pairs; only happens for
    // indefinite gamma, which the PSD flag already witnesses.
    rep.min_symplectic_eig = es.eigenvalues().minCoeff();
    rep.physical = false;
    return rep;
  }
  rep.physical =
      rep.positive_semidefinite && rep.min_symplectic_eig >= 1.0 - kTolPhys;
  return rep;
}

CovarianceMatrix ptranspose_two_mode(const CovarianceMatrix& gamma_ab,
                                     int transposed_mode) {
  if (gamma_ab.n_modes != 2)
    throw DimensionError("ptranspose_two_mode: expected a 4x4 two-mode CM");
  if (transposed_mode < 0 || transposed_mode > 1)
    throw DimensionError("ptranspose_two_mode: mode index out of range");
  Eigen::MatrixXd g = gamma_ab.data;
  const int p = 2 * transposed_mode + 1;
  g.row(p) *= -1;
  g.col(p) *= -1;
  return CovarianceMatrix(std::move(g));
}

TwoModeBlocks two_mode_blocks(const CovarianceMatrix& gamma_ab) {
  if (gamma_ab.n_modes != 2)
    throw DimensionError("two_mode_blocks: expected a 4x4 two-mode CM");
  TwoModeBlocks b;
  b.A = gamma_ab.mode_block(0, 0);
  b.B = gamma_ab.mode_block(1, 1);
  b.C = gamma_ab.mode_block(0, 1);
  return b;
}

std::pair<double, double> ptranspose_eigs_unchecked(const Eigen::Matrix4d& g) {
  const double detA = g.block<2, 2>(0, 0).determinant();
  const double detB = g.block<2, 2>(2, 2).determinant();
  const double detC = g.block<2, 2>(0, 2).determinant();
  const double delta = detA + detB - 2 * detC;
  const double Delta = g.determinant();
  double disc = delta * delta - 4 * Delta;
  const double scale = std::max({1.0, delta * delta, 4 * std::abs(Delta)});
  if (disc < 0) {
    if (disc < -1e-10 * scale)
      throw NumericError("ptranspose_symplectic_eigs: negative discriminant");
    disc = 0;  // degenerate mu1 = mu2 hit round-off
  }
  const double s = std::sqrt(disc);
  const double mu1 = std::sqrt(std::max(0.0, (delta + s) / 2));
  const double mu2 = std::sqrt(std::max(0.0, (delta - s) / 2));
  return {mu1, mu2};
}

std::pair<double, double> ptranspose_symplectic_eigs(const TwoModeBlocks& blocks) {
  return ptranspose_eigs_unchecked(blocks.assemble());
}

double log_negativity_unchecked(const Eigen::Matrix4d& gamma_ab) {
  const double mu2 = ptranspose_eigs_unchecked(gamma_ab).second;
  if (mu2 <= 0)
    throw NumericError("log_negativity: vanishing symplectic eigenvalue");
  return std::max(0.0, -std::log2(mu2));
}

double log_negativity(const CovarianceMatrix& gamma_ab) {
  if (gamma_ab.n_modes != 2)
    throw DimensionError("log_negativity: expected a 4x4 two-mode CM");
  const ValidityReport rep = validate_cm(gamma_ab);
  if (!rep.physical)
    throw ValidityError("log_negativity: unphysical CM, min nu = " +
                        std::to_string(rep.min_symplectic_eig));
  return log_negativity_unchecked(gamma_ab.data);
}

CovarianceMatrix apply_symplectic(const CovarianceMatrix& gamma,
                                  const Eigen::MatrixXd& S) {
  if (S.rows() != gamma.dim() || S.cols() != gamma.dim())
    throw DimensionError("apply_symplectic: dimension mismatch");
  const Eigen::MatrixXd O = symplectic_form(gamma.n_modes);
  if ((S * O * S.transpose() - O).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("apply_symplectic: S is not symplectic");
  return CovarianceMatrix(S * gamma.data * S.transpose());
}

Eigen::MatrixXd beam_splitter_matrix(double theta, int i, int j, int n_modes) {
  if (i == j) throw std::invalid_argument("beam_splitter_matrix: i == j");
  if (i < 0 || j < 0 || i >= n_modes || j >= n_modes)
    throw std::invalid_argument("beam_splitter_matrix: mode index out of range");
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  const double c = std::cos(theta), s = std::sin(theta);
  const Eigen::Matrix2d I2 = Eigen::Matrix2d::Identity();
  S.block<2, 2>(2 * i, 2 * i) = c * I2;
  S.block<2, 2>(2 * i, 2 * j) = s * I2;
  S.block<2, 2>(2 * j, 2 * i) = s * I2;
  S.block<2, 2>(2 * j, 2 * j) = -c * I2;
  return S;
}

double det_sum_2x2(const Eigen::Matrix2d& P, const Eigen::Matrix2d& Q) {
  const Eigen::Matrix2d J = symplectic_J();
  return P.determinant() + Q.determinant() +
         (P * J * Q.transpose() * J.transpose()).trace();
}

}  // namespace cvloc
