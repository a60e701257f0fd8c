#include "cvloc/measurement.hpp"

#include <cmath>

namespace cvloc {

Eigen::Matrix2d rotation_matrix(double theta) {
  Eigen::Matrix2d U;
  const double c = std::cos(theta), s = std::sin(theta);
  U << c, s, -s, c;
  return U;
}

Eigen::Matrix2d squeeze_matrix(double r) {
  Eigen::Matrix2d V = Eigen::Matrix2d::Zero();
  V(0, 0) = std::exp(2 * r);
  V(1, 1) = std::exp(-2 * r);
  return V;
}

Eigen::Matrix2d MeasurementCM::matrix() const {
  const Eigen::Matrix2d U = rotation_matrix(theta);
  return U * squeeze_matrix(r) * U.transpose();
}

PartitionedCM partition_measured_mode(const CovarianceMatrix& gamma, int mode) {
  const int N = gamma.n_modes;
  if (mode < 0 || mode >= N)
    throw DimensionError("partition_measured_mode: mode index out of range");
  if (N < 2)
    throw DimensionError("partition_measured_mode: need at least two modes");
  PartitionedCM p;
  p.kept.resize(2 * (N - 1), 2 * (N - 1));
  p.cross.resize(2 * (N - 1), 2);
  p.measured = gamma.mode_block(mode, mode);
  int r = 0;
  for (int i = 0; i < N; ++i) {
    if (i == mode) continue;
    p.cross.block<2, 2>(2 * r, 0) = gamma.mode_block(i, mode);
    int c = 0;
    for (int j = 0; j < N; ++j) {
      if (j == mode) continue;
      p.kept.block<2, 2>(2 * r, 2 * c) = gamma.mode_block(i, j);
      ++c;
    }
    ++r;
  }
  return p;
}

namespace {

CovarianceMatrix schur_update(const PartitionedCM& p, const Eigen::Matrix2d& inv) {
  Eigen::MatrixXd out = p.kept - p.cross * inv * p.cross.transpose();
  return CovarianceMatrix(std::move(out));
}

}  // namespace

CovarianceMatrix condition_on_mode(const CovarianceMatrix& gamma, int mode,
                                   const MeasurementCM& m) {
  const PartitionedCM p = partition_measured_mode(gamma, mode);
  // (measured + U V U^T)^{-1} = U (M + V)^{-1} U^T with M = U^T measured U.
  // Assembled term by term so no e^{2r}-sized cancellation occurs.
  const Eigen::Matrix2d U = rotation_matrix(m.theta);
  const Eigen::Matrix2d M = U.transpose() * p.measured * U;
  const double E = std::exp(2 * m.r), e = std::exp(-2 * m.r);
  const double det = (M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0)) + M(0, 0) * e +
                     M(1, 1) * E + 1.0;
  if (!(det > 0) || !std::isfinite(det))
    throw NumericError("condition_on_mode: singular measured block");
  Eigen::Matrix2d inv;
  inv << M(1, 1) + e, -M(0, 1), -M(1, 0), M(0, 0) + E;
  inv /= det;
  return schur_update(p, U * inv * U.transpose());
}

CovarianceMatrix condition_on_mode(const CovarianceMatrix& gamma, int mode,
                                   const Eigen::Matrix2d& m) {
  const PartitionedCM p = partition_measured_mode(gamma, mode);
  const Eigen::Matrix2d sum = p.measured + m;
  const double det = sum.determinant();
  if (std::abs(det) < 1e-12 * std::max(1.0, sum.cwiseAbs().maxCoeff()))
    throw NumericError("condition_on_mode: measured block + m singular");
  return schur_update(p, sum.inverse());
}

CovarianceMatrix condition_on_homodyne(const CovarianceMatrix& gamma, int mode,
                                       const HomodyneSpec& h) {
  const PartitionedCM p = partition_measured_mode(gamma, mode);
  const Eigen::Vector2d u = h.direction();
  const double var = u.dot(p.measured * u);
  if (var <= 0)
    throw NumericError("condition_on_homodyne: measured quadrature variance is zero");
  const Eigen::MatrixXd cu = p.cross * u;
  Eigen::MatrixXd out = p.kept - (cu * cu.transpose()) / var;
  return CovarianceMatrix(std::move(out));
}

std::pair<CovarianceMatrix, double> standardize_measured_mode(
    const CovarianceMatrix& gamma, int mode) {
  const Eigen::Matrix2d blk = gamma.mode_block(mode, mode);
  const double det = blk.determinant();
  if (det < 1.0 - kTolPhys)
    throw ValidityError("standardize_measured_mode: det of mode block < 1");
  const double c = std::sqrt(det);
  // S = (blk/c)^{-1/2}: symmetric with det 1, hence symplectic on one mode.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(blk / c);
  const Eigen::Matrix2d S = es.operatorInverseSqrt();
  Eigen::MatrixXd full = Eigen::MatrixXd::Identity(gamma.dim(), gamma.dim());
  full.block<2, 2>(2 * mode, 2 * mode) = S;
  return {apply_symplectic(gamma, full), c};
}

}  // namespace cvloc
