#pragma once

#include "cvloc/core.hpp"

// Conditioning of an N-mode Gaussian state on a Gaussian measurement of a
// single mode (Schur-complement update), plus the exact homodyne limit.
//
// theta convention: the measurement CM is U(theta) V(r) U^T(theta) with
// V(r) = diag(e^{2r}, e^{-2r}). The squeezed direction is
// u(theta) = (sin theta, cos theta), so r -> infinity at theta = 0 measures
// the p quadrature. condition_on_homodyne(theta) is the exact r -> infinity
// limit of condition_on_mode(r, theta).

namespace cvloc {

Eigen::Matrix2d rotation_matrix(double theta);   // U(theta)
Eigen::Matrix2d squeeze_matrix(double r);        // V(r) = diag(e^{2r}, e^{-2r})

/// Pure squeezed-state measurement CM, det = 1.
struct MeasurementCM {
  double r = 0.0;
  double theta = 0.0;

  Eigen::Matrix2d matrix() const;
};

inline Eigen::Matrix2d pure_measurement_cm(double r, double theta) {
  return MeasurementCM{r, theta}.matrix();
}

struct HomodyneSpec {
  double theta = 0.0;

  /// Unit vector of the measured quadrature direction.
  Eigen::Vector2d direction() const {
    return {std::sin(theta), std::cos(theta)};
  }
};

struct PartitionedCM {
  Eigen::MatrixXd kept;      // 2(N-1) x 2(N-1)
  Eigen::Matrix2d measured;  // 2 x 2
  Eigen::MatrixXd cross;     // 2(N-1) x 2
};

PartitionedCM partition_measured_mode(const CovarianceMatrix& gamma, int mode);

/// Projection of `mode` onto the pure squeezed state m. Evaluated in the
/// rotated frame of m so it stays accurate at large r.
CovarianceMatrix condition_on_mode(const CovarianceMatrix& gamma, int mode,
                                   const MeasurementCM& m);

/// General (possibly mixed, det >= 1) Gaussian measurement CM.
CovarianceMatrix condition_on_mode(const CovarianceMatrix& gamma, int mode,
                                   const Eigen::Matrix2d& m);

/// Exact r -> infinity limit: rank-1 pseudo-inverse update along u(theta).
CovarianceMatrix condition_on_homodyne(const CovarianceMatrix& gamma, int mode,
                                       const HomodyneSpec& h);

/// Local symplectic on `mode` bringing its 2x2 block to c * identity,
/// c = sqrt(det block). Returns the transformed CM and c.
std::pair<CovarianceMatrix, double> standardize_measured_mode(
    const CovarianceMatrix& gamma, int mode);

}  // namespace cvloc
