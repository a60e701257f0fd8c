#pragma once

#include <Eigen/Dense>

#include <vector>

// Truncated Fock-space model of entanglement localization with an imperfect
// single-photon detector: TMSV split between mode B and the detector arm,
// vacuum in A, balanced beam splitter on (A, B), click/no-click detection.

namespace cvloc {

struct SPDParams {
  double lambda = 0.0;  // TMSV squeezing, in [0, 1)
  double eta = 1.0;     // detector efficiency, in [0, 1]
  int n_max = 40;       // photon-number cutoff per mode
};

void validate_spd_params(const SPDParams& p);

/// |psi_n> = 2^{-n/2} sum_k sqrt(C(n,k)) |k, n-k>; returns the amplitudes
/// over k = 0..n.
std::vector<double> psi_n_state(int n);

/// p1 = lambda^2 eta^2 / (1 - lambda^2 (1 - eta^2)).
double click_probability(const SPDParams& p);

/// Two-mode density matrix in the number basis, truncated per mode.
struct FockDensityMatrix {
  int n_max = 0;
  Eigen::MatrixXd rho;         // (n_max+1)^2 square, row index i*(n_max+1)+j
  double trace_deficit = 0.0;  // 1 - trace (mass beyond truncation)

  int dim() const { return (n_max + 1) * (n_max + 1); }
  int idx(int i, int j) const { return i * (n_max + 1) + j; }
};

/// Click-conditioned state: (1-lambda^2)/p1 sum_{n>=1} lambda^{2n}
/// [1 - (1-eta^2)^n] |psi_n><psi_n|, truncated at n_max.
/// Throws if the geometric tail exceeds max_deficit.
FockDensityMatrix rho1(const SPDParams& p, double max_deficit = 1e-6);

/// E_N = log2(1 + 2 |sum of negative eigenvalues of rho^{T_A}|), threshold
/// -1e-12 on what counts as negative.
double log_negativity_fock(const FockDensityMatrix& rho);

/// E_L,NG = p1 * E_N[rho1] (the no-click branch is separable).
double average_localized(const SPDParams& p);

/// Gaussian benchmark: entropy of entanglement of the homodyne-localized
/// state, n_A = (1/2) (1 - lambda^4)^{-1/2} - 1/2.
double gaussian_baseline(double lambda);

}  // namespace cvloc
