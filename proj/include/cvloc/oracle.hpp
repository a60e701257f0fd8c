#pragma once

#include "cvloc/core.hpp"
#include "cvloc/fock.hpp"
#include "cvloc/measurement.hpp"

#include <optional>
#include <utility>
#include <vector>

// Independent brute-force verifiers: exhaustive (r, theta) product sweeps for
// the Gaussian claims, and a direct Fock-space simulation of the
// TMSV / beam-splitter / single-photon-detector circuit.

namespace cvloc {

struct SweepSpec {
  std::vector<double> y_grid;      // y = tanh r values in [0, 1)
  std::vector<double> theta_grid;  // values in [0, pi)
  bool include_homodyne = true;    // add homodyne boundary points per theta
};

/// One measurement setting per measured mode; y unset means homodyne.
struct ModeSetting {
  std::optional<double> y;
  double theta = 0.0;
};

struct SweepPoint {
  std::vector<ModeSetting> settings;
  double mu2 = 0.0;
  double e = 0.0;
};

struct SweepResult {
  SweepPoint best;
  std::vector<SweepPoint> table;
};

/// Evaluates conditioning + log-negativity of the target pair at every point
/// of the per-mode Cartesian grid. Deterministic lexicographic argmax
/// (first strictly-better point wins). Refuses grids above 10^7 points.
SweepResult sweep_gaussian(const CovarianceMatrix& gamma,
                           std::pair<int, int> target,
                           const std::vector<int>& measured,
                           const SweepSpec& spec, bool keep_table = false);

/// Evaluate a single product setting (exposed for custom sweeps).
double sweep_log_negativity(const CovarianceMatrix& gamma,
                            std::pair<int, int> target,
                            const std::vector<int>& measured,
                            const std::vector<ModeSetting>& settings,
                            double* mu2_out = nullptr);

/// Two-mode beam-splitter unitary restricted to the total-photon-number-n
/// sector: entry (k, m) is <k, n-k| B(theta) |m, n-m>.
Eigen::MatrixXd fock_bs_sector(int n, double theta);

struct CircuitResult {
  FockDensityMatrix rho;   // click-conditioned, normalized
  FockDensityMatrix rho0;  // no-click branch, normalized
  double click_prob = 0.0;
};

/// Direct simulation of the four-mode circuit: |0>_A |lambda>_BC |0>_D,
/// balanced BS on (A,B), transmittance-eta BS on (C,D), click projector
/// 1 - |0><0| on C, trace over C and D. Internally padded above n_max so the
/// reported block and click probability are converged.
CircuitResult simulate_fig1_circuit(const SPDParams& p);

}  // namespace cvloc
