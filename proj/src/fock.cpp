#include "cvloc/fock.hpp"

#include "cvloc/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cvloc {

void validate_spd_params(const SPDParams& p) {
  if (!(p.lambda >= 0 && p.lambda < 1))
    throw std::invalid_argument("SPDParams: lambda must be in [0, 1)");
  if (!(p.eta >= 0 && p.eta <= 1))
    throw std::invalid_argument("SPDParams: eta must be in [0, 1]");
  if (p.n_max < 1) throw std::invalid_argument("SPDParams: n_max must be >= 1");
}

std::vector<double> psi_n_state(int n) {
  if (n < 0) throw std::invalid_argument("psi_n_state: n must be >= 0");
  std::vector<double> amps(n + 1);
  // sqrt(C(n,k))/2^{n/2} built multiplicatively to stay exact in range
  double lbinom = 0.0;
  for (int k = 0; k <= n; ++k) {
    amps[k] = std::exp(0.5 * (lbinom - n * std::log(2.0)));
    if (k < n) lbinom += std::log(double(n - k)) - std::log(double(k + 1));
  }
  return amps;
}

double click_probability(const SPDParams& p) {
  validate_spd_params(p);
  const double l2 = p.lambda * p.lambda, e2 = p.eta * p.eta;
  return l2 * e2 / (1 - l2 * (1 - e2));
}

FockDensityMatrix rho1(const SPDParams& p, double max_deficit) {
  validate_spd_params(p);
  const double p1 = click_probability(p);
  if (p1 <= 0)
    throw NumericError("rho1: click probability is zero (eta = 0 or lambda = 0)");
  const double l2 = p.lambda * p.lambda, e2 = p.eta * p.eta;
  FockDensityMatrix out;
  out.n_max = p.n_max;
  out.rho = Eigen::MatrixXd::Zero(out.dim(), out.dim());
  double trace = 0.0;
  for (int n = 1; n <= p.n_max; ++n) {
    const double w =
        (1 - l2) * std::pow(l2, n) * (1 - std::pow(1 - e2, n)) / p1;
    trace += w;
    const std::vector<double> psi = psi_n_state(n);
    for (int k = 0; k <= n; ++k)
      for (int k2 = 0; k2 <= n; ++k2)
        out.rho(out.idx(k, n - k), out.idx(k2, n - k2)) += w * psi[k] * psi[k2];
  }
  out.trace_deficit = 1.0 - trace;
  if (out.trace_deficit > max_deficit)
    throw NumericError("rho1: trace deficit " + std::to_string(out.trace_deficit) +
                       " exceeds requested tolerance; increase n_max");
  return out;
}

double log_negativity_fock(const FockDensityMatrix& rho) {
  const int d = rho.n_max + 1;
  if (rho.rho.rows() != rho.dim() || rho.rho.cols() != rho.dim())
    throw ShapeError("log_negativity_fock: matrix size does not match n_max");
  if ((rho.rho - rho.rho.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw ShapeError("log_negativity_fock: density matrix not symmetric");
  Eigen::MatrixXd pt(rho.dim(), rho.dim());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          pt(rho.idx(i, j), rho.idx(k, l)) = rho.rho(rho.idx(k, j), rho.idx(i, l));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pt, Eigen::EigenvaluesOnly);
  double neg = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) < -1e-12) neg += es.eigenvalues()(i);
  return std::log2(1 + 2 * std::abs(neg));
}

double average_localized(const SPDParams& p) {
  validate_spd_params(p);
  const double p1 = click_probability(p);
  if (p1 == 0) return 0.0;  // eta = 0: detector never clicks
  return p1 * log_negativity_fock(rho1(p));
}

double gaussian_baseline(double lambda) {
  if (!(lambda >= 0 && lambda < 1))
    throw std::invalid_argument("gaussian_baseline: lambda must be in [0, 1)");
  const double l4 = std::pow(lambda, 4);
  const double nA = 0.5 / std::sqrt(1 - l4) - 0.5;
  if (nA <= 0) return 0.0;  // lambda = 0 limit by continuity
  return (nA + 1) * std::log2(nA + 1) - nA * std::log2(nA);
}

}  // namespace cvloc
