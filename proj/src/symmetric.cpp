#include "cvloc/symmetric.hpp"

#include <cmath>
#include <string>

namespace cvloc {

namespace {

CovarianceMatrix checked(Eigen::MatrixXd m, const char* who) {
  CovarianceMatrix g(std::move(m));
  const ValidityReport rep = validate_cm(g);
  if (!rep.physical)
    throw ValidityError(std::string(who) + ": unphysical CM, min nu = " +
                        std::to_string(rep.min_symplectic_eig));
  return g;
}

}  // namespace

CovarianceMatrix build_symmetric_cm(const SymmetricStateParams& p) {
  if (p.n_modes < 3)
    throw DimensionError("build_symmetric_cm: n_modes must be >= 3");
  const int N = p.n_modes;
  const Eigen::Matrix2d beta = Eigen::Vector2d(p.b, p.b).asDiagonal();
  const Eigen::Matrix2d eps = Eigen::Vector2d(p.eps1, p.eps2).asDiagonal();
  Eigen::MatrixXd g(2 * N, 2 * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      g.block<2, 2>(2 * i, 2 * j) = (i == j) ? beta : eps;
  return checked(std::move(g), "build_symmetric_cm");
}

CovarianceMatrix build_bisymmetric_cm(const BisymmetricStateParams& p) {
  if (p.n_modes < 3)
    throw DimensionError("build_bisymmetric_cm: n_modes must be >= 3");
  const int N = p.n_modes;
  const Eigen::Matrix2d beta = Eigen::Vector2d(p.b, p.b).asDiagonal();
  const Eigen::Matrix2d eps = Eigen::Vector2d(p.eps1, p.eps2).asDiagonal();
  const Eigen::Matrix2d alpha = Eigen::Vector2d(p.alpha, p.alpha).asDiagonal();
  const Eigen::Matrix2d xi = Eigen::Vector2d(p.xi1, p.xi2).asDiagonal();
  Eigen::MatrixXd g(2 * N, 2 * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      Eigen::Matrix2d blk;
      if (i == j)
        blk = (i < 2) ? beta : alpha;
      else if (i < 2 && j < 2)
        blk = eps;
      else if (i >= 2 && j >= 2)
        blk = xi;
      else if (i < 2)
        blk = p.tau;
      else
        blk = p.tau.transpose();
      g.block<2, 2>(2 * i, 2 * j) = blk;
    }
  return checked(std::move(g), "build_bisymmetric_cm");
}

double lambda_min(const SymmetricStateParams& p) {
  const int N = p.n_modes;
  double best = std::numeric_limits<double>::infinity();
  for (double eps : {p.eps1, p.eps2}) {
    const double den = p.b + (N - 3) * eps;
    if (den <= 0)
      throw NumericError("lambda_min: b + (N-3) eps <= 0 (unphysical params)");
    best = std::min(best, 2 * eps / den);
  }
  return 1.0 + best;
}

SymmetricResult symmetric_localizable(const SymmetricStateParams& p) {
  const double lam = lambda_min(p);
  const double mu2sq = (p.b - p.eps1) * (p.b - p.eps2) * std::max(lam, 0.0);
  SymmetricResult res;
  res.mu2 = std::sqrt(std::max(mu2sq, 0.0));
  res.e_lg = res.mu2 > 0 ? std::max(0.0, -std::log2(res.mu2))
                         : std::numeric_limits<double>::infinity();
  // the minimum of 2 eps/(b+(N-3)eps) sits at the smaller eps; the eps2 slot
  // is the p-p entry, so eps2 <= eps1 means collective p homodyne.
  res.optimal_quadrature = (p.eps2 <= p.eps1) ? Quadrature::p : Quadrature::x;
  return res;
}

namespace {

double min_eig_D(const BisymmetricStateParams& p, double lam) {
  const int N = p.n_modes;
  const Eigen::Matrix2d beta = Eigen::Vector2d(p.b, p.b).asDiagonal();
  const Eigen::Matrix2d eps = Eigen::Vector2d(p.eps1, p.eps2).asDiagonal();
  const Eigen::Matrix2d head =
      Eigen::Vector2d(p.alpha + (N - 3) * p.xi1, p.alpha + (N - 3) * p.xi2)
          .asDiagonal();
  const Eigen::Matrix2d M = beta + eps - lam * (beta - eps);
  const Eigen::Matrix2d D =
      head - 2.0 * (N - 2) * p.tau.transpose() * M.inverse() * p.tau;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(D, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

BisymResult bisymmetric_localizable(const BisymmetricStateParams& p) {
  const double lam_pos = std::min((p.b + p.eps1) / (p.b - p.eps1),
                                  (p.b + p.eps2) / (p.b - p.eps2));
  if (!(lam_pos > 0))
    throw ValidityError("bisymmetric_localizable: degenerate beta/eps blocks");
  double lam;
  if (min_eig_D(p, 0.0) <= 0) {
    lam = 0.0;
  } else {
    // scan for the first sign change, then bisect + secant to 1e-12
    const int kScan = 512;
    double lo = 0.0, hi = -1.0;
    for (int k = 1; k <= kScan; ++k) {
      const double x = lam_pos * (1 - 1e-12) * k / kScan;
      if (min_eig_D(p, x) <= 0) {
        hi = x;
        break;
      }
      lo = x;
    }
    if (hi < 0) {
      lam = lam_pos;  // D stays positive: no measurement can help (tau ~ 0)
    } else {
      double flo = min_eig_D(p, lo);
      double fhi = min_eig_D(p, hi);
      while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        double mid = lo + (hi - lo) * flo / (flo - fhi);  // secant guess
        // keep the step inside the middle 80% so near-pole slopes cannot
        // stall the bracket (min_eig_D blows up towards lam_pos)
        if (!(mid > lo + 0.1 * (hi - lo) && mid < hi - 0.1 * (hi - lo)))
          mid = (lo + hi) / 2;
        const double fm = min_eig_D(p, mid);
        if (fm <= 0) {
          hi = mid;
          fhi = fm;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      lam = (lo + hi) / 2;
    }
  }
  BisymResult res;
  res.lambda = lam;
  const double mu2sq = (p.b - p.eps1) * (p.b - p.eps2) * lam;
  res.mu2 = std::sqrt(std::max(mu2sq, 0.0));
  res.e_lg = res.mu2 > 0 ? std::max(0.0, -std::log2(res.mu2))
                         : std::numeric_limits<double>::infinity();
  return res;
}

Eigen::MatrixXd bs_network_matrix(int n_modes) {
  const int N = n_modes;
  if (N < 3) throw DimensionError("bs_network_matrix: n_modes must be >= 3");
  Eigen::MatrixXd S = beam_splitter_matrix(M_PI / 4, 0, 1, N);
  // C modes are 2..N-1; the array couples C1 (mode 2) to each later C mode.
  Eigen::MatrixXd SC = Eigen::MatrixXd::Identity(2 * N, 2 * N);
  for (int k = 3, m = N - 2; k < N; ++k, --m)
    SC = SC * beam_splitter_matrix(std::asin(1.0 / std::sqrt(double(m))), 2, k, N);
  return S * SC;
}

BlockReport bs_network_reduce(const CovarianceMatrix& gamma) {
  const int N = gamma.n_modes;
  const CovarianceMatrix g = apply_symplectic(gamma, bs_network_matrix(N));
  BlockReport rep;
  const int idx[2] = {0, 2};  // A and C1
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      rep.ac1_block.block<2, 2>(2 * a, 2 * b) = g.mode_block(idx[a], idx[b]);
  rep.decoupled.push_back(g.mode_block(1, 1));
  for (int k = 3; k < N; ++k) rep.decoupled.push_back(g.mode_block(k, k));
  double resid = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const bool coupled = (i == 0 && j == 2);
      if (!coupled)
        resid = std::max(resid, g.mode_block(i, j).cwiseAbs().maxCoeff());
    }
  rep.max_residual_coupling = resid;
  if (resid > 1e-8)
    throw ShapeError("bs_network_reduce: input is not (bi)symmetric, residual " +
                     std::to_string(resid));
  return rep;
}

}  // namespace cvloc
