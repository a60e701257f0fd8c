#include "cvloc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cvloc {

double sweep_log_negativity(const CovarianceMatrix& gamma,
                            std::pair<int, int> target,
                            const std::vector<int>& measured,
                            const std::vector<ModeSetting>& settings,
                            double* mu2_out) {
  if (settings.size() != measured.size())
    throw DimensionError("sweep_log_negativity: one setting per measured mode");

  // Condition highest mode index first so earlier indices stay valid.
  std::vector<int> order(measured.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return measured[a] > measured[b]; });

  CovarianceMatrix cur = gamma;
  int ta = target.first, tb = target.second;
  for (int oi : order) {
    const int mode = measured[oi];
    const ModeSetting& ms = settings[oi];
    if (mode == ta || mode == tb)
      throw DimensionError("sweep_log_negativity: measured mode is a target");
    if (ms.y) {
      const double r = std::atanh(*ms.y);
      cur = condition_on_mode(cur, mode, MeasurementCM{r, ms.theta});
    } else {
      cur = condition_on_homodyne(cur, mode, HomodyneSpec{ms.theta});
    }
    if (ta > mode) --ta;
    if (tb > mode) --tb;
  }

  Eigen::Matrix4d blk;
  blk.block<2, 2>(0, 0) = cur.mode_block(ta, ta);
  blk.block<2, 2>(0, 2) = cur.mode_block(ta, tb);
  blk.block<2, 2>(2, 0) = cur.mode_block(tb, ta);
  blk.block<2, 2>(2, 2) = cur.mode_block(tb, tb);

  const auto [mu1, mu2] = ptranspose_eigs_unchecked(blk);
  (void)mu1;
  if (mu2_out) *mu2_out = mu2;
  return std::max(0.0, -std::log2(mu2));
}

namespace {

// Canonical ordering of product settings (y ascending with homodyne last,
// then theta) so that grid argmax ties resolve independently of the
// evaluation order.
bool settings_less(const std::vector<ModeSetting>& a,
                   const std::vector<ModeSetting>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ya = a[i].y.value_or(1.0), yb = b[i].y.value_or(1.0);
    if (ya != yb) return ya < yb;
    if (a[i].theta != b[i].theta) return a[i].theta < b[i].theta;
  }
  return false;
}

}  // namespace

SweepResult sweep_gaussian(const CovarianceMatrix& gamma,
                           std::pair<int, int> target,
                           const std::vector<int>& measured,
                           const SweepSpec& spec, bool keep_table) {
  if (measured.empty())
    throw DimensionError("sweep_gaussian: nothing to measure");

  std::vector<ModeSetting> menu;
  for (double y : spec.y_grid) {
    if (!(y >= 0 && y < 1))
      throw std::invalid_argument("sweep_gaussian: y must be in [0, 1)");
    for (double th : spec.theta_grid) menu.push_back({y, th});
  }
  if (spec.include_homodyne)
    for (double th : spec.theta_grid) menu.push_back({std::nullopt, th});
  if (menu.empty()) throw std::invalid_argument("sweep_gaussian: empty grid");

  double total = 1.0;
  for (size_t i = 0; i < measured.size(); ++i)
    total *= static_cast<double>(menu.size());
  if (total > 1e7)
    throw NumericError("sweep_gaussian: grid has " + std::to_string(total) +
                       " points, above the 1e7 limit; shrink the grid");

  SweepResult out;
  out.best.e = -1.0;

  std::vector<size_t> odo(measured.size(), 0);
  std::vector<ModeSetting> settings(measured.size());
  bool done = false;
  while (!done) {
    for (size_t i = 0; i < odo.size(); ++i) settings[i] = menu[odo[i]];
    double mu2 = 0.0;
    const double e = sweep_log_negativity(gamma, target, measured, settings, &mu2);
    if (e > out.best.e ||
        (e == out.best.e && settings_less(settings, out.best.settings)))
      out.best = {settings, mu2, e};
    if (keep_table) out.table.push_back({settings, mu2, e});

    // odometer increment, last index fastest
    done = true;
    for (size_t i = odo.size(); i-- > 0;) {
      if (++odo[i] < menu.size()) {
        done = false;
        break;
      }
      odo[i] = 0;
    }
  }
  return out;
}

Eigen::MatrixXd fock_bs_sector(int n, double theta) {
  if (n < 0) throw std::invalid_argument("fock_bs_sector: n must be >= 0");
  const double c = std::cos(theta), s = std::sin(theta);
  std::vector<double> lfact(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) lfact[k] = lfact[k - 1] + std::log(double(k));

  // <k, n-k| B |m, n-m> from (c a† + s b†)^m (s a† - c b†)^{n-m} |0,0>
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int m = 0; m <= n; ++m) {
    for (int k = 0; k <= n; ++k) {
      double amp = 0.0;
      for (int p = std::max(0, k - (n - m)); p <= std::min(k, m); ++p) {
        const int q = k - p;
        const double lbin = lfact[m] - lfact[p] - lfact[m - p] + lfact[n - m] -
                            lfact[q] - lfact[n - m - q];
        double term = std::exp(lbin) * std::pow(c, p) * std::pow(s, m - p) *
                      std::pow(s, q) * std::pow(-c, n - m - q);
        amp += term;
      }
      const double norm = std::exp(
          0.5 * (lfact[k] + lfact[n - k] - lfact[m] - lfact[n - m]));
      B(k, m) = amp * norm;
    }
  }
  return B;
}

CircuitResult simulate_fig1_circuit(const SPDParams& p) {
  validate_spd_params(p);
  const int pad = p.n_max + 16;  // internal cutoff, trims truncation error
  const double l2 = p.lambda * p.lambda;
  const double th_cd = std::acos(p.eta);

  // Everything is block diagonal in the total AB photon number n, which also
  // equals the total CD photon number for each amplitude branch.
  std::vector<Eigen::MatrixXd> sector(pad + 1), sector0(pad + 1);
  double click_prob = 0.0;
  for (int n = 0; n <= pad; ++n) {
    const double weight = (1 - l2) * std::pow(l2, n);
    const Eigen::MatrixXd Bab = fock_bs_sector(n, M_PI / 4);
    const Eigen::MatrixXd Bcd = fock_bs_sector(n, th_cd);
    // AB input within sector n is |0>_A |n>_B, i.e. column m = 0. The
    // balanced splitter is taken in the convention b -> (a + b)/sqrt(2),
    // realized from the symmetric-involutive sector matrix by a photon-number
    // parity phase on the reflected port.
    Eigen::VectorXd ab = Bab.col(0);
    for (int k = 0; k <= n; ++k)
      if ((n - k) % 2) ab(k) = -ab(k);
    const Eigen::MatrixXd outer = ab * ab.transpose();
    sector[n] = Eigen::MatrixXd::Zero(n + 1, n + 1);
    sector0[n] = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int cc = 0; cc <= n; ++cc) {
      // CD input is |n>_C |0>_D, column m = n; amplitude to |cc, n-cc>.
      const double amp_cd = Bcd(cc, n);
      const double w = weight * amp_cd * amp_cd;
      (cc >= 1 ? sector[n] : sector0[n]) += w * outer;
      if (cc >= 1) click_prob += w;
    }
  }

  const auto assemble = [&](const std::vector<Eigen::MatrixXd>& sec, int n_lo,
                            double norm, FockDensityMatrix& dst) {
    dst.n_max = p.n_max;
    dst.rho = Eigen::MatrixXd::Zero(dst.dim(), dst.dim());
    if (norm <= 0) {
      dst.trace_deficit = 1.0;
      return;
    }
    for (int n = n_lo; n <= pad; ++n)
      for (int k = 0; k <= n; ++k) {
        if (k > p.n_max || n - k > p.n_max) continue;
        for (int k2 = 0; k2 <= n; ++k2) {
          if (k2 > p.n_max || n - k2 > p.n_max) continue;
          dst.rho(dst.idx(k, n - k), dst.idx(k2, n - k2)) = sec[n](k, k2) / norm;
        }
      }
    dst.trace_deficit = 1.0 - dst.rho.trace();
  };

  CircuitResult out;
  out.click_prob = click_prob;
  assemble(sector, 1, click_prob, out.rho);
  assemble(sector0, 0, 1.0 - click_prob, out.rho0);
  return out;
}

}  // namespace cvloc
