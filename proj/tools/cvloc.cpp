// cvloc: covariance-matrix entanglement localization toolkit, CLI surface.
//
// Subcommands: validate, negativity, localize, sweep-nu, sweep-lambda.
// Exit codes: 0 ok, 1 parse/argument error, 2 unphysical input,
// 3 unsupported shape, 4 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include "cvloc/cmfile.hpp"
#include "cvloc/core.hpp"
#include "cvloc/fock.hpp"
#include "cvloc/measurement.hpp"
#include "cvloc/oracle.hpp"
#include "cvloc/symmetric.hpp"
#include "cvloc/threemode.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using json = nlohmann::json;
using namespace cvloc;

std::string fmt(double v, int sig = 6) {
  std::ostringstream os;
  os << std::setprecision(sig) << v;
  return os.str();
}

std::string csv_num(double v) { return fmt(v, 12); }

const char* tag_name(Strategy t) {
  switch (t) {
    case Strategy::interior: return "interior";
    case Strategy::homodyne: return "homodyne";
    case Strategy::coherent: return "coherent";
  }
  return "?";
}

std::vector<int> complement_modes(int n, const std::vector<int>& taken) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (std::find(taken.begin(), taken.end(), i) == taken.end())
      out.push_back(i);
  return out;
}

CovarianceMatrix pair_block(const CovarianceMatrix& g, int a, int b) {
  if (a < 0 || b < 0 || a >= g.n_modes || b >= g.n_modes || a == b)
    throw DimensionError("mode pair out of range");
  Eigen::Matrix4d m;
  const int idx[2] = {a, b};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      m.block<2, 2>(2 * i, 2 * j) = g.mode_block(idx[i], idx[j]);
  return CovarianceMatrix(m);
}

void require_physical(const CovarianceMatrix& g) {
  const ValidityReport rep = validate_cm(g);
  if (!rep.physical)
    throw ValidityError("unphysical covariance matrix, min symplectic eigenvalue " +
                        fmt(rep.min_symplectic_eig, 10));
}

// ---- structure detectors for `localize auto` -------------------------------

constexpr double kDetectTol = 1e-9;

bool is_diag2(const Eigen::Matrix2d& m) {
  return std::abs(m(0, 1)) <= kDetectTol && std::abs(m(1, 0)) <= kDetectTol;
}

bool same2(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  return (a - b).cwiseAbs().maxCoeff() <= kDetectTol;
}

std::optional<SymmetricStateParams> detect_symmetric(const CovarianceMatrix& g,
                                                     std::string* reason) {
  const int N = g.n_modes;
  if (N < 3) {
    *reason = "fewer than 3 modes";
    return std::nullopt;
  }
  const Eigen::Matrix2d beta = g.mode_block(0, 0);
  if (!is_diag2(beta) || std::abs(beta(0, 0) - beta(1, 1)) > kDetectTol) {
    *reason = "diagonal block is not b*I";
    return std::nullopt;
  }
  const Eigen::Matrix2d eps = g.mode_block(0, 1);
  if (!is_diag2(eps)) {
    *reason = "off-diagonal block is not diagonal";
    return std::nullopt;
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (!same2(g.mode_block(i, j), (i == j) ? beta : eps)) {
        *reason = "mode blocks are not exchange-invariant (block " +
                  std::to_string(i) + "," + std::to_string(j) + " differs)";
        return std::nullopt;
      }
    }
  return SymmetricStateParams{N, beta(0, 0), eps(0, 0), eps(1, 1)};
}

std::optional<BisymmetricStateParams> detect_bisymmetric(
    const CovarianceMatrix& g, std::string* reason) {
  const int N = g.n_modes;
  if (N < 3) {
    *reason = "fewer than 3 modes";
    return std::nullopt;
  }
  const Eigen::Matrix2d beta = g.mode_block(0, 0);
  const Eigen::Matrix2d eps = g.mode_block(0, 1);
  const Eigen::Matrix2d alpha = g.mode_block(2, 2);
  const Eigen::Matrix2d tau = g.mode_block(0, 2);
  const Eigen::Matrix2d xi =
      N > 3 ? Eigen::Matrix2d(g.mode_block(2, 3)) : Eigen::Matrix2d::Zero().eval();
  if (!is_diag2(beta) || std::abs(beta(0, 0) - beta(1, 1)) > kDetectTol ||
      !is_diag2(alpha) || std::abs(alpha(0, 0) - alpha(1, 1)) > kDetectTol ||
      !is_diag2(eps) || !is_diag2(xi)) {
    *reason = "blocks do not match the b*I / alpha*I / diagonal eps,xi pattern";
    return std::nullopt;
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      Eigen::Matrix2d want;
      if (i == j)
        want = (i < 2) ? beta : alpha;
      else if (i < 2 && j < 2)
        want = eps;
      else if (i >= 2 && j >= 2)
        want = xi;
      else if (i < 2)
        want = tau;
      else
        want = tau.transpose();
      if (!same2(g.mode_block(i, j), want)) {
        *reason = "mode blocks are not bisymmetric (block " + std::to_string(i) +
                  "," + std::to_string(j) + " differs)";
        return std::nullopt;
      }
    }
  BisymmetricStateParams p;
  p.n_modes = N;
  p.b = beta(0, 0);
  p.alpha = alpha(0, 0);
  p.eps1 = eps(0, 0);
  p.eps2 = eps(1, 1);
  p.xi1 = xi(0, 0);
  p.xi2 = xi(1, 1);
  p.tau = tau;
  return p;
}

// ---- localize --------------------------------------------------------------

struct LocalizeRecord {
  std::string solver;
  double r = 0.0;
  double theta = 0.0;
  double mu2 = 0.0;
  double e = 0.0;
  std::string tag;
  std::string note;
};

void print_record(const LocalizeRecord& rec, bool as_json) {
  if (as_json) {
    json j{{"solver", rec.solver}, {"r", rec.r},     {"theta", rec.theta},
           {"mu2", rec.mu2},       {"E", rec.e},     {"tag", rec.tag}};
    if (!rec.note.empty()) j["note"] = rec.note;
    std::cout << j.dump() << "\n";
    return;
  }
  std::cout << "solver=" << rec.solver << " r=" << fmt(rec.r)
            << " theta=" << fmt(rec.theta) << " mu2=" << fmt(rec.mu2)
            << " E=" << fmt(rec.e) << " tag=" << rec.tag;
  if (!rec.note.empty()) std::cout << " (" << rec.note << ")";
  std::cout << "\n";
}

LocalizeRecord localize_three_mode_numeric(const CovarianceMatrix& g) {
  const OptResult opt = optimize_gaussian(g);
  return {"numeric", opt.r, opt.theta, opt.mu2, opt.e_lg, tag_name(opt.tag), ""};
}

LocalizeRecord run_localize(const CovarianceMatrix& g, std::pair<int, int> target,
                            const std::vector<int>& measured,
                            const std::string& strategy, bool force_numeric,
                            int grid) {
  const bool three_mode_shape = g.n_modes == 3 && target == std::make_pair(0, 1) &&
                                measured == std::vector<int>{2};

  if (strategy == "homodyne") {
    if (!three_mode_shape)
      throw ShapeError("homodyne solver needs a three-mode state with target "
                       "modes 0,1 and measured mode 2");
    const ThreeModeState s = ThreeModeState::standardized_from(g);
    const HomodyneResult h = optimal_homodyne(s);
    LocalizeRecord rec{"homodyne-quartic",
                       std::numeric_limits<double>::infinity(),
                       h.theta,
                       h.mu2,
                       h.e,
                       "homodyne",
                       ""};
    if (h.degenerate) rec.note = "objective independent of phase";
    return rec;
  }

  if (strategy == "coherent") {
    require_physical(g);
    std::vector<ModeSetting> settings(measured.size(), ModeSetting{0.0, 0.0});
    double mu2 = 0.0;
    const double e = sweep_log_negativity(g, target, measured, settings, &mu2);
    return {"coherent", 0.0, 0.0, mu2, e, "coherent", ""};
  }

  if (strategy == "sweep") {
    require_physical(g);
    SweepSpec spec;
    for (int i = 0; i < grid; ++i) spec.y_grid.push_back(double(i) / grid);
    for (int j = 0; j < grid; ++j) spec.theta_grid.push_back(M_PI * j / grid);
    const SweepResult res = sweep_gaussian(g, target, measured, spec);
    LocalizeRecord rec;
    rec.solver = "sweep";
    rec.mu2 = res.best.mu2;
    rec.e = res.best.e;
    const ModeSetting& first = res.best.settings.front();
    rec.theta = first.theta;
    rec.r = first.y ? std::atanh(*first.y)
                    : std::numeric_limits<double>::infinity();
    rec.tag = first.y ? (*first.y == 0 ? "coherent" : "interior") : "homodyne";
    if (measured.size() > 1) rec.note = "r/theta shown for first measured mode";
    return rec;
  }

  // auto dispatch: symmetric -> bisymmetric -> isotropic -> numeric
  std::string sym_reason, bisym_reason;
  const bool full_complement =
      complement_modes(g.n_modes, {target.first, target.second}) == measured;
  if (!force_numeric && full_complement) {
    if (auto p = detect_symmetric(g, &sym_reason)) {
      const SymmetricResult r = symmetric_localizable(*p);
      LocalizeRecord rec{"symmetric",
                         std::numeric_limits<double>::infinity(),
                         r.optimal_quadrature == Quadrature::p ? 0.0 : M_PI / 2,
                         r.mu2,
                         r.e_lg,
                         "homodyne",
                         std::string("collective ") +
                             (r.optimal_quadrature == Quadrature::p ? "p" : "x") +
                             " quadrature"};
      return rec;
    }
    if (target == std::make_pair(0, 1)) {
      if (auto p = detect_bisymmetric(g, &bisym_reason)) {
        const BisymResult r = bisymmetric_localizable(*p);
        return {"bisymmetric", std::numeric_limits<double>::infinity(),
                0.0,           r.mu2,
                r.e_lg,        "homodyne",
                "lambda=" + fmt(r.lambda)};
      }
    } else {
      bisym_reason = "target pair is not modes 0,1";
    }
  }
  if (three_mode_shape) {
    if (!force_numeric) {
      const IsotropyReport iso = isotropic_check(g);
      if (iso.is_isotropic) {
        const ThreeModeState s = ThreeModeState::standardized_from(g);
        const OptResult opt = isotropic_optimal(s, iso.nu);
        return {"isotropic", opt.r,  opt.theta,
                opt.mu2,     opt.e_lg, tag_name(opt.tag),
                "nu=" + fmt(iso.nu)};
      }
    }
    return localize_three_mode_numeric(g);
  }
  throw ShapeError("no closed-form solver applies and the numeric solver "
                   "handles only three-mode states (symmetric detector: " +
                   (sym_reason.empty() ? std::string("not attempted") : sym_reason) +
                   "); use --strategy sweep");
}

// ---- sweeps ----------------------------------------------------------------

std::ostream& open_csv(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  return file;
}

void run_sweep_nu(const CovarianceMatrix& gp_cm, double nu_min, double nu_max,
                  int steps, std::ostream& out) {
  const IsotropyReport base = isotropic_check(gp_cm);
  if (!base.is_isotropic || std::abs(base.nu - 1.0) > 1e-6)
    throw std::invalid_argument(
        "sweep-nu expects a pure three-mode state (all symplectic eigenvalues "
        "1); got min/max nu " + fmt(base.nu));
  out << "nu,E_before,E_hom,E_opt,winner\n";
  for (int k = 0; k <= steps; ++k) {
    const double nu = nu_min + (nu_max - nu_min) * k / steps;
    const CovarianceMatrix g(nu * gp_cm.data);
    const auto [m1, m2] = ptranspose_symplectic_eigs(
        two_mode_blocks(pair_block(g, 0, 1)));
    (void)m1;
    const double e_before = std::max(0.0, -std::log2(m2));
    const ThreeModeState s = ThreeModeState::standardized_from(g);
    const double e_hom = optimal_homodyne(s).e;
    const OptResult opt = isotropic_optimal(s, nu);
    const char* winner =
        (opt.e_lg - e_hom > 1e-9) ? tag_name(opt.tag) : "homodyne";
    out << csv_num(nu) << ',' << csv_num(e_before) << ',' << csv_num(e_hom)
        << ',' << csv_num(opt.e_lg) << ',' << winner << "\n";
  }
}

void run_sweep_lambda(const std::vector<double>& etas, double l_min,
                      double l_max, int steps, int n_max, std::ostream& out) {
  out << "lambda,E_L_G";
  for (double eta : etas) out << ",E_L_NG_eta" << fmt(eta);
  out << "\n";
  for (int k = 0; k <= steps; ++k) {
    const double lam = l_min + (l_max - l_min) * k / steps;
    out << csv_num(lam) << ',' << csv_num(gaussian_baseline(lam));
    for (double eta : etas)
      out << ',' << csv_num(average_localized({lam, eta, n_max}));
    out << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian localizable-entanglement toolkit"};
  app.require_subcommand(1);

  std::string file, csv_path;
  bool as_json = false;

  auto* validate = app.add_subcommand("validate", "check physicality of a CM file");
  validate->add_option("file", file)->required();
  validate->add_flag("--json", as_json);

  std::vector<int> pair_modes{0, 1};
  auto* negativity =
      app.add_subcommand("negativity", "log-negativity of a mode pair");
  negativity->add_option("file", file)->required();
  negativity->add_option("--modes", pair_modes, "mode pair (default 0 1)")
      ->expected(2);
  negativity->add_flag("--json", as_json);

  std::vector<int> target_modes{0, 1};
  std::vector<int> measured_modes;
  std::string strategy = "auto";
  bool force_numeric = false;
  int grid = 40;
  auto* localize =
      app.add_subcommand("localize", "optimal Gaussian measurement on the rest");
  localize->add_option("file", file)->required();
  localize->add_option("--target", target_modes, "target pair (default 0 1)")
      ->expected(2);
  localize->add_option("--measure", measured_modes,
                       "measured modes (default: all others)");
  localize->add_option("--strategy", strategy)
      ->check(CLI::IsMember({"auto", "homodyne", "coherent", "sweep"}));
  localize->add_flag("--force-numeric", force_numeric,
                     "skip closed-form dispatch");
  localize->add_option("--grid", grid, "per-axis sweep resolution");
  localize->add_flag("--json", as_json);

  double nu_min = 1.0, nu_max = 3.0;
  int steps = 50;
  auto* sweep_nu = app.add_subcommand(
      "sweep-nu", "entanglement vs mixedness for an isotropic family");
  sweep_nu->add_option("file", file, "pure-state CM (nu = 1 member)")->required();
  sweep_nu->add_option("--nu-min", nu_min);
  sweep_nu->add_option("--nu-max", nu_max);
  sweep_nu->add_option("--steps", steps);
  sweep_nu->add_option("--csv", csv_path, "write CSV here instead of stdout");

  std::vector<double> etas{1.0, 0.8, 0.6};
  double l_min = 0.0, l_max = 0.9;
  int n_max = 40;
  auto* sweep_lambda = app.add_subcommand(
      "sweep-lambda", "photon-detector localization vs Gaussian baseline");
  sweep_lambda->add_option("--eta", etas, "detector efficiencies");
  sweep_lambda->add_option("--lambda-min", l_min);
  sweep_lambda->add_option("--lambda-max", l_max);
  sweep_lambda->add_option("--steps", steps);
  sweep_lambda->add_option("--nmax", n_max, "Fock cutoff");
  sweep_lambda->add_option("--csv", csv_path, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // collapse CLI11's error-code family onto the documented code 1,
    // keeping 0 for --help/--version
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (validate->parsed()) {
      const CMFile f = read_cm_file(file);
      const ValidityReport rep = validate_cm(f.cm);
      if (as_json) {
        std::cout << json{{"n_modes", f.cm.n_modes},
                          {"symmetric", rep.symmetric},
                          {"positive_semidefinite", rep.positive_semidefinite},
                          {"physical", rep.physical},
                          {"min_symplectic_eig", rep.min_symplectic_eig}}
                         .dump()
                  << "\n";
      } else {
        std::cout << "n_modes=" << f.cm.n_modes << " physical="
                  << (rep.physical ? "yes" : "no")
                  << " min_nu=" << fmt(rep.min_symplectic_eig, 10) << "\n";
      }
      return rep.physical ? 0 : 2;
    }

    if (negativity->parsed()) {
      const CMFile f = read_cm_file(file);
      require_physical(f.cm);
      const CovarianceMatrix ab = pair_block(f.cm, pair_modes[0], pair_modes[1]);
      const auto [mu1, mu2] = ptranspose_symplectic_eigs(two_mode_blocks(ab));
      const double e = std::max(0.0, -std::log2(mu2));
      if (as_json)
        std::cout << json{{"mu1", mu1}, {"mu2", mu2}, {"E_N", e}}.dump() << "\n";
      else
        std::cout << "mu1=" << fmt(mu1) << " mu2=" << fmt(mu2)
                  << " E_N=" << fmt(e) << "\n";
      return 0;
    }

    if (localize->parsed()) {
      const CMFile f = read_cm_file(file);
      require_physical(f.cm);
      std::pair<int, int> target{target_modes[0], target_modes[1]};
      if (target.first > target.second) std::swap(target.first, target.second);
      if (measured_modes.empty())
        measured_modes =
            complement_modes(f.cm.n_modes, {target.first, target.second});
      std::sort(measured_modes.begin(), measured_modes.end());
      if (measured_modes.empty())
        throw std::invalid_argument("localize: no modes left to measure");
      print_record(run_localize(f.cm, target, measured_modes, strategy,
                                force_numeric, grid),
                   as_json);
      return 0;
    }

    std::ofstream csv_file;
    if (sweep_nu->parsed()) {
      const CMFile f = read_cm_file(file);
      run_sweep_nu(f.cm, nu_min, nu_max, steps, open_csv(csv_file, csv_path));
      return 0;
    }
    if (sweep_lambda->parsed()) {
      run_sweep_lambda(etas, l_min, l_max, steps, n_max,
                       open_csv(csv_file, csv_path));
      return 0;
    }
  } catch (const ParseError& ex) {
    std::cerr << "parse error: " << ex.what() << "\n";
    return 1;
  } catch (const ValidityError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const ShapeError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  } catch (const DimensionError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  } catch (const NumericError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const std::runtime_error& ex) {
    // remaining runtime errors are I/O problems (unreadable/unwritable files)
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 4;
  }
  return 0;
}
