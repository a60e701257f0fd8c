#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvloc/symmetric.hpp"
#include "cvloc/threemode.hpp"
#include "testutil.hpp"

#include <random>

using namespace cvloc;

namespace {

ThreeModeState random_standardized(std::mt19937_64& rng, bool pure = false) {
  const CovarianceMatrix g = pure ? testutil::random_pure_cm(3, rng)
                                  : testutil::random_physical_cm(3, rng);
  return ThreeModeState::standardized_from(g);
}

CovarianceMatrix random_isotropic(std::mt19937_64& rng, double nu) {
  return CovarianceMatrix(nu * testutil::random_pure_cm(3, rng).data);
}

// delta and Delta straight from the conditioned two-mode CM
std::pair<double, double> direct_invariants(const ThreeModeState& s, double r,
                                            double theta) {
  const CovarianceMatrix ab =
      condition_on_mode(s.gamma, 2, MeasurementCM{r, theta});
  const TwoModeBlocks b = two_mode_blocks(ab);
  const double delta = b.A.determinant() + b.B.determinant() -
                       2 * b.C.determinant();
  return {delta, ab.data.determinant()};
}

}  // namespace

TEST_CASE("chi matrix: zero couplings and the regression example") {
  // E = F = 0: no correlations with C
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(6, 6);
  std::mt19937_64 rng(97);
  g.block<4, 4>(0, 0) = testutil::random_physical_cm(2, rng).data;
  g.block<2, 2>(4, 4) = 2.0 * Eigen::Matrix2d::Identity();
  const ThreeModeState s0 = ThreeModeState::standardized_from(CovarianceMatrix(g));
  CHECK(chi_matrix(s0).chi.cwiseAbs().maxCoeff() < 1e-12);

  const ThreeModeState ex = ThreeModeState::standardized_from(
      CovarianceMatrix(2.0 * testutil::example_gamma_p().data));
  const ChiMatrix x = chi_matrix(ex);
  CHECK(x.norm < 1e-10);           // the paper-style degenerate phase case
  CHECK(x.chi.trace() != doctest::Approx(0.0));  // chi itself is nonzero
}

TEST_CASE("closed-form invariants match direct conditioning") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> rd(0.0, 2.5), td(0.0, M_PI);
  for (int t = 0; t < 1000; ++t) {
    const ThreeModeState s = random_standardized(rng);
    const ChiMatrix x = chi_matrix(s);
    const GammaCBlock g = gamma_c_block(s);
    const double r = rd(rng), th = td(rng);
    const auto [d_direct, D_direct] = direct_invariants(s, r, th);
    const double d = invariant_delta(s, x, r, th);
    const double D = invariant_Delta(s, g, r, th);
    CHECK(d == doctest::Approx(d_direct).epsilon(1e-9));
    CHECK(D == doctest::Approx(D_direct).epsilon(1e-9));
    // theta periodicity
    CHECK(invariant_delta(s, x, r, th + M_PI) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("uncorrelated C mode gives measurement-independent invariants") {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(6, 6);
  std::mt19937_64 rng(103);
  g.block<4, 4>(0, 0) = testutil::random_physical_cm(2, rng).data;
  g.block<2, 2>(4, 4) = 1.7 * Eigen::Matrix2d::Identity();
  const ThreeModeState s = ThreeModeState::standardized_from(CovarianceMatrix(g));
  const double f0 = objective_f(s, 0.0, 0.0);
  CHECK(objective_f(s, 1.3, 0.8) == doctest::Approx(f0).epsilon(1e-10));
  CHECK(objective_f(s, 2.6, 2.9) == doctest::Approx(f0).epsilon(1e-10));
}

TEST_CASE("regression example: objective at the paper points") {
  const ThreeModeState s = ThreeModeState::standardized_from(
      CovarianceMatrix(2.0 * testutil::example_gamma_p().data));
  CHECK(std::sqrt(objective_f(s, 0.0, 0.0) / 2) ==
        doctest::Approx(0.592).epsilon(1e-3));
}

TEST_CASE("optimize_gaussian on the regression example") {
  const OptResult r =
      optimize_gaussian(CovarianceMatrix(2.0 * testutil::example_gamma_p().data));
  CHECK(r.tag == Strategy::coherent);
  CHECK(r.r == 0.0);
  CHECK(r.mu2 == doctest::Approx(0.592).epsilon(1e-3));
  CHECK(r.e_lg == doctest::Approx(0.757).epsilon(1e-3));
}

TEST_CASE("pure states: homodyne boundary always wins") {
  std::mt19937_64 rng(107);
  for (int t = 0; t < 25; ++t) {
    const OptResult r = optimize_gaussian(testutil::random_pure_cm(3, rng));
    CHECK(r.tag == Strategy::homodyne);
  }
}

TEST_CASE("optimize_gaussian matches the symmetric closed form for N = 3") {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> bd(1.0, 2.5);
  int done = 0;
  while (done < 25) {
    SymmetricStateParams p{3, bd(rng), 0, 0};
    std::uniform_real_distribution<double> ed(-(p.b - 1), p.b - 1);
    p.eps1 = ed(rng);
    p.eps2 = ed(rng);
    if (p.eps1 < p.eps2) std::swap(p.eps1, p.eps2);
    CovarianceMatrix g;
    try {
      g = build_symmetric_cm(p);
    } catch (const ValidityError&) {
      continue;
    }
    ++done;
    const OptResult r = optimize_gaussian(g);
    const SymmetricResult want = symmetric_localizable(p);
    CHECK(r.mu2 == doctest::Approx(want.mu2).epsilon(1e-7));
  }
}

TEST_CASE("optimal homodyne: example and degeneracy") {
  const ThreeModeState ex = ThreeModeState::standardized_from(
      CovarianceMatrix(2.0 * testutil::example_gamma_p().data));
  const HomodyneResult h = optimal_homodyne(ex);
  CHECK(h.degenerate);  // ||chi|| = 0 here
  CHECK(h.mu2 == doctest::Approx(0.636).epsilon(1e-3));
  CHECK(h.e == doctest::Approx(0.654).epsilon(1e-3));
}

TEST_CASE("homodyne quartic beats / matches a dense theta sweep") {
  std::mt19937_64 rng(113);
  for (int t = 0; t < 200; ++t) {
    const ThreeModeState s = random_standardized(rng);
    const ChiMatrix x = chi_matrix(s);
    const GammaCBlock g = gamma_c_block(s);
    const HomodyneResult h = optimal_homodyne(s);
    double sweep_best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 10000; ++j) {
      const auto [d, D] = homodyne_invariants(s, x, g, M_PI * j / 10000);
      double disc = std::max(0.0, d * d - 4 * D);
      sweep_best = std::min(sweep_best,
                            std::sqrt(std::max(0.0, (d - std::sqrt(disc)) / 2)));
    }
    CHECK(sweep_best >= h.mu2 - 1e-9);   // quartic path is never beaten
    CHECK(sweep_best - h.mu2 <= 1e-6);   // and the sweep gets close
  }
}

TEST_CASE("quartic root helper") {
  // (x-1)(x+2)(x-3)(x+4) = x^4 + 2x^3 - 13x^2 - 14x + 24
  auto roots = real_quartic_roots({24, -14, -13, 2, 1});
  REQUIRE(roots.size() == 4);
  CHECK(roots[0] == doctest::Approx(-4.0).epsilon(1e-9));
  CHECK(roots[1] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(roots[2] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(roots[3] == doctest::Approx(3.0).epsilon(1e-9));
  // leading-coefficient degeneracy: effectively quadratic
  roots = real_quartic_roots({-2, 1, 1, 0, 0});
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(roots[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(real_quartic_roots({0, 0, 0, 0, 0}).empty());
}

TEST_CASE("isotropic detection") {
  std::mt19937_64 rng(127);
  const IsotropyReport pure = isotropic_check(testutil::random_pure_cm(3, rng));
  CHECK(pure.is_isotropic);
  CHECK(pure.nu == doctest::Approx(1.0).epsilon(1e-8));

  const IsotropyReport ex =
      isotropic_check(CovarianceMatrix(2.0 * testutil::example_gamma_p().data));
  CHECK(ex.is_isotropic);
  CHECK(ex.nu == doctest::Approx(2.0).epsilon(1e-9));

  int mixed_hits = 0;
  for (int t = 0; t < 20; ++t)
    if (isotropic_check(testutil::random_physical_cm(3, rng)).is_isotropic)
      ++mixed_hits;
  CHECK(mixed_hits == 0);
}

TEST_CASE("isotropic states have theta-independent Delta") {
  std::mt19937_64 rng(131);
  std::uniform_real_distribution<double> nud(1.0, 2.5);
  for (int t = 0; t < 50; ++t) {
    const ThreeModeState s = ThreeModeState::standardized_from(
        random_isotropic(rng, nud(rng)));
    const GammaCBlock g = gamma_c_block(s);
    CHECK(std::abs(g.g1) < 1e-10 * std::max(1.0, g.gamma_c.cwiseAbs().maxCoeff()));
    CHECK(std::abs(g.g2) < 1e-10 * std::max(1.0, g.gamma_c.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("isotropic analytic path: example and cross-check vs numeric") {
  const CovarianceMatrix ex(2.0 * testutil::example_gamma_p().data);
  const ThreeModeState s = ThreeModeState::standardized_from(ex);
  const OptResult r = isotropic_optimal(s, 2.0);
  CHECK(r.tag == Strategy::coherent);
  CHECK(r.r == 0.0);
  CHECK(r.mu2 == doctest::Approx(0.592).epsilon(1e-3));
  CHECK(r.e_lg == doctest::Approx(0.757).epsilon(1e-3));

  std::mt19937_64 rng(137);
  std::uniform_real_distribution<double> nud(1.0, 2.2);
  for (int t = 0; t < 60; ++t) {
    const CovarianceMatrix g = random_isotropic(rng, nud(rng));
    const IsotropyReport rep = isotropic_check(g);
    REQUIRE(rep.is_isotropic);
    const ThreeModeState st = ThreeModeState::standardized_from(g);
    const OptResult ana = isotropic_optimal(st, rep.nu);
    const OptResult num = optimize_gaussian(g);
    CHECK(ana.mu2 == doctest::Approx(num.mu2).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("isotropic quartic matches a dense squeezing sweep") {
  std::mt19937_64 rng(139);
  std::uniform_real_distribution<double> nud(1.0, 2.2);
  for (int t = 0; t < 200; ++t) {
    const CovarianceMatrix g = random_isotropic(rng, nud(rng));
    const IsotropyReport rep = isotropic_check(g);
    REQUIRE(rep.is_isotropic);
    const ThreeModeState st = ThreeModeState::standardized_from(g);
    const OptResult ana = isotropic_optimal(st, rep.nu);

    // dense sweep over y at the analytic phase, plus the homodyne limit
    const ChiMatrix x = chi_matrix(st);
    double theta = 0.0;
    if (x.norm > 1e-12) {
      theta = 0.5 * std::atan2(x.chi1, x.chi2);
      if (theta < 0) theta += M_PI;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 10000; ++j) {
      const double y = j / 10000.0;
      best = std::min(best, std::sqrt(objective_f(st, std::atanh(y), theta) / 2));
    }
    const GammaCBlock gc = gamma_c_block(st);
    auto [dh, Dh] = homodyne_invariants(st, x, gc, theta);
    const double fh = dh - std::sqrt(std::max(0.0, dh * dh - 4 * Dh));
    best = std::min(best, std::sqrt(std::max(0.0, fh / 2)));
    CHECK(best >= ana.mu2 - 1e-9);
    CHECK(best - ana.mu2 <= 1e-6);
  }
}

TEST_CASE("pure isotropic limit prefers homodyne") {
  std::mt19937_64 rng(149);
  for (int t = 0; t < 20; ++t) {
    const CovarianceMatrix g = testutil::random_pure_cm(3, rng);
    const ThreeModeState st = ThreeModeState::standardized_from(g);
    CHECK(isotropic_optimal(st, 1.0).tag == Strategy::homodyne);
  }
}
