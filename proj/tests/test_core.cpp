#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvloc/core.hpp"
#include "testutil.hpp"

#include <random>

using namespace cvloc;

TEST_CASE("symplectic form basics") {
  const Eigen::MatrixXd O = symplectic_form(3);
  CHECK((O + O.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((O * O + Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("CovarianceMatrix constructor validation") {
  CHECK_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd::Identity(3, 3)),
                  DimensionError);
  CHECK_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd::Identity(2, 4)),
                  DimensionError);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
  m(0, 1) = 0.5;  // badly asymmetric
  CHECK_THROWS_AS(CovarianceMatrix{m}, ShapeError);
}

TEST_CASE("validate_cm: vacuum, single-mode violation, example state") {
  const CovarianceMatrix vac(Eigen::MatrixXd::Identity(6, 6));
  auto rep = validate_cm(vac);
  CHECK(rep.physical);
  CHECK(rep.min_symplectic_eig == doctest::Approx(1.0).epsilon(1e-12));

  const CovarianceMatrix bad(Eigen::MatrixXd::Identity(2, 2) * 0.5);
  rep = validate_cm(bad);
  CHECK_FALSE(rep.physical);
  CHECK(rep.min_symplectic_eig == doctest::Approx(0.5).epsilon(1e-12));

  const CovarianceMatrix ex(2.0 * testutil::example_gamma_p().data);
  CHECK(validate_cm(ex).physical);
}

TEST_CASE("validate_cm rejects PSD-violating matrices even if nu >= 1") {
  // gamma with negative eigenvalues can still produce |eig(Omega gamma)| >= 1
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4, 4) * 3.0;
  g(0, 0) = g(1, 1) = -3.0;
  const auto rep = validate_cm(CovarianceMatrix(g));
  CHECK_FALSE(rep.positive_semidefinite);
  CHECK_FALSE(rep.physical);
}

TEST_CASE("symplectic eigenvalues: identity, TMSV, example") {
  auto eig1 = symplectic_eigenvalues(CovarianceMatrix(Eigen::MatrixXd::Identity(8, 8)));
  for (double v : eig1.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));

  auto eig2 = symplectic_eigenvalues(testutil::tmsv_cm(0.5));
  for (double v : eig2.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));

  auto eig3 = symplectic_eigenvalues(
      CovarianceMatrix(2.0 * testutil::example_gamma_p().data));
  REQUIRE(eig3.values.size() == 3);
  for (double v : eig3.values) CHECK(v == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("partial transpose is a p-flip involution") {
  std::mt19937_64 rng(11);
  const CovarianceMatrix g = testutil::random_physical_cm(2, rng);
  const CovarianceMatrix pt = ptranspose_two_mode(g, 1);
  // x-x entries untouched, p column of mode 1 flipped
  CHECK(pt.data(0, 0) == g.data(0, 0));
  CHECK(pt.data(0, 3) == -g.data(0, 3));
  CHECK(pt.data(3, 3) == g.data(3, 3));
  const CovarianceMatrix twice = ptranspose_two_mode(pt, 1);
  CHECK((twice.data - g.data).cwiseAbs().maxCoeff() == 0.0);

  // product state: diag CM unchanged
  Eigen::Vector4d d(1.5, 1.5, 2.5, 2.5);
  const CovarianceMatrix prod(Eigen::Matrix4d(d.asDiagonal()));
  CHECK((ptranspose_two_mode(prod, 1).data - prod.data).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("ptranspose eigenvalues: identity, TMSV, invariant formula") {
  auto [i1, i2] = ptranspose_symplectic_eigs(
      two_mode_blocks(CovarianceMatrix(Eigen::MatrixXd::Identity(4, 4))));
  CHECK(i1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(i2 == doctest::Approx(1.0).epsilon(1e-12));

  auto [m1, m2] = ptranspose_symplectic_eigs(two_mode_blocks(testutil::tmsv_cm(0.5)));
  CHECK(m2 == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  CHECK(m1 == doctest::Approx(std::exp(1.0)).epsilon(1e-10));
}

TEST_CASE("invariant formula agrees with direct eig of the transposed CM") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 1000; ++t) {
    const CovarianceMatrix g = testutil::random_physical_cm(2, rng);
    const auto [m1, m2] = ptranspose_symplectic_eigs(two_mode_blocks(g));
    const auto eigs = symplectic_eigenvalues(ptranspose_two_mode(g, 1));
    CHECK(m1 == doctest::Approx(eigs.values[0]).epsilon(1e-9));
    CHECK(m2 == doctest::Approx(eigs.values[1]).epsilon(1e-9));
  }
}

TEST_CASE("log-negativity values") {
  // product state
  Eigen::Vector4d d(2.0, 2.0, 1.0, 1.0);
  CHECK(log_negativity(CovarianceMatrix(Eigen::Matrix4d(d.asDiagonal()))) == 0.0);
  // TMSV s = 0.5
  CHECK(log_negativity(testutil::tmsv_cm(0.5)) ==
        doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-10));
  // unphysical input rejected
  CHECK_THROWS_AS(log_negativity(CovarianceMatrix(0.5 * Eigen::MatrixXd::Identity(4, 4))),
                  ValidityError);
}

TEST_CASE("log-negativity invariant under local symplectics") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 1000; ++t) {
    const CovarianceMatrix g = testutil::random_physical_cm(2, rng);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(4, 4);
    S.block<2, 2>(0, 0) = testutil::random_local_symplectic(rng);
    S.block<2, 2>(2, 2) = testutil::random_local_symplectic(rng);
    const double e1 = log_negativity(g);
    const double e2 = log_negativity(apply_symplectic(g, S));
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("random physical states stay physical") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 300; ++t) {
    const CovarianceMatrix g = testutil::random_physical_cm(3, rng);
    CHECK(validate_cm(g).physical);
    CHECK(symplectic_eigenvalues(g).min() >= 1.0 - 1e-9);
  }
}

TEST_CASE("apply_symplectic checks its argument and preserves spectra") {
  const CovarianceMatrix vac(Eigen::MatrixXd::Identity(4, 4));
  CHECK_THROWS_AS(apply_symplectic(vac, 2.0 * Eigen::MatrixXd::Identity(4, 4)),
                  std::invalid_argument);

  // balanced beam splitter leaves the vacuum invariant
  const Eigen::MatrixXd bs = beam_splitter_matrix(M_PI / 4, 0, 1, 2);
  CHECK((apply_symplectic(vac, bs).data - vac.data).cwiseAbs().maxCoeff() <
        1e-12);

  std::mt19937_64 rng(19);
  const CovarianceMatrix g = testutil::random_physical_cm(3, rng);
  const Eigen::MatrixXd S = testutil::random_symplectic(3, rng);
  const auto before = symplectic_eigenvalues(g);
  const auto after = symplectic_eigenvalues(apply_symplectic(g, S));
  for (size_t i = 0; i < before.values.size(); ++i)
    CHECK(before.values[i] == doctest::Approx(after.values[i]).epsilon(1e-9));
}

TEST_CASE("beam_splitter_matrix conventions") {
  CHECK_THROWS_AS(beam_splitter_matrix(0.3, 1, 1, 2), std::invalid_argument);
  const Eigen::MatrixXd S0 = beam_splitter_matrix(0.0, 0, 1, 2);
  CHECK(S0(0, 0) == doctest::Approx(1.0));
  CHECK(S0(2, 2) == doctest::Approx(-1.0));
  // involutive
  const Eigen::MatrixXd S = beam_splitter_matrix(0.7, 0, 2, 3);
  CHECK((S * S - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
  // symplectic
  const Eigen::MatrixXd O = symplectic_form(3);
  CHECK((S * O * S.transpose() - O).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("det_sum_2x2 identity") {
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  CHECK(det_sum_2x2(I, I) == doctest::Approx(4.0));
  Eigen::Matrix2d Q;
  Q << 2, 1, 3, 5;
  CHECK(det_sum_2x2(Eigen::Matrix2d::Zero(), Q) == doctest::Approx(Q.determinant()));
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 1000; ++t) {
    Eigen::Matrix2d P, R;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        P(i, j) = nd(rng);
        R(i, j) = nd(rng);
      }
    CHECK(det_sum_2x2(P, R) ==
          doctest::Approx((P + R).determinant()).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("pure states satisfy (Omega gamma)^2 = -identity") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; ++t) {
    const CovarianceMatrix g = testutil::random_pure_cm(3, rng);
    const Eigen::MatrixXd Og = symplectic_form(3) * g.data;
    CHECK((Og * Og + Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <
          1e-9);
  }
}
