#include <doctest.h>

#include <cmath>
#include <random>

#include "risopt/numerics.hpp"
#include "test_util.hpp"

using namespace risopt;
using risopt::testing::random_cmatrix;
using risopt::testing::random_cvector;
using risopt::testing::random_hermitian;

TEST_CASE("eig of the identity") {
  const auto eig = numerics::hermitian_eig(CMatrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(eig.eigenvalues(i) == doctest::Approx(1.0));
  const CMatrix gram = eig.eigenvectors.adjoint() * eig.eigenvectors;
  CHECK((gram - CMatrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("eig of a diagonal matrix sorts descending") {
  CMatrix a = CMatrix::Zero(3, 3);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  a(2, 2) = 2.0;
  const auto eig = numerics::hermitian_eig(a);
  CHECK(eig.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(eig.eigenvalues(1) == doctest::Approx(2.0));
  CHECK(eig.eigenvalues(2) == doctest::Approx(1.0));
  CHECK(std::abs(eig.eigenvectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(eig.eigenvectors(2, 1)) == doctest::Approx(1.0));
  CHECK(std::abs(eig.eigenvectors(1, 2)) == doctest::Approx(1.0));
}

TEST_CASE("eig reconstructs random Hermitian matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_hermitian(5, rng);
    const auto eig = numerics::hermitian_eig(a);
    const CMatrix back =
        eig.eigenvectors * eig.eigenvalues.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
    CHECK((back - a).norm() <= 1e-9 * a.norm());
  }
}

TEST_CASE("non-Hermitian and non-square input are rejected") {
  CMatrix a = CMatrix::Identity(2, 2);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(numerics::hermitian_eig(a), SymmetryError);
  CHECK_THROWS_AS(numerics::hermitian_eig(CMatrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("psd projection") {
  std::mt19937_64 rng(5);
  SUBCASE("PSD input is unchanged") {
    const CMatrix f = random_cmatrix(4, 4, rng);
    const CMatrix b = f * f.adjoint();
    CHECK((numerics::psd_project(b) - b).norm() < 1e-10);
  }
  SUBCASE("negative eigenvalues are clipped") {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = -1.0;
    CMatrix expected = CMatrix::Zero(2, 2);
    expected(0, 0) = 1.0;
    CHECK((numerics::psd_project(a) - expected).norm() < 1e-12);
  }
  SUBCASE("no sampled PSD candidate is closer") {
    const CMatrix a = random_hermitian(4, rng);
    const CMatrix p = numerics::psd_project(a);
    const double best = (p - a).norm();
    std::normal_distribution<double> scale(0.0, 0.3);
    int closer = 0;
    for (int s = 0; s < 10000; ++s) {
      const CMatrix d = random_cmatrix(4, 4, rng) * scale(rng);
      const CMatrix candidate = numerics::psd_project(p + 0.5 * (d + d.adjoint()));
      if ((candidate - a).norm() < best - 1e-12) ++closer;
    }
    CHECK(closer == 0);
  }
}

TEST_CASE("solve_hpd") {
  std::mt19937_64 rng(7);
  const CMatrix b = random_cmatrix(3, 2, rng);
  CHECK((numerics::solve_hpd(CMatrix::Identity(3, 3), b) - b).norm() < 1e-14);
  const CMatrix x = numerics::solve_hpd(2.0 * CMatrix::Identity(3, 3), CMatrix::Identity(3, 3));
  CHECK((x - 0.5 * CMatrix::Identity(3, 3)).norm() < 1e-14);

  const CMatrix f = random_cmatrix(6, 6, rng);
  const CMatrix a = f * f.adjoint() + 6.0 * CMatrix::Identity(6, 6);
  const CMatrix rhs = random_cmatrix(6, 3, rng);
  CHECK((a * numerics::solve_hpd(a, rhs) - rhs).norm() <= 1e-10 * rhs.norm());

  CMatrix singular = CMatrix::Identity(2, 2);
  singular(1, 1) = -1.0;
  CHECK_THROWS_AS(numerics::solve_hpd(singular, CMatrix::Identity(2, 2)), SingularMatrixError);
}

TEST_CASE("generalized Rayleigh maximizer") {
  std::mt19937_64 rng(3);
  const double noise = 0.7;
  const double power = 2.0;
  SUBCASE("no eavesdropper") {
    const CVector a = random_cvector(4, rng);
    const auto r = numerics::generalized_rayleigh_max(a, CVector::Zero(4), noise, power);
    CHECK(r.value == doctest::Approx(1.0 + power * a.squaredNorm() / noise).epsilon(1e-12));
    CHECK(r.w.squaredNorm() == doctest::Approx(power));
    CHECK(std::abs(a.dot(r.w)) == doctest::Approx(std::sqrt(power) * a.norm()).epsilon(1e-10));
  }
  SUBCASE("identical channels give ratio one") {
    const CVector a = random_cvector(4, rng);
    const auto r = numerics::generalized_rayleigh_max(a, a, noise, power);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("beats random unit-power beamformers") {
    const CVector a = random_cvector(4, rng);
    const CVector b = random_cvector(4, rng);
    const auto r = numerics::generalized_rayleigh_max(a, b, noise, power);
    const auto ratio = [&](const CVector& w) {
      return (noise + std::norm(a.dot(w))) / (noise + std::norm(b.dot(w)));
    };
    CHECK(ratio(r.w) == doctest::Approx(r.value).epsilon(1e-10));
    double sampled = 0.0;
    for (int s = 0; s < 100000; ++s) {
      CVector w = random_cvector(4, rng);
      w *= std::sqrt(power) / w.norm();
      sampled = std::max(sampled, ratio(w));
    }
    CHECK(r.value >= sampled);
  }
}

TEST_CASE("low-rank operator agrees with its dense form") {
  std::mt19937_64 rng(9);
  const CMatrix u = random_cmatrix(12, 3, rng);
  RVector w(3);
  w << 2.0, -1.0, 0.5;
  const auto op = numerics::HermitianOperator::low_rank(0.3, u, w);
  const CMatrix dense = op.to_dense();
  const auto ref = numerics::HermitianOperator::dense(dense);
  const CVector x = random_cvector(12, rng);
  CHECK((op.apply(x) - dense * x).norm() < 1e-10);
  CHECK(op.quadratic_form(x) == doctest::Approx(x.dot(dense * x).real()));
  CHECK(op.lambda_max() == doctest::Approx(ref.lambda_max()).epsilon(1e-10));
  CHECK(op.lambda_min() == doctest::Approx(ref.lambda_min()).epsilon(1e-10));
  CHECK(op.shifted(1.5).lambda_min() == doctest::Approx(ref.lambda_min() + 1.5).epsilon(1e-10));
  CHECK(op.scaled(-2.0).lambda_max() == doctest::Approx(-2.0 * ref.lambda_min()).epsilon(1e-10));
}
