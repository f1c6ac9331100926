#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "risopt/phase.hpp"
#include "test_util.hpp"

using namespace risopt;
using std::numbers::pi;

TEST_CASE("unit circle projection") {
  CVector v(2);
  v << Complex(2.0, 0.0), Complex(0.0, -3.0);
  const CVector e = project_unit_circle_coeffs(v);
  CHECK(std::abs(e(0) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(e(1) - Complex(0.0, -1.0)) < 1e-15);

  std::mt19937_64 rng(1);
  const CVector u = testing::random_unit(6, rng);
  CHECK((project_unit_circle_coeffs(u) - u).norm() < 1e-15);

  CVector z(3);
  z << Complex(0.0, 0.0), Complex(-4.0, 0.0), Complex(1.0, 1.0);
  const PhaseVector p = project_unit_circle(z);
  CHECK(p.coefficients()(0) == Complex(1.0, 0.0));
  CHECK(std::abs(p.coefficients()(1) - Complex(-1.0, 0.0)) < 1e-15);
  CHECK(std::abs(p.coefficients()(2) - std::polar(1.0, pi / 4)) < 1e-15);
  CHECK(p.feasibility_residual() <= 1e-12);
}

TEST_CASE("unit ball projection") {
  CVector v(2);
  v << Complex(0.3, 0.2), Complex(3.0, 0.0);
  const CVector e = project_unit_ball(v, 1.0);
  CHECK(e(0) == v(0));
  CHECK(std::abs(e(1) - Complex(1.0, 0.0)) < 1e-15);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const CVector r = testing::random_cvector(8, rng);
    const double c = 1.5;
    const CVector p = project_unit_ball(r, c);
    for (Index m = 0; m < 8; ++m) {
      CHECK(std::norm(p(m)) <= c + 1e-12);
      if (std::norm(r(m)) <= c) CHECK(p(m) == r(m));
    }
  }
}

TEST_CASE("quantization") {
  CHECK(nearest_level(pi / 3, 4) == 1);
  CHECK(level_angle(1, 4) == doctest::Approx(pi / 2));
  // Exactly midway between levels 0 and 1, and between 3 and 0.
  CHECK(nearest_level(pi / 4, 4) == 0);
  CHECK(nearest_level(7 * pi / 4, 4) == 0);
  CHECK(nearest_level(3 * pi / 4, 4) == 1);

  RVector theta(1);
  theta << pi / 3;
  const PhaseVector q = quantize(PhaseVector::from_theta(theta, C1Model{}), 4);
  CHECK(q.theta()(0) == doctest::Approx(pi / 2));
  CHECK(std::holds_alternative<DiscreteModel>(q.model()));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (const int levels : {2, 4, 8}) {
    RVector t(10000);
    for (Index i = 0; i < t.size(); ++i) t(i) = angle(rng);
    const PhaseVector p = quantize(PhaseVector::from_theta(t, C1Model{}), levels);
    double worst = 0.0;
    for (Index i = 0; i < t.size(); ++i) {
      const double d = std::abs(std::arg(std::polar(1.0, t(i) - p.theta()(i))));
      worst = std::max(worst, d);
    }
    CHECK(worst <= pi / levels + 1e-12);
    CHECK(p.feasibility_residual() <= 1e-12);
  }
  CHECK_THROWS_AS(quantize(PhaseVector::from_theta(theta, C1Model{}), 1), InvalidArgument);
}

TEST_CASE("C3 amplitude law") {
  const C3Model p;
  CHECK(amplitude_c3(p.phi + pi / 2, p).beta == doctest::Approx(1.0));
  CHECK(amplitude_c3(p.phi - pi / 2, p).beta == doctest::Approx(p.beta_min));

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> angle(0.0, 2 * pi);
  const double h = 1e-6;
  for (int trial = 0; trial < 200; ++trial) {
    const double t = angle(rng);
    const auto a = amplitude_c3(t, p);
    CHECK(a.beta >= p.beta_min);
    CHECK(a.beta <= 1.0);
    const double fd = (amplitude_c3(t + h, p).beta - amplitude_c3(t - h, p).beta) / (2 * h);
    CHECK(std::abs(fd - a.dbeta) <= 1e-6);
  }
}

TEST_CASE("phase vector invariants per model") {
  RVector theta(3);
  theta << 0.1, 2.0, -1.0;
  CHECK(PhaseVector::from_theta(theta, C1Model{2.0}).amplitudes().isApprox(RVector::Constant(3, 2.0)));
  const PhaseVector c2 = PhaseVector::from_theta(theta, C2Model{4.0});
  CHECK(c2.amplitudes().maxCoeff() <= 2.0 + 1e-12);
  const PhaseVector c3 = PhaseVector::from_theta(theta, C3Model{});
  for (Index m = 0; m < 3; ++m) {
    const double beta = amplitude_c3(theta(m), C3Model{}).beta;
    CHECK(std::abs(c3.coefficients()(m) - std::polar(beta, theta(m))) < 1e-15);
  }
  const PhaseVector d = PhaseVector::from_theta(theta, DiscreteModel{4, 1.0});
  for (Index m = 0; m < 3; ++m) {
    const double steps = d.theta()(m) / (pi / 2);
    CHECK(std::abs(steps - std::round(steps)) < 1e-12);
  }
  CHECK_THROWS_AS(PhaseVector::from_theta(theta, C2Model{-1.0}), InvalidArgument);
  CHECK_THROWS_AS(PhaseVector::from_theta(theta, C3Model{1.0, 0.0, 1.0}), InvalidArgument);
  RVector amp(3);
  amp << 0.5, 3.0, 0.0;
  CHECK_THROWS_AS(PhaseVector::from_polar(theta, amp, C2Model{1.0}), InvalidArgument);
}

TEST_CASE("phase vector JSON round trip") {
  RVector theta(2);
  theta << 0.5, -0.25;
  const PhaseVector p = PhaseVector::from_theta(theta, C3Model{0.3, 1.0, 2.0});
  const PhaseVector back = PhaseVector::from_json(p.to_json());
  CHECK((back.coefficients() - p.coefficients()).norm() < 1e-14);
  CHECK(model_name(back.model()) == model_name(p.model()));
}
