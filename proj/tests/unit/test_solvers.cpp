#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "risopt/numerics.hpp"
#include "risopt/solvers.hpp"
#include "test_util.hpp"

using namespace risopt;
using risopt::testing::random_cvector;
using risopt::testing::random_unit;
using std::numbers::pi;

namespace {

double grid_min(const PhaseObjective& obj, int G) {
  const Index M = obj.dim();
  long total = 1;
  for (Index m = 0; m < M; ++m) total *= G;
  double best = std::numeric_limits<double>::infinity();
  CVector e(M);
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    for (Index m = 0; m < M; ++m) {
      e(m) = std::polar(1.0, 2 * pi * static_cast<double>(rest % G) / G);
      rest /= G;
    }
    best = std::min(best, obj.value(e));
  }
  return best;
}

bool non_increasing(const std::vector<double>& t, double slack) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] > t[i - 1] + slack) return false;
  }
  return true;
}

QuadraticObjective quadratic(CMatrix A, CVector b) {
  QuadraticModel model;
  model.A = numerics::HermitianOperator::dense(std::move(A));
  model.b = std::move(b);
  return QuadraticObjective(std::move(model));
}

SolverConfig config(Method m, std::uint64_t seed = 0) {
  SolverConfig cfg;
  cfg.method = m;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("method names round trip") {
  for (const Method m : continuous_methods()) CHECK(parse_method(method_name(m)) == m);
  CHECK(continuous_methods().size() == 6);
  CHECK_THROWS_AS(parse_method("simplex"), InvalidArgument);
  SolverConfig cfg;
  cfg.rel_tol = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("mm") {
  std::mt19937_64 rng(1);
  SUBCASE("scaled identity curvature converges in one step") {
    const CVector b = random_cvector(4, rng);
    const auto obj = quadratic(3.0 * CMatrix::Identity(4, 4), b);
    const auto r = solve_mm(obj, CVector::Ones(4), config(Method::kMm));
    const CVector expected = -project_unit_circle_coeffs(b);
    CHECK((r.final_e.coefficients() - expected).norm() < 1e-9);
    CHECK(r.objective_trajectory.size() <= 3);
  }
  SUBCASE("fixed points are stationary") {
    const CMatrix f = testing::random_cmatrix(4, 4, rng);
    const auto obj = quadratic(f * f.adjoint(), CVector::Zero(4));
    SolverConfig cfg = config(Method::kMm);
    cfg.max_iters = 5000;
    cfg.rel_tol = 1e-14;
    const auto r = solve_mm(obj, random_unit(4, rng), cfg);
    const CVector e = r.final_e.coefficients();
    CHECK(riemannian_gradient(obj.gradient(e), e).norm() < 1e-4 * (1.0 + obj.gradient(e).norm()));
  }
  SUBCASE("small instances against the grid") {
    int within = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto obj = random_quadratic(3, s);
      const auto r = solve_mm(obj, CVector::Ones(3), config(Method::kMm, s));
      if (r.final_objective <= grid_min(obj, 72) + 1e-2) ++within;
      CHECK(non_increasing(r.objective_trajectory, 1e-10));
    }
    CHECK(within >= 9);
  }
  SUBCASE("ratio objectives improve round over round") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto cs = sample_channels({8, 6, 1}, FadingModel::rayleigh(), 60 + s);
      auto p = make_problem(ProblemKind::kSecrecy, cs, {{"p_max", 1000.0}});
      p->update_x(CVector::Ones(8));
      const auto obj = p->phase_objective();
      const auto r = solve_mm(*obj, CVector::Ones(8), config(Method::kMm, s));
      CHECK(non_increasing(r.objective_trajectory, 0.0));
      CHECK(r.final_objective <= obj->value(CVector::Ones(8)));
      CHECK(r.diagnostics["dinkelbach_rounds"].get<int>() >= 1);
      // A single frozen-model MM step is what the rounds improve upon.
      SolverConfig one = config(Method::kMm, s);
      one.dinkelbach_rounds = 1;
      one.max_iters = 1;
      CHECK(r.final_objective <= solve_mm(*obj, CVector::Ones(8), one).final_objective);
    }
  }
}

TEST_CASE("gd") {
  std::mt19937_64 rng(2);
  SUBCASE("stationary start returns e0") {
    const auto obj = quadratic(CMatrix::Identity(3, 3), CVector::Zero(3));
    const CVector e0 = random_unit(3, rng);
    SolverConfig cfg = config(Method::kGd);
    cfg.gd_starts = 1;
    const auto r = solve_gd(obj, e0, cfg);
    CHECK(r.status == SolverStatus::kConverged);
    CHECK((r.final_e.coefficients() - e0).norm() < 1e-12);
  }
  SUBCASE("theta gradient against central differences") {
    const auto obj = random_quadratic(6, 4);
    std::uniform_real_distribution<double> angle(0.0, 2 * pi);
    for (const PhaseModel model : {PhaseModel{C1Model{}}, PhaseModel{C3Model{}}}) {
      for (int trial = 0; trial < 20; ++trial) {
        RVector theta(6);
        RVector d(6);
        for (Index m = 0; m < 6; ++m) {
          theta(m) = angle(rng);
          d(m) = angle(rng) - pi;
        }
        const double t = 1e-6;
        const double fd = (obj.value(coefficients_from_theta(theta + t * d, model)) -
                           obj.value(coefficients_from_theta(theta - t * d, model))) /
                          (2 * t);
        const double an = theta_gradient(obj, theta, model).dot(d);
        CHECK(std::abs(fd - an) / std::max(std::abs(an), 1e-8) < 1e-5);
      }
    }
  }
  SUBCASE("best of eight starts finds the M=2 grid minimum") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto obj = random_quadratic(2, 50 + s);
      const auto r = solve_gd(obj, CVector::Ones(2), config(Method::kGd, s));
      CHECK(r.final_objective <= grid_min(obj, 720) + 1e-3);
      CHECK(non_increasing(r.objective_trajectory, 1e-10));
    }
  }
  SUBCASE("C3 amplitudes follow the law") {
    const auto obj = random_quadratic(5, 6);
    SolverConfig cfg = config(Method::kGd);
    cfg.model = C3Model{};
    const auto r = solve_gd(obj, CVector::Ones(5), cfg);
    CHECK(r.feasibility_residual <= 1e-12);
    CHECK(non_increasing(r.objective_trajectory, 1e-10));
  }
}

TEST_CASE("manifold") {
  std::mt19937_64 rng(3);
  SUBCASE("riemannian gradient is tangent") {
    const CVector e = random_unit(7, rng);
    const CVector g = riemannian_gradient(random_cvector(7, rng), e);
    for (Index m = 0; m < 7; ++m) CHECK(std::abs((g(m) * std::conj(e(m))).real()) < 1e-14);
  }
  SUBCASE("iterates stay feasible and tangent") {
    const auto obj = random_quadratic(12, 7);
    const auto r = solve_manifold(obj, CVector::Ones(12), config(Method::kManifold));
    CHECK(r.feasibility_residual <= 1e-12);
    CHECK(r.diagnostics["max_tangency_defect"].get<double>() < 1e-9);
    CHECK(non_increasing(r.objective_trajectory, 1e-10));
  }
  SUBCASE("small instances against the grid") {
    int within = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto obj = random_quadratic(3, s);
      const auto r = solve_manifold(obj, CVector::Ones(3), config(Method::kManifold, s));
      if (r.final_objective <= grid_min(obj, 72) + 1e-3) ++within;
    }
    CHECK(within >= 9);
  }
}

TEST_CASE("cr_pg") {
  std::mt19937_64 rng(4);
  SUBCASE("unit-modulus relaxed optimum is kept") {
    // Minimizing 2 Re(b^H e) over the ball lands on -b/|b| elementwise.
    const CVector b = random_cvector(4, rng);
    const auto obj = quadratic(CMatrix::Zero(4, 4), b);
    SolverConfig cfg = config(Method::kCrPg);
    cfg.rel_tol = 1e-14;
    cfg.max_iters = 1000;
    const auto r = solve_cr_pg(obj, CVector::Zero(4), cfg);
    CHECK(std::abs(*r.relaxed_value - r.final_objective) < 1e-12);
    CHECK((r.final_e.coefficients() + project_unit_circle_coeffs(b)).norm() < 1e-9);
  }
  SUBCASE("relaxed trajectory descends and bounds the projection") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto obj = random_quadratic(3, s);
      const auto r = solve_cr_pg(obj, CVector::Ones(3), config(Method::kCrPg, s));
      CHECK(non_increasing(r.objective_trajectory, 1e-10));
      CHECK(r.final_objective >= *r.relaxed_value - 1e-9);
      CHECK(r.feasibility_residual <= 1e-12);
    }
  }
  SUBCASE("C2 returns the relaxed point") {
    const auto obj = random_quadratic(5, 9);
    SolverConfig cfg = config(Method::kCrPg);
    cfg.model = C2Model{0.5};
    const auto r = solve_cr_pg(obj, CVector::Zero(5), cfg);
    CHECK(r.final_e.amplitudes().maxCoeff() <= std::sqrt(0.5) + 1e-12);
    CHECK(r.final_objective == doctest::Approx(*r.relaxed_value));
  }
}

TEST_CASE("sdr") {
  SUBCASE("single element is tight") {
    CMatrix A(1, 1);
    A(0, 0) = 2.0;
    CVector b(1);
    b(0) = Complex(1.0, 2.0);
    const auto obj = quadratic(A, b);
    const auto r = solve_sdr(obj, CVector::Ones(1), config(Method::kSdr));
    CHECK(r.status == SolverStatus::kConverged);
    CHECK(std::abs(r.final_e.coefficients()(0) + b(0) / std::abs(b(0))) < 1e-6);
    CHECK(*r.relaxed_value == doctest::Approx(r.final_objective).epsilon(1e-6));
    CHECK(r.diagnostics["rounds"][0]["rank_one"].get<bool>());
  }
  SUBCASE("relaxation bounds the grid and recovery is close") {
    int close = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto obj = random_quadratic(3, s);
      const double g = grid_min(obj, 72);
      const auto r = solve_sdr(obj, CVector::Ones(3), config(Method::kSdr, s));
      CHECK(*r.relaxed_value <= g + 1e-9);
      CHECK(r.final_objective >= *r.relaxed_value - 1e-9);
      if (r.final_objective <= g + 0.05 * std::abs(g)) ++close;
    }
    CHECK(close >= 9);
  }
  SUBCASE("same seed, same report") {
    const auto obj = random_quadratic(8, 3);
    const auto a = solve_sdr(obj, CVector::Ones(8), config(Method::kSdr, 5));
    const auto b = solve_sdr(obj, CVector::Ones(8), config(Method::kSdr, 5));
    CHECK(a.final_objective == b.final_objective);
    CHECK(a.objective_trajectory == b.objective_trajectory);
  }
  SUBCASE("ADMM bound is valid at any iteration count") {
    const auto obj = random_quadratic(6, 4);
    const CMatrix C = sdp::homogenize(obj.quadratic_model(CVector::Ones(6)));
    const auto exact = sdp::solve_diag_constrained(C, {});
    for (const int iters : {5, 50, 500}) {
      const auto partial = sdp::solve_diag_constrained(C, {iters, 1.0, 1e-8});
      CHECK(partial.dual_bound <= exact.primal_value + 1e-6 * std::abs(exact.primal_value));
    }
    CHECK(exact.converged);
    CHECK(std::abs(exact.primal_value - exact.dual_bound) <= 1e-5 * std::abs(exact.primal_value));
  }
}

TEST_CASE("penalty") {
  SUBCASE("converged runs end rank one") {
    int within = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto obj = random_quadratic(3, s);
      const auto r = solve_penalty(obj, CVector::Ones(3), config(Method::kPenalty, s));
      if (r.status == SolverStatus::kConverged) {
        CHECK(r.diagnostics["penalty_term"].get<double>() <= 1e-8);
      }
      if (r.final_objective <= grid_min(obj, 72) + 1e-2) ++within;
      CHECK(r.feasibility_residual <= 1e-12);
    }
    CHECK(within >= 9);
  }
  SUBCASE("rank-one lift has no penalty") {
    std::mt19937_64 rng(5);
    CVector lifted(5);
    lifted.head(4) = random_unit(4, rng);
    lifted(4) = 1.0;
    const CMatrix Q = lifted * lifted.adjoint();
    const auto eig = numerics::hermitian_eig(Q);
    CHECK(std::abs(Q.trace().real() - eig.eigenvalues(0)) < 1e-12);
  }
}

TEST_CASE("brute force") {
  SUBCASE("hand enumeration") {
    CVector u(2);
    u << 1.0, 1.0;
    const auto obj = quadratic(-(u * u.adjoint()), CVector::Zero(2));
    const auto r = brute_force_discrete(obj, 2, config(Method::kBruteForce));
    CHECK(r.final_objective == doctest::Approx(-4.0));
    const CVector e = r.final_e.coefficients();
    CHECK(std::abs(e(0) - e(1)) < 1e-12);
    CHECK(r.diagnostics["evaluations"].get<int>() == 4);
  }
  SUBCASE("single element") {
    const auto obj = random_quadratic(1, 8);
    const auto r = brute_force_discrete(obj, 5, config(Method::kBruteForce));
    double best = std::numeric_limits<double>::infinity();
    for (int l = 0; l < 5; ++l) {
      CVector e(1);
      e(0) = std::polar(1.0, level_angle(l, 5));
      best = std::min(best, obj.value(e));
    }
    CHECK(r.final_objective == best);
  }
  SUBCASE("AO cannot leave the optimum") {
    const auto obj = random_quadratic(5, 9);
    const auto bf = brute_force_discrete(obj, 4, config(Method::kBruteForce));
    const auto ao = ao_discrete(obj, bf.final_e.coefficients(), 4, config(Method::kAoDiscrete));
    CHECK(ao.final_objective == bf.final_objective);
  }
  SUBCASE("capacity") {
    const auto obj = random_quadratic(9, 1);
    CHECK_THROWS_AS(brute_force_discrete(obj, 2, config(Method::kBruteForce)), CapacityError);
  }
}

TEST_CASE("ao_discrete") {
  SUBCASE("one element equals brute force") {
    const auto obj = random_quadratic(1, 10);
    const auto bf = brute_force_discrete(obj, 8, config(Method::kBruteForce));
    const auto ao = ao_discrete(obj, CVector::Ones(1), 8, config(Method::kAoDiscrete));
    CHECK(ao.final_objective == bf.final_objective);
  }
  SUBCASE("monotone and close to brute force") {
    int within = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto obj = random_quadratic(6, s);
      const auto bf = brute_force_discrete(obj, 4, config(Method::kBruteForce));
      // Started from the quantized continuous solution.
      const auto warm = solve_manifold(obj, CVector::Ones(6), config(Method::kManifold));
      const auto ao =
          ao_discrete(obj, warm.final_e.coefficients(), 4, config(Method::kAoDiscrete));
      CHECK(non_increasing(ao.objective_trajectory, 1e-10));
      CHECK(ao.final_objective >= bf.final_objective - 1e-12);
      if (ao.final_objective - bf.final_objective <= 0.03 * std::abs(bf.final_objective)) ++within;
      const auto& model = ao.final_e.model();
      CHECK(std::holds_alternative<DiscreteModel>(model));
    }
    CHECK(within >= 17);
  }
}

TEST_CASE("dispatch and reports") {
  const auto obj = random_quadratic(6, 11);
  for (const Method m : continuous_methods()) {
    const auto r = solve(obj, CVector::Ones(6), config(m, 1));
    CHECK(r.method == m);
    CHECK(r.feasibility_residual <= 1e-9);
    CHECK(r.final_objective == doctest::Approx(obj.value(r.final_e.coefficients())));
    const auto j = r.to_json();
    CHECK(j["method"] == method_name(m));
  }
  SolverConfig bad = config(Method::kMm);
  bad.model = C3Model{};
  CHECK_THROWS_AS(solve(obj, CVector::Ones(6), bad), InvalidArgument);
  CHECK_THROWS_AS(solve(obj, CVector::Ones(5), config(Method::kManifold)), DimensionError);
}
