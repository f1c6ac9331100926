#include <cmath>
#include <random>

#include "risopt/solvers.hpp"
#include "solver_util.hpp"

namespace risopt {
namespace {

constexpr double kMinStep = 1e-18;
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

struct RunResult {
  RVector theta;
  double f = 0.0;
  double grad_norm = 0.0;
  std::vector<double> trajectory;
  int iterations = 0;
  SolverStatus status = SolverStatus::kMaxIters;
};

double theta_value(const PhaseObjective& obj, const RVector& theta, const PhaseModel& model) {
  return obj.value(coefficients_from_theta(theta, model));
}

RunResult gd_run(const PhaseObjective& obj, RVector theta, const SolverConfig& cfg) {
  const auto& ls = cfg.line_search;
  RunResult run;
  double f = theta_value(obj, theta, cfg.model);
  RVector grad = theta_gradient(obj, theta, cfg.model);
  run.trajectory.push_back(f);
  run.status = SolverStatus::kMaxIters;
  if (grad.norm() <= stationarity_threshold(f)) {
    run.status = SolverStatus::kConverged;
  } else {
    for (int it = 0; it < cfg.max_iters; ++it) {
      const double g2 = grad.squaredNorm();
      double step = ls.initial_step;
      RVector trial;
      double f_trial = f;
      bool accepted = false;
      while (step >= kMinStep) {
        trial = theta - step * grad;
        f_trial = theta_value(obj, trial, cfg.model);
        if (f_trial <= f - ls.c1 * step * g2) {
          accepted = true;
          break;
        }
        step *= ls.backtrack;
      }
      ++run.iterations;
      if (!accepted) {
        // Rounding noise near a stationary point can defeat the Armijo test.
        run.status = std::sqrt(g2) <= 1e3 * stationarity_threshold(f)
                         ? SolverStatus::kConverged
                         : SolverStatus::kNumericalFailure;
        break;
      }
      const double f_prev = f;
      theta = std::move(trial);
      f = f_trial;
      grad = theta_gradient(obj, theta, cfg.model);
      run.trajectory.push_back(f);
      const bool stationary = grad.norm() <= stationarity_threshold(f);
      if (stationary && detail::small_relative_change(f_prev, f, cfg.rel_tol)) {
        run.status = SolverStatus::kConverged;
        break;
      }
    }
  }
  run.theta = std::move(theta);
  run.f = f;
  run.grad_norm = grad.norm();
  return run;
}

}  // namespace

CVector coefficients_from_theta(const RVector& theta, const PhaseModel& model) {
  return PhaseVector::from_theta(theta, model).coefficients();
}

RVector theta_gradient(const PhaseObjective& obj, const RVector& theta, const PhaseModel& model) {
  const CVector e = coefficients_from_theta(theta, model);
  const CVector g = obj.gradient(e);
  RVector out(theta.size());
  const auto* c3 = std::get_if<C3Model>(&model);
  for (Index m = 0; m < theta.size(); ++m) {
    Complex de;
    const Complex rot = std::polar(1.0, theta(m));
    if (c3 != nullptr) {
      const AmplitudeC3 a = amplitude_c3(theta(m), *c3);
      de = Complex(a.dbeta, a.beta) * rot;
    } else {
      de = Complex(0.0, std::abs(e(m))) * rot;
    }
    out(m) = 2.0 * (std::conj(g(m)) * de).real();
  }
  return out;
}

CVector riemannian_gradient(const CVector& egrad, const CVector& e) {
  CVector out = egrad;
  for (Index m = 0; m < e.size(); ++m) {
    out(m) -= (egrad(m) * std::conj(e(m))).real() * e(m);
  }
  return out;
}

// Gradient descent on the phases with Armijo backtracking, best of several
// starts: the first is e0, the others are drawn from the solver seed.
SolverReport solve_gd(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg) {
  cfg.validate();
  if (std::holds_alternative<DiscreteModel>(cfg.model)) {
    throw InvalidArgument("gd supports the C1, C2 and C3 models");
  }
  if (e0.size() != obj.dim()) throw DimensionError("initial point has the wrong length");
  detail::Stopwatch clock;
  SolverReport report;
  report.method = Method::kGd;

  RVector theta0(e0.size());
  for (Index m = 0; m < e0.size(); ++m) {
    theta0(m) = e0(m) == Complex(0.0, 0.0) ? 0.0 : std::arg(e0(m));
  }

  std::mt19937_64 rng(detail::mix_seed(cfg.seed, 0x6d));
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  RunResult best;
  int best_start = -1;
  nlohmann::json starts = nlohmann::json::array();
  int total_iters = 0;
  for (int s = 0; s < cfg.gd_starts; ++s) {
    RVector theta = theta0;
    if (s > 0) {
      for (Index m = 0; m < theta.size(); ++m) theta(m) = angle(rng);
    }
    RunResult run = gd_run(obj, theta, cfg);
    total_iters += run.iterations;
    starts.push_back({{"start", s}, {"objective", run.f}, {"status", status_name(run.status)}});
    if (best_start < 0 || run.f < best.f) {
      best = std::move(run);
      best_start = s;
    }
  }

  report.objective_trajectory = std::move(best.trajectory);
  report.iterations = best.iterations;
  report.status = best.status;
  report.stationarity = best.grad_norm;
  report.diagnostics["starts"] = std::move(starts);
  report.diagnostics["best_start"] = best_start;
  report.diagnostics["total_iterations"] = total_iters;
  detail::finish(report, obj, PhaseVector::from_theta(best.theta, cfg.model), clock);
  return report;
}

// Riemannian conjugate gradient on the complex circle manifold: tangent
// projection of the gradient, Polak-Ribiere+ direction with the previous
// direction transported by projection, Armijo step, element-wise retraction.
SolverReport solve_manifold(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg) {
  cfg.validate();
  detail::require_unit_amplitude(cfg, "manifold");
  const auto& ls = cfg.line_search;
  detail::Stopwatch clock;
  SolverReport report;
  report.method = Method::kManifold;

  CVector e = detail::unit_start(obj, e0);
  double f = obj.value(e);
  CVector rgrad = riemannian_gradient(obj.gradient(e), e);
  CVector dir = -rgrad;
  report.objective_trajectory.push_back(f);
  report.status = SolverStatus::kMaxIters;
  double max_tangency = 0.0;

  if (rgrad.norm() <= stationarity_threshold(f)) {
    report.status = SolverStatus::kConverged;
  } else {
    for (int it = 0; it < cfg.max_iters; ++it) {
      double slope = 2.0 * rgrad.dot(dir).real();
      if (!(slope < 0.0)) {
        dir = -rgrad;
        slope = -2.0 * rgrad.squaredNorm();
      }
      double step = ls.initial_step;
      CVector trial;
      double f_trial = f;
      bool accepted = false;
      while (step >= kMinStep) {
        trial = project_unit_circle_coeffs(e + step * dir);
        f_trial = obj.value(trial);
        if (f_trial <= f + ls.c1 * step * slope) {
          accepted = true;
          break;
        }
        step *= ls.backtrack;
      }
      ++report.iterations;
      if (!accepted) {
        report.status = rgrad.norm() <= 1e3 * stationarity_threshold(f)
                            ? SolverStatus::kConverged
                            : SolverStatus::kNumericalFailure;
        break;
      }
      const double f_prev = f;
      e = std::move(trial);
      f = f_trial;
      const CVector rgrad_new = riemannian_gradient(obj.gradient(e), e);
      for (Index m = 0; m < e.size(); ++m) {
        max_tangency = std::max(max_tangency, std::abs((rgrad_new(m) * std::conj(e(m))).real()));
      }
      const CVector old_grad_moved = riemannian_gradient(rgrad, e);
      const double denom = rgrad.squaredNorm();
      const double beta =
          denom > 0.0 ? std::max(0.0, rgrad_new.dot(rgrad_new - old_grad_moved).real() / denom)
                      : 0.0;
      dir = -rgrad_new + beta * riemannian_gradient(dir, e);
      rgrad = rgrad_new;
      report.objective_trajectory.push_back(f);
      const bool stationary = rgrad.norm() <= stationarity_threshold(f);
      if (stationary && detail::small_relative_change(f_prev, f, cfg.rel_tol)) {
        report.status = SolverStatus::kConverged;
        break;
      }
    }
  }
  report.stationarity = rgrad.norm();
  report.diagnostics["max_tangency_defect"] = max_tangency;
  detail::finish(report, obj, project_unit_circle(e), clock);
  return report;
}

// Projected gradient on the relaxed set |e_m|^2 <= c with an Armijo test along
// the projection arc, then one projection onto |e_m| = 1 (C1 only; under C2 the
// relaxed solution is already feasible).
SolverReport solve_cr_pg(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg) {
  cfg.validate();
  const auto& ls = cfg.line_search;
  double radius = 1.0;
  bool relaxed_only = false;
  if (const auto* c2 = std::get_if<C2Model>(&cfg.model)) {
    radius = c2->radius;
    relaxed_only = true;
  } else {
    detail::require_unit_amplitude(cfg, "cr_pg");
    if (!std::holds_alternative<C1Model>(cfg.model)) {
      throw InvalidArgument("cr_pg supports the C1 and C2 models");
    }
  }
  if (e0.size() != obj.dim()) throw DimensionError("initial point has the wrong length");
  detail::Stopwatch clock;
  SolverReport report;
  report.method = Method::kCrPg;

  CVector e = project_unit_ball(e0, radius);
  double f = obj.value(e);
  report.objective_trajectory.push_back(f);
  report.status = SolverStatus::kMaxIters;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const CVector g = obj.gradient(e);
    double step = ls.initial_step;
    CVector trial;
    double f_trial = f;
    bool accepted = false;
    bool stalled = false;
    while (step >= kMinStep) {
      trial = project_unit_ball(e - step * g, radius);
      const CVector delta = trial - e;
      if (delta.norm() <= 1e-15 * (1.0 + e.norm())) {
        stalled = true;
        break;
      }
      f_trial = obj.value(trial);
      if (f_trial <= f + ls.c1 * 2.0 * g.dot(delta).real()) {
        accepted = true;
        break;
      }
      step *= ls.backtrack;
    }
    ++report.iterations;
    if (stalled) {
      report.status = SolverStatus::kConverged;
      break;
    }
    if (!accepted) {
      report.status = SolverStatus::kNumericalFailure;
      break;
    }
    const double f_prev = f;
    e = std::move(trial);
    f = f_trial;
    report.objective_trajectory.push_back(f);
    if (detail::small_relative_change(f_prev, f, cfg.rel_tol)) {
      report.status = SolverStatus::kConverged;
      break;
    }
  }
  report.relaxed_value = f;
  if (relaxed_only) {
    detail::finish(report, obj, PhaseVector::from_coefficients(e, C2Model{radius}), clock);
  } else {
    detail::finish(report, obj, project_unit_circle(e), clock);
  }
  return report;
}

}  // namespace risopt
