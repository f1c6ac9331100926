#include <cmath>

#include "risopt/json_format.hpp"
#include "risopt/solvers.hpp"
#include "solver_util.hpp"

namespace risopt {

std::string method_name(Method m) {
  switch (m) {
    case Method::kSdr: return "sdr";
    case Method::kPenalty: return "penalty";
    case Method::kMm: return "mm";
    case Method::kGd: return "gd";
    case Method::kManifold: return "manifold";
    case Method::kCrPg: return "cr_pg";
    case Method::kBruteForce: return "brute_force";
    case Method::kAoDiscrete: return "ao_discrete";
    case Method::kFixed: return "fixed";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (const Method m : {Method::kSdr, Method::kPenalty, Method::kMm, Method::kGd,
                         Method::kManifold, Method::kCrPg, Method::kBruteForce,
                         Method::kAoDiscrete, Method::kFixed}) {
    if (method_name(m) == name) return m;
  }
  throw InvalidArgument("unknown method '" + name + "'");
}

const std::vector<Method>& continuous_methods() {
  static const std::vector<Method> methods = {Method::kSdr, Method::kPenalty, Method::kMm,
                                              Method::kGd,  Method::kManifold, Method::kCrPg};
  return methods;
}

std::string status_name(SolverStatus s) {
  switch (s) {
    case SolverStatus::kConverged: return "converged";
    case SolverStatus::kMaxIters: return "max_iters";
    case SolverStatus::kInfeasible: return "infeasible";
    case SolverStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
  if (!(penalty.mu_decay > 0.0 && penalty.mu_decay < 1.0)) {
    throw InvalidArgument("mu_decay must lie in (0, 1)");
  }
  if (!(penalty.mu0 > 0.0)) throw InvalidArgument("mu0 must be positive");
  if (!(penalty.relative_weight > 0.0)) throw InvalidArgument("relative_weight must be positive");
  if (sdr.admm_iters < 1 || !(sdr.admm_rho > 0.0) || !(sdr.admm_tol > 0.0)) {
    throw InvalidArgument("ADMM iterations, rho and tolerance must be positive");
  }
  if (sdr.n_randomizations < 1) throw InvalidArgument("n_randomizations must be at least 1");
  if (!(line_search.c1 > 0.0 && line_search.c1 < 1.0)) {
    throw InvalidArgument("Armijo c1 must lie in (0, 1)");
  }
  if (!(line_search.backtrack > 0.0 && line_search.backtrack < 1.0)) {
    throw InvalidArgument("backtrack factor must lie in (0, 1)");
  }
  if (!(line_search.initial_step > 0.0)) throw InvalidArgument("initial step must be positive");
  if (gd_starts < 1) throw InvalidArgument("gd_starts must be at least 1");
  if (ao_sweeps < 1) throw InvalidArgument("ao_sweeps must be at least 1");
  if (levels < 2) throw InvalidArgument("levels must be at least 2");
  if (dinkelbach_rounds < 1 || !(dinkelbach_tol > 0.0)) {
    throw InvalidArgument("Dinkelbach rounds and tolerance must be positive");
  }
  validate_model(model);
}

double stationarity_threshold(double f) { return 1e-5 * (1.0 + std::abs(f)); }

nlohmann::json SolverReport::to_json() const {
  nlohmann::json j = {
      {"method", method_name(method)},
      {"status", status_name(status)},
      {"iterations", iterations},
      {"wall_time_s", std::round(wall_time * 1e9) / 1e9},
      {"final_objective", final_objective},
      {"feasibility_residual", feasibility_residual},
      {"trajectory", objective_trajectory},
      {"final_e", final_e.to_json()},
  };
  if (relaxed_value) j["relaxed_value"] = *relaxed_value;
  if (stationarity) j["stationarity"] = *stationarity;
  if (!diagnostics.empty()) j["diagnostics"] = diagnostics;
  return j;
}

namespace detail {

bool small_relative_change(double previous, double current, double rel_tol) {
  return std::abs(current - previous) <= rel_tol * std::max(std::abs(previous), 1e-12);
}

void finish(SolverReport& report, const PhaseObjective& obj, const PhaseVector& e,
            const Stopwatch& clock) {
  report.final_e = e;
  report.final_objective = obj.value(e.coefficients());
  report.feasibility_residual = e.feasibility_residual();
  report.wall_time = clock.seconds();
}

CVector unit_start(const PhaseObjective& obj, const CVector& e0) {
  if (e0.size() != obj.dim()) {
    throw DimensionError("initial point has length " + std::to_string(e0.size()) +
                         ", objective expects " + std::to_string(obj.dim()));
  }
  return project_unit_circle_coeffs(e0);
}

void require_unit_amplitude(const SolverConfig& cfg, const char* who) {
  const auto* c1 = std::get_if<C1Model>(&cfg.model);
  if (c1 == nullptr || std::abs(c1->amplitude - 1.0) > 1e-15) {
    throw InvalidArgument(std::string(who) + " works on the unit circle (C1 amplitude 1)");
  }
}

}  // namespace detail

SolverReport solve(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg,
                   SolverContext* ctx) {
  switch (cfg.method) {
    case Method::kSdr: return solve_sdr(obj, e0, cfg, ctx);
    case Method::kPenalty: return solve_penalty(obj, e0, cfg, ctx);
    case Method::kMm: return solve_mm(obj, e0, cfg);
    case Method::kGd: return solve_gd(obj, e0, cfg);
    case Method::kManifold: return solve_manifold(obj, e0, cfg);
    case Method::kCrPg: return solve_cr_pg(obj, e0, cfg);
    case Method::kBruteForce: return brute_force_discrete(obj, cfg.levels, cfg);
    case Method::kAoDiscrete: return ao_discrete(obj, e0, cfg.levels, cfg);
    case Method::kFixed: {
      detail::Stopwatch clock;
      SolverReport report;
      report.method = Method::kFixed;
      if (e0.size() != obj.dim()) throw DimensionError("initial point has the wrong length");
      const bool unit = e0.size() == 0 || (e0.cwiseAbs().array() - 1.0).abs().maxCoeff() <= 1e-9;
      const PhaseVector e =
          unit ? PhaseVector::from_coefficients(e0, C1Model{})
               : PhaseVector::from_coefficients(e0, C2Model{std::max(1.0, e0.cwiseAbs2().maxCoeff())});
      report.objective_trajectory.push_back(obj.value(e0));
      detail::finish(report, obj, e, clock);
      return report;
    }
  }
  throw InvalidArgument("unknown method");
}

}  // namespace risopt
