#include "risopt/bcd.hpp"

#include <chrono>
#include <cmath>

namespace risopt {

void BcdConfig::validate() const {
  e_method.validate();
  if (outer_max_iters < 1) throw InvalidArgument("outer_max_iters must be at least 1");
  if (!(outer_rel_tol > 0.0)) throw InvalidArgument("outer_rel_tol must be positive");
}

nlohmann::json BcdReport::to_json() const {
  nlohmann::json traj = nlohmann::json::array();
  for (const auto& p : outer_trajectory) {
    traj.push_back({{"objective", p.objective}, {"feasible", p.feasible}, {"violated", p.violated}});
  }
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rounds) rs.push_back(r.to_json());
  nlohmann::json e = nlohmann::json::array();
  for (Index m = 0; m < final_e.size(); ++m) e.push_back({final_e(m).real(), final_e(m).imag()});
  nlohmann::json j = {{"status", status_name(status)},
                      {"outer_iterations", outer_iterations},
                      {"inner_iterations", inner_iterations},
                      {"wall_time_s", std::round(wall_time * 1e9) / 1e9},
                      {"final_objective", final_objective},
                      {"outer_trajectory", traj},
                      {"rounds", rs},
                      {"final_e", e},
                      {"final_x", final_x}};
  if (!message.empty()) j["message"] = message;
  return j;
}

namespace {

BcdPoint evaluate(const Problem& problem, const CVector& e) {
  BcdPoint p;
  p.violated = problem.violated_constraints(e);
  p.feasible = p.violated.empty();
  p.objective = problem.reported_objective(e);
  return p;
}

}  // namespace

BcdReport run_bcd(Problem& problem, const std::optional<CVector>& e0, const BcdConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Index M = problem.dims().M;
  BcdReport report;
  CVector e = e0 ? *e0 : CVector::Ones(M);
  if (e.size() != M) throw DimensionError("initial phase vector must have length M");

  try {
    problem.update_x(e);
    BcdPoint p = evaluate(problem, e);
    report.outer_trajectory.push_back(p);
    double prev = p.objective;
    report.status = SolverStatus::kMaxIters;
    SolverContext ctx;
    // Each round is an e-solve at the current x followed by the x update at the
    // new e, so every recorded point is a consistent (x, e) pair.
    for (int round = 0; round < cfg.outer_max_iters; ++round) {
      const auto sub = problem.phase_objective();
      SolverReport r = solve(*sub, e, cfg.e_method, &ctx);
      e = r.final_e.coefficients();
      report.inner_iterations += r.iterations;
      const bool failed = r.status == SolverStatus::kNumericalFailure;
      if (cfg.record_trajectory) report.rounds.push_back(std::move(r));
      ++report.outer_iterations;
      problem.update_x(e);
      p = evaluate(problem, e);
      report.outer_trajectory.push_back(p);
      if (std::abs(p.objective - prev) <= cfg.outer_rel_tol * std::max(std::abs(prev), 1e-12)) {
        report.status = failed ? SolverStatus::kNumericalFailure : SolverStatus::kConverged;
        break;
      }
      prev = p.objective;
      if (failed) report.status = SolverStatus::kNumericalFailure;
    }
    report.final_objective = report.outer_trajectory.back().objective;
  } catch (const FeasibilityError& err) {
    report.status = SolverStatus::kInfeasible;
    report.message = err.what();
    report.final_objective = std::nan("");
  }
  report.final_e = e;
  report.final_x = problem.x_state_json();
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace risopt
