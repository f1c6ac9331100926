#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "risopt/problems.hpp"
#include "risopt/solvers.hpp"

namespace risopt {

struct BcdConfig {
  SolverConfig e_method;
  int outer_max_iters = 100;
  double outer_rel_tol = 1e-4;
  bool record_trajectory = true;  // keep per-round SolverReports

  void validate() const;
};

struct BcdPoint {
  double objective = 0.0;  // natural sense, see Problem::reported_objective
  bool feasible = true;
  std::vector<std::string> violated;
};

struct BcdReport {
  std::vector<BcdPoint> outer_trajectory;  // entry 0 is the initial point
  std::vector<SolverReport> rounds;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double wall_time = 0.0;
  SolverStatus status = SolverStatus::kConverged;
  std::string message;
  CVector final_e;
  double final_objective = 0.0;
  nlohmann::json final_x;

  nlohmann::json to_json() const;
};

/// Alternates update_x and the configured e-solver. With no e0 the run starts
/// from the all-ones phase; x0 always comes from one update_x at e0.
/// `problem` is left holding the final x.
BcdReport run_bcd(Problem& problem, const std::optional<CVector>& e0, const BcdConfig& cfg);

}  // namespace risopt
