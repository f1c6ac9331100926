#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "risopt/phase.hpp"
#include "risopt/problems.hpp"
#include "risopt/types.hpp"

namespace risopt {

enum class Method {
  kSdr,
  kPenalty,
  kMm,
  kGd,
  kManifold,
  kCrPg,
  kBruteForce,
  kAoDiscrete,
  kFixed,  // leaves e untouched; used to isolate the x block
};

std::string method_name(Method m);
Method parse_method(const std::string& name);
/// The six continuous-phase methods in the order used by reports.
const std::vector<Method>& continuous_methods();

struct LineSearchConfig {
  double c1 = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;
};

struct SdrConfig {
  int admm_iters = 5000;
  double admm_rho = 1.0;
  double admm_tol = 1e-8;
  int n_randomizations = 100;
};

struct PenaltyConfig {
  double mu0 = 0.5;
  double mu_decay = 0.7;
  /// Penalty weight per unit of 1/mu, relative to ||C||_F / (M+1) of the
  /// lifted cost; keeps the schedule independent of the objective's scale.
  double relative_weight = 0.01;
};

struct SolverConfig {
  Method method = Method::kManifold;
  int max_iters = 100;
  double rel_tol = 1e-4;
  SdrConfig sdr;
  PenaltyConfig penalty;
  LineSearchConfig line_search;
  int gd_starts = 8;
  int ao_sweeps = 100;
  int levels = 8;             // discrete methods
  int brute_force_max_m = 8;  // brute force capacity cap on M
  int dinkelbach_rounds = 30;
  double dinkelbach_tol = 1e-6;
  PhaseModel model = C1Model{};  // gd: C1/C2/C3; cr_pg: C1 (relaxed) or C2
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on out-of-range fields.
  void validate() const;
};

enum class SolverStatus { kConverged, kMaxIters, kInfeasible, kNumericalFailure };

std::string status_name(SolverStatus s);

struct SolverReport {
  Method method = Method::kManifold;
  PhaseVector final_e;
  double final_objective = 0.0;
  std::vector<double> objective_trajectory;
  int iterations = 0;
  double wall_time = 0.0;  // seconds
  double feasibility_residual = 0.0;
  SolverStatus status = SolverStatus::kConverged;
  /// SDR: certified lower bound of the relaxation (last round). CR-PG: value
  /// of the relaxed problem at the point before the terminal projection.
  std::optional<double> relaxed_value;
  /// gd/manifold: gradient norm at the returned point.
  std::optional<double> stationarity;
  nlohmann::json diagnostics = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// Stationarity threshold used by gd and manifold: 1e-5 (1 + |f|).
double stationarity_threshold(double f);

SolverReport solve_mm(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg);
SolverReport solve_gd(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg);
SolverReport solve_manifold(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg);
SolverReport solve_cr_pg(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg);
struct SolverContext;

/// `ctx` (optional) carries splitting state between calls on closely related
/// subproblems, as in consecutive BCD rounds; it never changes the result
/// contract, only the starting point of the splitting loop.
SolverReport solve_sdr(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg,
                       SolverContext* ctx = nullptr);
SolverReport solve_penalty(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg,
                           SolverContext* ctx = nullptr);

/// Exhaustive search over L^M points; throws CapacityError when M exceeds
/// cfg.brute_force_max_m or L^M exceeds 1e8.
SolverReport brute_force_discrete(const PhaseObjective& obj, int levels, const SolverConfig& cfg);

/// Cyclic element-wise search over the L levels; e0 is quantized to the grid.
SolverReport ao_discrete(const PhaseObjective& obj, const CVector& e0, int levels,
                         const SolverConfig& cfg);

/// Dispatches on cfg.method.
SolverReport solve(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg,
                   SolverContext* ctx = nullptr);

/// Objective in theta-space, theta -> f(e(theta)) for the given amplitude model,
/// with its gradient df/dtheta_m = 2 Re(conj(g_m) de_m/dtheta_m).
CVector coefficients_from_theta(const RVector& theta, const PhaseModel& model);
RVector theta_gradient(const PhaseObjective& obj, const RVector& theta, const PhaseModel& model);

/// Riemannian gradient on the complex circle manifold: g - Re(g .* conj(e)) .* e.
CVector riemannian_gradient(const CVector& egrad, const CVector& e);

namespace sdp {

struct Options {
  int max_iters = 5000;
  double rho = 1.0;
  double tol = 1e-8;
};

struct WarmStart {
  CMatrix Z;
  CMatrix U;
  double rho = 1.0;
};

struct Result {
  CMatrix Q;  // PSD iterate
  double primal_value = 0.0;  // <C, Q>
  double dual_bound = 0.0;    // certified lower bound of min <C,Q>
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  WarmStart state;
};

/// min <C, Q> s.t. Q PSD, Q_mm = 1, by ADMM alternating the diagonal-constrained
/// affine step with PSD projection. The dual bound comes from the multipliers
/// of the diagonal constraint, shifted until the dual slack is PSD, so it is a
/// valid lower bound at any iteration.
Result solve_diag_constrained(const CMatrix& C, const Options& opts,
                              const WarmStart* warm = nullptr);

/// [[A, b], [b^H, 0]], so that [e;1]^H C [e;1] + c0 equals the model value.
CMatrix homogenize(const QuadraticModel& model);

/// Phase of the first M entries after dividing by the last one.
CVector dehomogenize(const CVector& v);

}  // namespace sdp

struct SolverContext {
  std::optional<sdp::WarmStart> sdp_warm;
};

}  // namespace risopt
