#include "risopt/solvers.hpp"
#include "solver_util.hpp"

namespace risopt {

// Majorization-minimization on the unit circle. On |e_m| = 1 the concave part
// e^H (A - lambda_max I) e lies below its tangent at e^(r), so the surrogate is
// linear in e with gradient q = b + (A - lambda_max I) e^(r); its minimizer on
// the circle is the phase of -q.
//
// Ratio objectives go through Dinkelbach rounds: the model is frozen for a
// round and MM runs on it until the model value settles. Each round starts at
// the tangent point, so the ratio cannot get worse from one round to the next.
SolverReport solve_mm(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg) {
  cfg.validate();
  detail::require_unit_amplitude(cfg, "mm");
  detail::Stopwatch clock;
  SolverReport report;
  report.method = Method::kMm;

  CVector e = detail::unit_start(obj, e0);
  double f = obj.value(e);
  report.objective_trajectory.push_back(f);

  const int max_rounds = obj.is_quadratic() ? 1 : cfg.dinkelbach_rounds;
  bool hit_max_iters = false;
  int rounds = 0;
  for (int round = 0; round < max_rounds; ++round) {
    rounds = round + 1;
    const QuadraticModel model = obj.quadratic_model(e);
    const double lambda_max = model.A.lambda_max();
    CVector inner = e;
    double m = model.value(inner);
    bool settled = false;
    for (int it = 0; it < cfg.max_iters; ++it) {
      const CVector q = model.b + model.A.apply(inner) - lambda_max * inner;
      CVector next = project_unit_circle_coeffs(-q);
      const double m_next = model.value(next);
      ++report.iterations;
      // Surrogate ties can only come from rounding; keep the incumbent then.
      if (m_next > m) {
        settled = true;
        break;
      }
      inner = std::move(next);
      const double m_prev = m;
      m = m_next;
      if (obj.is_quadratic()) report.objective_trajectory.push_back(m);
      if (detail::small_relative_change(m_prev, m, cfg.rel_tol)) {
        settled = true;
        break;
      }
    }
    hit_max_iters = !settled;
    if (obj.is_quadratic()) {
      e = std::move(inner);
      f = m;
      break;
    }
    const double f_next = obj.value(inner);
    if (!(f_next < f)) break;
    e = std::move(inner);
    const double f_prev = f;
    f = f_next;
    report.objective_trajectory.push_back(f);
    if (detail::small_relative_change(f_prev, f, cfg.dinkelbach_tol)) break;
  }
  report.status = hit_max_iters ? SolverStatus::kMaxIters : SolverStatus::kConverged;
  report.diagnostics["dinkelbach_rounds"] = rounds;
  detail::finish(report, obj, project_unit_circle(e), clock);
  return report;
}

}  // namespace risopt
