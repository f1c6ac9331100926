#include <cmath>
#include <vector>

#include "risopt/solvers.hpp"
#include "solver_util.hpp"

namespace risopt {

namespace {

std::vector<Complex> level_points(int levels) {
  std::vector<Complex> pts(static_cast<std::size_t>(levels));
  for (int l = 0; l < levels; ++l) pts[static_cast<std::size_t>(l)] = std::polar(1.0, level_angle(l, levels));
  return pts;
}

PhaseVector on_grid(const std::vector<int>& idx, int levels) {
  RVector theta(static_cast<Index>(idx.size()));
  for (std::size_t m = 0; m < idx.size(); ++m) theta(static_cast<Index>(m)) = level_angle(idx[m], levels);
  return PhaseVector::from_theta(std::move(theta), DiscreteModel{levels, 1.0});
}

}  // namespace

SolverReport brute_force_discrete(const PhaseObjective& obj, int levels, const SolverConfig& cfg) {
  cfg.validate();
  if (levels < 2) throw InvalidArgument("levels must be at least 2");
  const Index M = obj.dim();
  if (M > cfg.brute_force_max_m) {
    throw CapacityError("brute force limited to M <= " + std::to_string(cfg.brute_force_max_m) +
                        ", got " + std::to_string(M));
  }
  if (static_cast<double>(M) * std::log10(static_cast<double>(levels)) > 8.0) {
    throw CapacityError("brute force limited to L^M <= 1e8");
  }
  detail::Stopwatch clock;
  SolverReport report;
  report.method = Method::kBruteForce;
  const auto pts = level_points(levels);

  std::vector<int> idx(static_cast<std::size_t>(M), 0);
  std::vector<int> best_idx = idx;
  CVector e = CVector::Ones(M);
  double best = obj.value(e);
  int evaluations = 1;
  // Odometer over all L^M index vectors.
  for (;;) {
    Index m = 0;
    while (m < M && idx[static_cast<std::size_t>(m)] == levels - 1) {
      idx[static_cast<std::size_t>(m)] = 0;
      e(m) = pts[0];
      ++m;
    }
    if (m == M) break;
    const int l = ++idx[static_cast<std::size_t>(m)];
    e(m) = pts[static_cast<std::size_t>(l)];
    const double f = obj.value(e);
    ++evaluations;
    if (f < best) {
      best = f;
      best_idx = idx;
    }
  }
  report.iterations = evaluations;
  report.objective_trajectory.push_back(best);
  report.status = SolverStatus::kConverged;
  report.diagnostics["evaluations"] = evaluations;
  detail::finish(report, obj, on_grid(best_idx, levels), clock);
  return report;
}

SolverReport ao_discrete(const PhaseObjective& obj, const CVector& e0, int levels,
                         const SolverConfig& cfg) {
  cfg.validate();
  if (levels < 2) throw InvalidArgument("levels must be at least 2");
  if (e0.size() != obj.dim()) throw DimensionError("initial point has the wrong length");
  detail::Stopwatch clock;
  SolverReport report;
  report.method = Method::kAoDiscrete;
  const Index M = obj.dim();
  const auto pts = level_points(levels);

  std::vector<int> idx(static_cast<std::size_t>(M));
  CVector e(M);
  for (Index m = 0; m < M; ++m) {
    const int l = nearest_level(std::arg(e0(m)), levels);
    idx[static_cast<std::size_t>(m)] = l;
    e(m) = pts[static_cast<std::size_t>(l)];
  }
  double f = obj.value(e);
  report.objective_trajectory.push_back(f);
  report.status = SolverStatus::kMaxIters;
  for (int sweep = 0; sweep < cfg.ao_sweeps; ++sweep) {
    bool changed = false;
    for (Index m = 0; m < M; ++m) {
      const int current = idx[static_cast<std::size_t>(m)];
      int best_l = current;
      double best_f = f;
      for (int l = 0; l < levels; ++l) {
        if (l == current) continue;
        e(m) = pts[static_cast<std::size_t>(l)];
        const double trial = obj.value(e);
        if (trial < best_f) {
          best_f = trial;
          best_l = l;
        }
      }
      e(m) = pts[static_cast<std::size_t>(best_l)];
      if (best_l != current) {
        idx[static_cast<std::size_t>(m)] = best_l;
        changed = true;
      }
      f = best_f;
      report.objective_trajectory.push_back(f);
    }
    ++report.iterations;
    if (!changed) {
      report.status = SolverStatus::kConverged;
      break;
    }
  }
  detail::finish(report, obj, on_grid(idx, levels), clock);
  return report;
}

}  // namespace risopt
