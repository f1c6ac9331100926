#include <algorithm>
#include <cmath>
#include <random>

#include "risopt/numerics.hpp"
#include "risopt/solvers.hpp"
#include "solver_util.hpp"

namespace risopt {
namespace sdp {

CMatrix homogenize(const QuadraticModel& model) {
  const Index m = model.dim();
  CMatrix c = CMatrix::Zero(m + 1, m + 1);
  c.topLeftCorner(m, m) = model.A.to_dense();
  c.topRightCorner(m, 1) = model.b;
  c.bottomLeftCorner(1, m) = model.b.adjoint();
  return c;
}

CVector dehomogenize(const CVector& v) {
  const Index m = v.size() - 1;
  const Complex last = v(m);
  CVector head = v.head(m);
  if (std::abs(last) > 0.0) head *= std::conj(last) / std::abs(last);
  return project_unit_circle_coeffs(head);
}

namespace {
constexpr int kBalanceEvery = 20;
}  // namespace

Result solve_diag_constrained(const CMatrix& C_in, const Options& opts, const WarmStart* warm) {
  numerics::require_hermitian(C_in, 1e-10);
  const Index n = C_in.rows();
  // diag(Q) = 1 makes the diagonal of C a constant offset; splitting on the
  // off-diagonal part alone is better conditioned.
  const double offset = C_in.diagonal().real().sum();
  CMatrix C = C_in;
  C.diagonal().setZero();
  const double c_scale = std::max(1.0, C.norm());
  Result out;
  CMatrix Z = CMatrix::Identity(n, n);
  CMatrix U = CMatrix::Zero(n, n);
  // Scale rho to the cost so the default works across problem magnitudes.
  double rho = opts.rho * c_scale / static_cast<double>(n);
  if (warm != nullptr && warm->Z.rows() == n) {
    Z = warm->Z;
    U = warm->U;
    rho = warm->rho;
  }
  CMatrix X(n, n);
  for (int it = 0; it < opts.max_iters; ++it) {
    X = Z - U - C / rho;
    X.diagonal().setOnes();
    const CMatrix Z_prev = Z;
    Z = numerics::psd_project(X + U);
    U += X - Z;
    out.iterations = it + 1;
    out.primal_residual = (X - Z).norm();
    out.dual_residual = rho * (Z - Z_prev).norm();
    const double primal_scale = 1.0 + std::max(X.norm(), Z.norm());
    const double dual_scale = 1.0 + rho * U.norm();
    if (out.primal_residual <= opts.tol * primal_scale &&
        out.dual_residual <= opts.tol * dual_scale) {
      out.converged = true;
      break;
    }
    // Residual balancing; adapting every iteration makes rho thrash.
    if ((it + 1) % kBalanceEvery != 0) continue;
    if (out.primal_residual / primal_scale > 10.0 * out.dual_residual / dual_scale) {
      rho *= 2.0;
      U *= 0.5;
    } else if (out.dual_residual / dual_scale > 10.0 * out.primal_residual / primal_scale) {
      rho *= 0.5;
      U *= 2.0;
    }
  }

  // Multipliers of the diagonal constraint from the affine step's optimality
  // condition C + rho (X - Z + U) - Diag(y) = 0.
  RVector y(n);
  for (Index i = 0; i < n; ++i) {
    y(i) = C(i, i).real() + rho * (1.0 - Z(i, i).real() + U(i, i).real());
  }
  CMatrix slack = C;
  slack.diagonal() -= y.cast<Complex>();
  const RVector ev = numerics::hermitian_eigenvalues(slack);
  out.dual_bound = y.sum() + static_cast<double>(n) * ev(n - 1) + offset;
  out.primal_value = (C.cwiseProduct(Z.conjugate())).sum().real() + offset;
  out.Q = Z;
  out.state = {Z, U, rho};
  return out;
}

}  // namespace sdp

namespace {

struct Candidate {
  CVector e;
  double f = 0.0;
};

Candidate best_candidate(const PhaseObjective& obj, const numerics::EigenDecomposition& eig,
                         int draws, std::uint64_t seed, bool* rank_one) {
  const Index n = eig.eigenvalues.size();
  const double lead = eig.eigenvalues(0);
  const double second = n > 1 ? std::max(0.0, eig.eigenvalues(1)) : 0.0;
  *rank_one = lead > 0.0 && second <= 1e-6 * lead;
  if (*rank_one) {
    Candidate c;
    c.e = sdp::dehomogenize(eig.eigenvectors.col(0));
    c.f = obj.value(c.e);
    return c;
  }
  // Gaussian randomization with covariance Q = V diag(lambda_+) V^H.
  CMatrix factor = eig.eigenvectors;
  for (Index i = 0; i < n; ++i) factor.col(i) *= std::sqrt(std::max(0.0, eig.eigenvalues(i)));
  Candidate best;
  bool have = false;
  for (int d = 0; d < draws; ++d) {
    std::mt19937_64 rng(detail::mix_seed(seed, static_cast<std::uint64_t>(d)));
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CVector r(n);
    for (Index i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      r(i) = Complex(re, im);
    }
    Candidate c;
    c.e = sdp::dehomogenize(factor * r);
    c.f = obj.value(c.e);
    if (!have || c.f < best.f) {
      best = std::move(c);
      have = true;
    }
  }
  return best;
}

sdp::Options admm_options(const SolverConfig& cfg) {
  return {cfg.sdr.admm_iters, cfg.sdr.admm_rho, cfg.sdr.admm_tol};
}

}  // namespace

// Semidefinite relaxation of the homogenized quadratic model, one SDP per
// Dinkelbach/SCA round (a single round when the objective is quadratic).
SolverReport solve_sdr(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg,
                       SolverContext* ctx) {
  cfg.validate();
  detail::require_unit_amplitude(cfg, "sdr");
  detail::Stopwatch clock;
  SolverReport report;
  report.method = Method::kSdr;

  CVector e = detail::unit_start(obj, e0);
  double f = obj.value(e);
  CVector best_e;
  double best_f = 0.0;
  bool have_best = false;
  report.status = SolverStatus::kConverged;
  nlohmann::json rounds = nlohmann::json::array();
  const int max_rounds = obj.is_quadratic() ? 1 : cfg.dinkelbach_rounds;
  std::optional<sdp::WarmStart> warm;
  if (ctx != nullptr) warm = ctx->sdp_warm;
  for (int round = 0; round < max_rounds; ++round) {
    const QuadraticModel model = obj.quadratic_model(e);
    const sdp::Result relaxed = sdp::solve_diag_constrained(
        sdp::homogenize(model), admm_options(cfg), warm ? &*warm : nullptr);
    warm = relaxed.state;
    report.iterations += relaxed.iterations;
    report.relaxed_value = relaxed.dual_bound + model.c0;
    if (!relaxed.converged) report.status = SolverStatus::kNumericalFailure;

    bool rank_one = false;
    const Candidate cand =
        best_candidate(obj, numerics::hermitian_eig(relaxed.Q), cfg.sdr.n_randomizations,
                       detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(round)), &rank_one);
    rounds.push_back({{"admm_iterations", relaxed.iterations},
                      {"converged", relaxed.converged},
                      {"primal_residual", relaxed.primal_residual},
                      {"dual_residual", relaxed.dual_residual},
                      {"relaxed_value", relaxed.dual_bound + model.c0},
                      {"rank_one", rank_one},
                      {"objective", cand.f}});
    report.objective_trajectory.push_back(cand.f);
    const bool improved = !have_best || cand.f < best_f;
    if (improved) {
      best_e = cand.e;
      best_f = cand.f;
      have_best = true;
    }
    // Later rounds would start from an inexact relaxation; stop and report.
    if (!relaxed.converged) break;
    if (!improved || detail::small_relative_change(f, cand.f, cfg.dinkelbach_tol)) break;
    e = cand.e;
    f = cand.f;
  }
  if (ctx != nullptr) ctx->sdp_warm = warm;
  report.diagnostics["rounds"] = std::move(rounds);
  detail::finish(report, obj, project_unit_circle(best_e), clock);
  return report;
}

// Rank-one penalty Tr(Q) - ||Q||_2 with weight s/mu, s being relative_weight
// times the mean entry scale ||C||_F / (M+1). The spectral norm is linearized
// at the dominant eigenvector of the previous Q, so every round is an SDP of
// the same diagonal-constrained form with cost C - (s/mu) u u^H (the trace
// part is constant under diag(Q) = 1).
SolverReport solve_penalty(const PhaseObjective& obj, const CVector& e0, const SolverConfig& cfg,
                           SolverContext* ctx) {
  cfg.validate();
  detail::require_unit_amplitude(cfg, "penalty");
  detail::Stopwatch clock;
  SolverReport report;
  report.method = Method::kPenalty;

  CVector e = detail::unit_start(obj, e0);
  const Index n = e.size() + 1;
  CVector lifted(n);
  lifted.head(n - 1) = e;
  lifted(n - 1) = 1.0;
  CMatrix Q = lifted * lifted.adjoint();
  double f = obj.value(e);
  report.objective_trajectory.push_back(f);
  double mu = cfg.penalty.mu0;
  std::optional<sdp::WarmStart> warm;
  if (ctx != nullptr) warm = ctx->sdp_warm;
  nlohmann::json bounds = nlohmann::json::array();
  double penalty_term = 0.0;
  report.status = SolverStatus::kMaxIters;
  bool admm_failed = false;

  for (int it = 0; it < cfg.max_iters; ++it) {
    const QuadraticModel model = obj.quadratic_model(e);
    const CMatrix C = sdp::homogenize(model);
    const numerics::EigenDecomposition current = numerics::hermitian_eig(Q);
    const CVector u = current.eigenvectors.col(0);
    const double weight = cfg.penalty.relative_weight * C.norm() / static_cast<double>(n) / mu;
    CMatrix cost = C - weight * (u * u.adjoint());
    cost.diagonal().array() += weight;
    cost = 0.5 * (cost + cost.adjoint());
    const sdp::Result step =
        sdp::solve_diag_constrained(cost, admm_options(cfg), warm ? &*warm : nullptr);
    warm = step.state;
    admm_failed = admm_failed || !step.converged;
    Q = step.Q;
    ++report.iterations;

    const numerics::EigenDecomposition eig = numerics::hermitian_eig(Q);
    penalty_term = std::max(0.0, Q.trace().real() - eig.eigenvalues(0));
    // SCA majorant of the penalized objective at the new Q.
    bounds.push_back(step.primal_value + model.c0);

    const double f_prev = f;
    e = sdp::dehomogenize(eig.eigenvectors.col(0));
    f = obj.value(e);
    report.objective_trajectory.push_back(f);
    if (penalty_term <= 1e-8 && detail::small_relative_change(f_prev, f, cfg.rel_tol)) {
      report.status = SolverStatus::kConverged;
      break;
    }
    mu *= cfg.penalty.mu_decay;
  }
  if (admm_failed && report.status != SolverStatus::kConverged) {
    report.status = SolverStatus::kNumericalFailure;
  }
  if (ctx != nullptr) ctx->sdp_warm = warm;
  report.diagnostics["penalty_term"] = penalty_term;
  report.diagnostics["final_mu"] = mu;
  report.diagnostics["sca_bounds"] = std::move(bounds);
  detail::finish(report, obj, project_unit_circle(e), clock);
  return report;
}

}  // namespace risopt
