#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "risopt/channels.hpp"
#include "risopt/numerics.hpp"
#include "risopt/types.hpp"

namespace risopt {

/// e^H A e + 2 Re(b^H e) + c0, minimization sense.
struct QuadraticModel {
  numerics::HermitianOperator A;
  CVector b;
  double c0 = 0.0;

  Index dim() const { return b.size(); }
  double value(const CVector& e) const;
  /// Wirtinger gradient A e + b.
  CVector gradient(const CVector& e) const;
};

/// Objective of the phase subproblem with the conventional resources held
/// fixed. Minimization sense; gradients follow g = df/de*, so
/// df = 2 Re(g^H de).
class PhaseObjective {
 public:
  virtual ~PhaseObjective() = default;

  virtual Index dim() const = 0;
  virtual double value(const CVector& e) const = 0;
  virtual CVector gradient(const CVector& e) const = 0;

  /// Quadratic model tangent at `e_ref` (a unit-modulus point). It is exact
  /// on the unit-modulus set when is_quadratic() holds, a Dinkelbach step for
  /// ratio objectives, and a majorizer otherwise. A is shifted to be PSD.
  virtual QuadraticModel quadratic_model(const CVector& e_ref) const = 0;

  /// True when value() is itself a quadratic in e, so quadratic_model() does
  /// not depend on e_ref.
  virtual bool is_quadratic() const { return false; }
};

/// Shifts A by (max(0, -lambda_min) + 1e-9) I and compensates c0 using
/// e^H e = ||e_ref||^2 on the fixed-modulus set.
QuadraticModel make_psd(QuadraticModel model, const CVector& e_ref);

/// Quadratic objective used directly as a phase subproblem.
class QuadraticObjective final : public PhaseObjective {
 public:
  explicit QuadraticObjective(QuadraticModel model) : model_(std::move(model)) {}

  Index dim() const override { return model_.dim(); }
  double value(const CVector& e) const override { return model_.value(e); }
  CVector gradient(const CVector& e) const override { return model_.gradient(e); }
  QuadraticModel quadratic_model(const CVector& e_ref) const override;
  bool is_quadratic() const override { return true; }

  const QuadraticModel& model() const { return model_; }

 private:
  QuadraticModel model_;
};

/// Seeded test family: f(e) = -||G^H e + c||^2 + kappa |k^H e|^2 with G of rank
/// `signal_rank`, an interference direction k and kappa in [0.2, 0.5]. The
/// operator is kept in low-rank form.
QuadraticObjective random_quadratic(Index M, std::uint64_t seed, Index signal_rank = 2);

/// Convex counterpart, f(e) = ||G^H e - c||^2 with G of rank `rank`; used where
/// a relaxation must be solvable to global optimality.
QuadraticObjective random_convex_quadratic(Index M, std::uint64_t seed, Index rank = 2);

enum class ProblemKind { kSecrecy, kUplinkPower, kNetworkCost };

std::string kind_name(ProblemKind kind);
ProblemKind parse_kind(const std::string& name);

struct SecrecyParams {
  double p_max = 1.0;
};

struct UplinkParams {
  RVector weights;  // lambda_k
  RVector caps;     // P_k
  RVector targets;  // r_k (linear SINR)
};

struct NetworkCostParams {
  RVector rates;          // R_k, Mbit/s
  double bandwidth = 10;  // B, MHz
  double eta = 100.0;
  double storage = 100.0;  // S_max
};

/// One application problem together with its conventional-resource state x.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual ProblemKind kind() const = 0;
  virtual std::unique_ptr<Problem> clone() const = 0;
  const ChannelSet& channels() const { return cs_; }
  Dims dims() const { return cs_.dims; }

  /// Primary objective in minimization sense (secrecy rate is negated).
  /// Throws FeasibilityError listing violated constraints of x.
  virtual double objective(const CVector& e) const = 0;

  /// Primary objective in its natural sense: secrecy rate (bit/s/Hz), total
  /// uplink power, or total network cost.
  virtual double reported_objective(const CVector& e) const = 0;

  /// Phase subproblem at the current x.
  virtual std::unique_ptr<PhaseObjective> phase_objective() const = 0;

  CVector wirtinger_grad_e(const CVector& e) const { return phase_objective()->gradient(e); }
  QuadraticModel quadratic_model(const CVector& e_ref) const {
    return phase_objective()->quadratic_model(e_ref);
  }

  /// Solves the x block exactly (secrecy, cache) or to fixed-point tolerance
  /// (powers, precoders) with e held fixed. Throws FeasibilityError; x is left
  /// unchanged in that case.
  virtual void update_x(const CVector& e) = 0;

  virtual double sinr(const CVector& e, Index k) const = 0;

  /// Names of constraints violated at (x, e); empty when feasible.
  virtual std::vector<std::string> violated_constraints(const CVector& e) const = 0;

  virtual nlohmann::json x_state_json() const = 0;

 protected:
  explicit Problem(ChannelSet cs) : cs_(std::move(cs)) { cs_.validate(); }
  ChannelSet cs_;
};

class SecrecyProblem final : public Problem {
 public:
  SecrecyProblem(ChannelSet cs, SecrecyParams params);

  ProblemKind kind() const override { return ProblemKind::kSecrecy; }
  std::unique_ptr<Problem> clone() const override {
    return std::make_unique<SecrecyProblem>(*this);
  }
  double objective(const CVector& e) const override;
  double reported_objective(const CVector& e) const override { return -objective(e); }
  std::unique_ptr<PhaseObjective> phase_objective() const override;
  void update_x(const CVector& e) override;
  double sinr(const CVector& e, Index k) const override;
  std::vector<std::string> violated_constraints(const CVector& e) const override;
  nlohmann::json x_state_json() const override;

  double secrecy_rate(const CVector& e) const;
  const CVector& beamformer() const { return w_; }
  void set_beamformer(CVector w);
  const SecrecyParams& params() const { return params_; }

  /// u = diag(h^H) H w and v = diag(g^H) H w.
  CVector user_cascade() const;
  CVector eve_cascade() const;

 private:
  SecrecyParams params_;
  CVector w_;
};

class UplinkPowerProblem final : public Problem {
 public:
  UplinkPowerProblem(ChannelSet cs, UplinkParams params);

  ProblemKind kind() const override { return ProblemKind::kUplinkPower; }
  std::unique_ptr<Problem> clone() const override {
    return std::make_unique<UplinkPowerProblem>(*this);
  }
  double objective(const CVector& e) const override;
  double reported_objective(const CVector& e) const override { return objective(e); }
  std::unique_ptr<PhaseObjective> phase_objective() const override;
  void update_x(const CVector& e) override;
  double sinr(const CVector& e, Index k) const override;
  std::vector<std::string> violated_constraints(const CVector& e) const override;
  nlohmann::json x_state_json() const override;

  const RVector& powers() const { return x_; }
  void set_powers(RVector x);
  const UplinkParams& params() const { return params_; }

 private:
  UplinkParams params_;
  RVector x_;
};

class NetworkCostProblem final : public Problem {
 public:
  NetworkCostProblem(ChannelSet cs, NetworkCostParams params);

  ProblemKind kind() const override { return ProblemKind::kNetworkCost; }
  std::unique_ptr<Problem> clone() const override {
    return std::make_unique<NetworkCostProblem>(*this);
  }
  double objective(const CVector& e) const override;
  double reported_objective(const CVector& e) const override { return objective(e); }
  std::unique_ptr<PhaseObjective> phase_objective() const override;
  void update_x(const CVector& e) override;
  double sinr(const CVector& e, Index k) const override;
  std::vector<std::string> violated_constraints(const CVector& e) const override;
  nlohmann::json x_state_json() const override;

  const RVector& cache() const { return cache_; }
  /// Precoders p_k as columns, N x K.
  const CMatrix& precoders() const { return precoders_; }
  /// Converged dual uplink powers of the last precoder update.
  const RVector& dual_powers() const { return dual_; }
  void set_state(RVector cache, CMatrix precoders);
  const NetworkCostParams& params() const { return params_; }

  /// SINR targets 2^(R_k/B) - 1.
  RVector sinr_targets() const;

 private:
  NetworkCostParams params_;
  RVector cache_;
  CMatrix precoders_;
  RVector dual_;
};

/// Fixed-point power control x_k <- r_k x_k / SINR_k(x) from x = 0 with MMSE
/// receivers, to `rel_tol` relative change. Throws FeasibilityError when a
/// power must exceed `caps` (pass +inf for none) or the iteration diverges.
RVector fixed_point_power_control(const std::vector<CVector>& channels, const RVector& targets,
                                  const RVector& caps, double noise, double rel_tol = 1e-8,
                                  int max_iters = 100000);

/// Uplink SINR with MMSE receiver: x_k h_k^H (noise I + sum_{i!=k} x_i h_i h_i^H)^{-1} h_k.
double uplink_sinr(const std::vector<CVector>& channels, const RVector& powers, double noise,
                   Index k);

/// Downlink SINR |h_k^H p_k|^2 / (sum_{l!=k} |h_k^H p_l|^2 + noise).
double downlink_sinr(const std::vector<CVector>& channels, const CMatrix& precoders, double noise,
                     Index k);

/// Fills caches with the largest rates first: x_k = 1 until storage runs out,
/// the remainder going to the next user. Exact optimum of the linear cache
/// subproblem.
RVector greedy_cache(const RVector& rates, double storage);

struct DualityPrecoders {
  CMatrix precoders;   // N x K
  RVector dual_powers;  // uplink q
  RVector downlink_powers;
};

/// Minimum-power downlink precoders meeting `targets` with equality via
/// uplink-downlink duality.
DualityPrecoders duality_precoders(const std::vector<CVector>& channels, const RVector& targets,
                                   double noise);

/// All effective channels at e.
std::vector<CVector> effective_channels(const ChannelSet& cs, const CVector& e);

std::unique_ptr<Problem> make_problem(ProblemKind kind, const ChannelSet& cs,
                                      const nlohmann::json& params);

}  // namespace risopt
