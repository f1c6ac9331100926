#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "risopt/types.hpp"

namespace risopt {

/// Ideal unit-modulus model: |e_m| = amplitude.
struct C1Model {
  double amplitude = 1.0;
};

/// Convex model |e_m|^2 <= radius.
struct C2Model {
  double radius = 1.0;
};

/// Phase-dependent amplitude law.
struct C3Model {
  double beta_min = 0.2;
  double phi = 0.43 * 3.14159265358979323846;
  double alpha = 1.6;
};

/// L uniformly spaced phases scaled by `amplitude`.
struct DiscreteModel {
  int levels = 2;
  double amplitude = 1.0;
};

using PhaseModel = std::variant<C1Model, C2Model, C3Model, DiscreteModel>;

std::string model_name(const PhaseModel& model);
void validate_model(const PhaseModel& model);

struct AmplitudeC3 {
  double beta = 0.0;
  double dbeta = 0.0;
};

/// beta(theta) = (1 - beta_min) ((sin(theta - phi) + 1) / 2)^alpha + beta_min,
/// with its derivative in theta.
AmplitudeC3 amplitude_c3(double theta, const C3Model& params);

/// RIS coefficient vector: phases plus the feasible-set model that turns them
/// into complex coefficients. Angles are kept unwrapped; they are normalized to
/// [0, 2pi) only when serialized.
class PhaseVector {
 public:
  PhaseVector() = default;

  /// Under C2 every element takes the full radius sqrt(c).
  static PhaseVector from_theta(RVector theta, PhaseModel model);
  /// C2 with explicit per-element amplitudes in [0, sqrt(c)].
  static PhaseVector from_polar(RVector theta, RVector amplitude, C2Model model);
  /// Wraps raw coefficients; they must already satisfy the model.
  static PhaseVector from_coefficients(const CVector& e, PhaseModel model);

  Index size() const { return theta_.size(); }
  const RVector& theta() const { return theta_; }
  const PhaseModel& model() const { return model_; }
  const CVector& coefficients() const { return coeffs_; }
  /// Per-element modulus |e_m|.
  RVector amplitudes() const { return coeffs_.cwiseAbs(); }

  /// Largest violation of the model's modulus law.
  double feasibility_residual() const;

  nlohmann::json to_json() const;
  static PhaseVector from_json(const nlohmann::json& j);

 private:
  void refresh(const RVector* c2_amplitude);

  RVector theta_;
  PhaseModel model_ = C1Model{};
  CVector coeffs_;
};

/// e_m = v_m / |v_m|; exact zeros map to 1 + 0i.
PhaseVector project_unit_circle(const CVector& v);
CVector project_unit_circle_coeffs(const CVector& v);

/// e_m = v_m min(1, sqrt(c) / |v_m|).
CVector project_unit_ball(const CVector& v, double c);

/// Nearest of the L grid angles 2 pi l / L in wrap-around distance; on an exact
/// tie the lower level index wins. The amplitude of C1/Discrete input is kept.
PhaseVector quantize(const PhaseVector& e, int levels);

/// Index of the nearest level for one angle (tie -> lower index).
int nearest_level(double theta, int levels);

/// Angle of level l in [0, 2pi).
double level_angle(int level, int levels);

double wrap_angle(double theta);

}  // namespace risopt
