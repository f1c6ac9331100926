#include "risopt/phase.hpp"

#include <algorithm>
#include <cmath>

#include "risopt/json_format.hpp"

namespace risopt {
namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string model_name(const PhaseModel& model) {
  return std::visit(Overloaded{[](const C1Model&) { return std::string("C1"); },
                               [](const C2Model&) { return std::string("C2"); },
                               [](const C3Model&) { return std::string("C3"); },
                               [](const DiscreteModel&) { return std::string("discrete"); }},
                    model);
}

void validate_model(const PhaseModel& model) {
  std::visit(Overloaded{
                 [](const C1Model& m) {
                   if (!(m.amplitude > 0.0)) throw InvalidArgument("C1 amplitude must be positive");
                 },
                 [](const C2Model& m) {
                   if (!(m.radius > 0.0)) throw InvalidArgument("C2 radius must be positive");
                 },
                 [](const C3Model& m) {
                   if (!(m.beta_min >= 0.0 && m.beta_min < 1.0)) {
                     throw InvalidArgument("C3 beta_min must lie in [0, 1)");
                   }
                   if (!(m.alpha > 0.0)) throw InvalidArgument("C3 alpha must be positive");
                 },
                 [](const DiscreteModel& m) {
                   if (m.levels < 2) throw InvalidArgument("discrete model needs L >= 2");
                   if (!(m.amplitude > 0.0)) {
                     throw InvalidArgument("discrete amplitude must be positive");
                   }
                 }},
             model);
}

AmplitudeC3 amplitude_c3(double theta, const C3Model& p) {
  const double s = 0.5 * (std::sin(theta - p.phi) + 1.0);
  const double span = 1.0 - p.beta_min;
  AmplitudeC3 out;
  out.beta = span * std::pow(s, p.alpha) + p.beta_min;
  // d/dtheta s^alpha = alpha s^(alpha-1) cos(theta - phi) / 2
  out.dbeta = s > 0.0 ? span * p.alpha * std::pow(s, p.alpha - 1.0) * 0.5 * std::cos(theta - p.phi)
                      : 0.0;
  return out;
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

double level_angle(int level, int levels) {
  return kTwoPi * static_cast<double>(level) / static_cast<double>(levels);
}

int nearest_level(double theta, int levels) {
  const double step = kTwoPi / static_cast<double>(levels);
  const double t = wrap_angle(theta) / step;
  int lo = static_cast<int>(std::floor(t));
  if (lo >= levels) lo = levels - 1;
  const double frac = t - static_cast<double>(lo);
  const int hi = (lo + 1) % levels;
  if (frac < 0.5) return lo;
  if (frac > 0.5) return hi;
  return std::min(lo, hi);
}

void PhaseVector::refresh(const RVector* c2_amplitude) {
  const Index m = theta_.size();
  coeffs_.resize(m);
  std::visit(Overloaded{
                 [&](const C1Model& p) {
                   for (Index i = 0; i < m; ++i) coeffs_(i) = std::polar(p.amplitude, theta_(i));
                 },
                 [&](const C2Model& p) {
                   const double full = std::sqrt(p.radius);
                   for (Index i = 0; i < m; ++i) {
                     const double amp = c2_amplitude ? (*c2_amplitude)(i) : full;
                     coeffs_(i) = std::polar(amp, theta_(i));
                   }
                 },
                 [&](const C3Model& p) {
                   for (Index i = 0; i < m; ++i) {
                     coeffs_(i) = std::polar(amplitude_c3(theta_(i), p).beta, theta_(i));
                   }
                 },
                 [&](const DiscreteModel& p) {
                   for (Index i = 0; i < m; ++i) {
                     coeffs_(i) = std::polar(p.amplitude, theta_(i));
                   }
                 }},
             model_);
}

PhaseVector PhaseVector::from_theta(RVector theta, PhaseModel model) {
  validate_model(model);
  PhaseVector out;
  out.model_ = model;
  if (const auto* d = std::get_if<DiscreteModel>(&model)) {
    for (Index i = 0; i < theta.size(); ++i) {
      theta(i) = level_angle(nearest_level(theta(i), d->levels), d->levels);
    }
  }
  out.theta_ = std::move(theta);
  out.refresh(nullptr);
  return out;
}

PhaseVector PhaseVector::from_polar(RVector theta, RVector amplitude, C2Model model) {
  validate_model(model);
  if (theta.size() != amplitude.size()) throw DimensionError("from_polar: size mismatch");
  const double cap = std::sqrt(model.radius);
  if ((amplitude.array() < 0.0).any() || (amplitude.array() > cap + 1e-12).any()) {
    throw InvalidArgument("from_polar: amplitudes must lie in [0, sqrt(c)]");
  }
  PhaseVector out;
  out.model_ = model;
  out.theta_ = std::move(theta);
  out.refresh(&amplitude);
  return out;
}

PhaseVector PhaseVector::from_coefficients(const CVector& e, PhaseModel model) {
  validate_model(model);
  RVector theta(e.size());
  for (Index i = 0; i < e.size(); ++i) theta(i) = std::arg(e(i));
  if (const auto* c2 = std::get_if<C2Model>(&model)) {
    RVector amp = e.cwiseAbs();
    amp = amp.cwiseMin(std::sqrt(c2->radius));
    return from_polar(std::move(theta), std::move(amp), *c2);
  }
  PhaseVector out = from_theta(std::move(theta), model);
  if (std::holds_alternative<C1Model>(model)) {
    const double amp = std::get<C1Model>(model).amplitude;
    if (e.size() > 0 && (e.cwiseAbs().array() - amp).abs().maxCoeff() > 1e-9) {
      throw InvalidArgument("from_coefficients: entries are not on the C1 circle");
    }
  }
  return out;
}

double PhaseVector::feasibility_residual() const {
  if (coeffs_.size() == 0) return 0.0;
  const RVector amp = coeffs_.cwiseAbs();
  return std::visit(
      Overloaded{
          [&](const C1Model& p) { return (amp.array() - p.amplitude).abs().maxCoeff(); },
          [&](const C2Model& p) {
            return std::max(0.0, (amp.array() - std::sqrt(p.radius)).maxCoeff());
          },
          [&](const C3Model& p) {
            double worst = 0.0;
            for (Index i = 0; i < amp.size(); ++i) {
              worst = std::max(worst, std::abs(amp(i) - amplitude_c3(theta_(i), p).beta));
            }
            return worst;
          },
          [&](const DiscreteModel& p) {
            double worst = (amp.array() - p.amplitude).abs().maxCoeff();
            for (Index i = 0; i < theta_.size(); ++i) {
              const double snapped = level_angle(nearest_level(theta_(i), p.levels), p.levels);
              worst = std::max(worst, std::abs(wrap_angle(theta_(i)) - snapped));
            }
            return worst;
          }},
      model_);
}

nlohmann::json PhaseVector::to_json() const {
  nlohmann::json model;
  std::visit(Overloaded{[&](const C1Model& p) {
                          model = {{"kind", "C1"}, {"amplitude", p.amplitude}};
                        },
                        [&](const C2Model& p) { model = {{"kind", "C2"}, {"radius", p.radius}}; },
                        [&](const C3Model& p) {
                          model = {{"kind", "C3"},
                                   {"beta_min", p.beta_min},
                                   {"phi", p.phi},
                                   {"alpha", p.alpha}};
                        },
                        [&](const DiscreteModel& p) {
                          model = {{"kind", "discrete"},
                                   {"levels", p.levels},
                                   {"amplitude", p.amplitude}};
                        }},
             model_);
  nlohmann::json theta = nlohmann::json::array();
  for (Index i = 0; i < theta_.size(); ++i) theta.push_back(wrap_angle(theta_(i)));
  nlohmann::json out = {{"model", model}, {"theta", theta}};
  if (std::holds_alternative<C2Model>(model_)) {
    nlohmann::json amp = nlohmann::json::array();
    for (Index i = 0; i < coeffs_.size(); ++i) amp.push_back(std::abs(coeffs_(i)));
    out["amplitude"] = amp;
  }
  return out;
}

PhaseVector PhaseVector::from_json(const nlohmann::json& j) {
  const auto& m = j.at("model");
  const std::string kind = m.at("kind").get<std::string>();
  PhaseModel model;
  if (kind == "C1") {
    model = C1Model{m.at("amplitude").get<double>()};
  } else if (kind == "C2") {
    model = C2Model{m.at("radius").get<double>()};
  } else if (kind == "C3") {
    model = C3Model{m.at("beta_min").get<double>(), m.at("phi").get<double>(),
                    m.at("alpha").get<double>()};
  } else if (kind == "discrete") {
    model = DiscreteModel{m.at("levels").get<int>(), m.at("amplitude").get<double>()};
  } else {
    throw InvalidArgument("unknown phase model '" + kind + "'");
  }
  const auto theta_list = j.at("theta").get<std::vector<double>>();
  RVector theta = Eigen::Map<const RVector>(theta_list.data(), static_cast<Index>(theta_list.size()));
  if (kind == "C2" && j.contains("amplitude")) {
    const auto amp_list = j.at("amplitude").get<std::vector<double>>();
    RVector amp = Eigen::Map<const RVector>(amp_list.data(), static_cast<Index>(amp_list.size()));
    return from_polar(std::move(theta), std::move(amp), std::get<C2Model>(model));
  }
  return from_theta(std::move(theta), model);
}

CVector project_unit_circle_coeffs(const CVector& v) {
  CVector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double r = std::abs(v(i));
    out(i) = r > 0.0 ? v(i) / r : Complex(1.0, 0.0);
  }
  return out;
}

PhaseVector project_unit_circle(const CVector& v) {
  RVector theta(v.size());
  for (Index i = 0; i < v.size(); ++i) theta(i) = v(i) == Complex(0.0, 0.0) ? 0.0 : std::arg(v(i));
  return PhaseVector::from_theta(std::move(theta), C1Model{1.0});
}

CVector project_unit_ball(const CVector& v, double c) {
  if (!(c > 0.0)) throw InvalidArgument("project_unit_ball: c must be positive");
  const double cap = std::sqrt(c);
  CVector out = v;
  for (Index i = 0; i < v.size(); ++i) {
    const double r = std::abs(v(i));
    if (r > cap) out(i) = v(i) * (cap / r);
  }
  return out;
}

PhaseVector quantize(const PhaseVector& e, int levels) {
  if (levels < 2) throw InvalidArgument("quantize: L must be at least 2");
  double amplitude = 1.0;
  if (const auto* c1 = std::get_if<C1Model>(&e.model())) amplitude = c1->amplitude;
  if (const auto* d = std::get_if<DiscreteModel>(&e.model())) amplitude = d->amplitude;
  return PhaseVector::from_theta(e.theta(), DiscreteModel{levels, amplitude});
}

}  // namespace risopt
