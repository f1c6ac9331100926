#include "risopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace risopt {
namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kPowerSlack = 1e-9;
constexpr double kSinrSlack = 1e-6;

CMatrix random_gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

/// Builds a tangent quadratic upper model 2 Re(g^H (e - e_ref)) + L ||e - e_ref||^2
/// around e_ref, doubling L until the model majorizes f at the model's
/// unit-modulus minimizer.
QuadraticModel majorizing_model(const PhaseObjective& obj, const CVector& e_ref) {
  const Index m = e_ref.size();
  const double f_ref = obj.value(e_ref);
  const CVector g = obj.gradient(e_ref);
  double lipschitz = std::max(1e-6, g.cwiseAbs().maxCoeff());
  for (int attempt = 0; attempt < 80; ++attempt) {
    QuadraticModel model;
    model.A = numerics::HermitianOperator::low_rank(lipschitz, CMatrix(m, 0), RVector(0));
    model.b = g - lipschitz * e_ref;
    model.c0 = f_ref - 2.0 * g.dot(e_ref).real() + lipschitz * e_ref.squaredNorm();
    // The surrogate minimizer on the unit circle is the phase of -b.
    CVector candidate(m);
    for (Index i = 0; i < m; ++i) {
      const double r = std::abs(model.b(i));
      candidate(i) = r > 0.0 ? -model.b(i) / r : Complex(1.0, 0.0);
    }
    const double f_c = obj.value(candidate);
    if (std::isfinite(f_c) && f_c <= model.value(candidate) + 1e-12 * (1.0 + std::abs(f_ref))) {
      return model;
    }
    lipschitz *= 2.0;
  }
  throw Error(ErrorCode::kNumerical, "could not build a majorizing model");
}

double spectral_radius(const CMatrix& gains) {
  if (gains.rows() == 0) return 0.0;
  Eigen::ComplexEigenSolver<CMatrix> solver(gains, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Normalized cross-gain matrix r_k |u_k^H h_i|^2 / |u_k^H h_k|^2 under MMSE
/// receivers at `powers`; its spectral radius is below one iff the targets are
/// jointly reachable with these receivers.
double mmse_gain_radius(const std::vector<CVector>& channels, const RVector& targets,
                        const RVector& powers, double noise) {
  const Index K = static_cast<Index>(channels.size());
  const Index N = channels.front().size();
  CMatrix gains = CMatrix::Zero(K, K);
  for (Index k = 0; k < K; ++k) {
    CMatrix cov = CMatrix::Identity(N, N) * noise;
    for (Index i = 0; i < K; ++i) {
      if (i != k) cov += powers(i) * channels[i] * channels[i].adjoint();
    }
    const CVector u = cov.llt().solve(channels[k]);
    const double own = std::norm(u.dot(channels[k]));
    for (Index i = 0; i < K; ++i) {
      if (i != k) gains(k, i) = targets(k) * std::norm(u.dot(channels[i])) / own;
    }
  }
  return spectral_radius(gains);
}

RVector vec_param(const nlohmann::json& params, const char* key, Index K, double fallback) {
  RVector out = RVector::Constant(K, fallback);
  if (!params.contains(key)) return out;
  const auto& v = params.at(key);
  if (v.is_number()) return RVector::Constant(K, v.get<double>());
  const auto list = v.get<std::vector<double>>();
  if (static_cast<Index>(list.size()) != K) {
    throw DimensionError(std::string("parameter '") + key + "' must have K entries");
  }
  for (Index k = 0; k < K; ++k) out(k) = list[static_cast<std::size_t>(k)];
  return out;
}

nlohmann::json complex_list(const CVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const Complex z : v) out.push_back({z.real(), z.imag()});
  return out;
}

nlohmann::json real_list(const RVector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

/// -log2 of the secrecy ratio, with a Dinkelbach quadratic model.
class SecrecyObjective final : public PhaseObjective {
 public:
  SecrecyObjective(CVector u, CVector v, double noise)
      : u_(std::move(u)), v_(std::move(v)), noise_(noise) {}

  Index dim() const override { return u_.size(); }

  double value(const CVector& e) const override {
    const double num = noise_ + std::norm(e.dot(u_));
    const double den = noise_ + std::norm(e.dot(v_));
    return -std::log2(num / den);
  }

  CVector gradient(const CVector& e) const override {
    const Complex ue = u_.dot(e);  // u^H e
    const Complex ve = v_.dot(e);
    const double num = noise_ + std::norm(ue);
    const double den = noise_ + std::norm(ve);
    return -(u_ * (ue / num) - v_ * (ve / den)) / kLn2;
  }

  QuadraticModel quadratic_model(const CVector& e_ref) const override {
    const double num = noise_ + std::norm(e_ref.dot(u_));
    const double den = noise_ + std::norm(e_ref.dot(v_));
    const double lambda = num / den;
    CMatrix factors(u_.size(), 2);
    factors.col(0) = u_;
    factors.col(1) = v_;
    RVector weights(2);
    weights << -1.0, lambda;
    QuadraticModel model;
    model.A = numerics::HermitianOperator::low_rank(0.0, std::move(factors), std::move(weights));
    model.b = CVector::Zero(u_.size());
    model.c0 = (lambda - 1.0) * noise_;
    return make_psd(std::move(model), e_ref);
  }

 private:
  CVector u_;
  CVector v_;
  double noise_;
};

/// -sum_k log(SINR_k(e) / r_k) for the uplink with MMSE receivers at fixed powers.
class UplinkMarginObjective final : public PhaseObjective {
 public:
  UplinkMarginObjective(const ChannelSet& cs, RVector powers, RVector targets)
      : cs_(cs), x_(std::move(powers)), r_(std::move(targets)) {}

  Index dim() const override { return cs_.dims.M; }

  double value(const CVector& e) const override {
    const auto hs = effective_channels(cs_, e);
    double f = 0.0;
    for (Index k = 0; k < cs_.dims.K; ++k) {
      f -= std::log(x_(k) * quad(hs, k) / r_(k));
    }
    return f;
  }

  CVector gradient(const CVector& e) const override {
    const auto hs = effective_channels(cs_, e);
    const Index K = cs_.dims.K;
    CVector g = CVector::Zero(cs_.dims.M);
    for (Index k = 0; k < K; ++k) {
      const CVector z = interference(hs, k).llt().solve(hs[k]);
      const double s = hs[k].dot(z).real();
      CVector mix = cs_.h_r[k];
      for (Index i = 0; i < K; ++i) {
        if (i != k) mix -= (x_(i) * hs[i].dot(z)) * cs_.h_r[i];
      }
      const CVector y = cs_.H * z;
      g -= (y.conjugate().cwiseProduct(mix)) / s;
    }
    return g;
  }

  QuadraticModel quadratic_model(const CVector& e_ref) const override {
    return majorizing_model(*this, e_ref);
  }

 private:
  CMatrix interference(const std::vector<CVector>& hs, Index k) const {
    const Index N = cs_.dims.N;
    CMatrix cov = CMatrix::Identity(N, N) * cs_.noise_power;
    for (Index i = 0; i < cs_.dims.K; ++i) {
      if (i != k) cov += x_(i) * hs[i] * hs[i].adjoint();
    }
    return cov;
  }
  double quad(const std::vector<CVector>& hs, Index k) const {
    return hs[k].dot(interference(hs, k).llt().solve(hs[k])).real();
  }

  const ChannelSet& cs_;
  RVector x_;
  RVector r_;
};

/// -sum_k log(SINR_k(e) / gamma_k) for the downlink at fixed precoders.
class DownlinkMarginObjective final : public PhaseObjective {
 public:
  DownlinkMarginObjective(const ChannelSet& cs, CMatrix precoders, RVector targets)
      : cs_(cs), p_(std::move(precoders)), gamma_(std::move(targets)) {}

  Index dim() const override { return cs_.dims.M; }

  double value(const CVector& e) const override {
    const auto hs = effective_channels(cs_, e);
    double f = 0.0;
    for (Index k = 0; k < cs_.dims.K; ++k) {
      f -= std::log(downlink_sinr(hs, p_, cs_.noise_power, k) / gamma_(k));
    }
    return f;
  }

  CVector gradient(const CVector& e) const override {
    const auto hs = effective_channels(cs_, e);
    const Index K = cs_.dims.K;
    const CMatrix hp = cs_.H * p_;  // column l: H p_l
    CVector g = CVector::Zero(cs_.dims.M);
    for (Index k = 0; k < K; ++k) {
      // a_kl = h_k^H p_l
      const CVector a = p_.adjoint() * hs[k];  // conj(a_kl) in entry l
      const double signal = std::norm(a(k));
      double interf = cs_.noise_power;
      for (Index l = 0; l < K; ++l) {
        if (l != k) interf += std::norm(a(l));
      }
      CVector acc = (std::conj(a(k)) / signal) * hp.col(k).conjugate();
      for (Index l = 0; l < K; ++l) {
        if (l != k) acc -= (std::conj(a(l)) / interf) * hp.col(l).conjugate();
      }
      g -= cs_.h_r[k].cwiseProduct(acc);
    }
    return g;
  }

  QuadraticModel quadratic_model(const CVector& e_ref) const override {
    return majorizing_model(*this, e_ref);
  }

 private:
  const ChannelSet& cs_;
  CMatrix p_;
  RVector gamma_;
};

}  // namespace

double QuadraticModel::value(const CVector& e) const {
  return A.quadratic_form(e) + 2.0 * b.dot(e).real() + c0;
}

CVector QuadraticModel::gradient(const CVector& e) const { return A.apply(e) + b; }

QuadraticModel make_psd(QuadraticModel model, const CVector& e_ref) {
  const double shift = std::max(0.0, -model.A.lambda_min()) + 1e-9;
  model.A = model.A.shifted(shift);
  model.c0 -= shift * e_ref.squaredNorm();
  return model;
}

QuadraticModel QuadraticObjective::quadratic_model(const CVector& e_ref) const {
  return make_psd(model_, e_ref);
}

QuadraticObjective random_quadratic(Index M, std::uint64_t seed, Index signal_rank) {
  if (M < 1 || signal_rank < 1) throw DimensionError("random_quadratic: sizes must be positive");
  std::mt19937_64 rng(seed);
  const CMatrix G = random_gaussian(M, signal_rank, rng);
  const CVector c = random_gaussian(signal_rank, 1, rng).col(0) * std::sqrt(static_cast<double>(M));
  const CVector k = random_gaussian(M, 1, rng).col(0);
  const double kappa = std::uniform_real_distribution<double>(0.2, 0.5)(rng);

  CMatrix factors(M, signal_rank + 1);
  factors.leftCols(signal_rank) = G;
  factors.col(signal_rank) = k;
  RVector weights = RVector::Constant(signal_rank + 1, -1.0);
  weights(signal_rank) = kappa;
  QuadraticModel model;
  model.A = numerics::HermitianOperator::low_rank(0.0, std::move(factors), std::move(weights));
  model.b = -(G * c);
  model.c0 = -c.squaredNorm();
  return QuadraticObjective(std::move(model));
}

QuadraticObjective random_convex_quadratic(Index M, std::uint64_t seed, Index rank) {
  if (M < 1 || rank < 1) throw DimensionError("random_convex_quadratic: sizes must be positive");
  std::mt19937_64 rng(seed);
  const CMatrix G = random_gaussian(M, rank, rng);
  const CVector c = random_gaussian(rank, 1, rng).col(0) * std::sqrt(static_cast<double>(M));
  QuadraticModel model;
  model.A = numerics::HermitianOperator::low_rank(0.0, G, RVector::Ones(rank));
  model.b = -(G * c);
  model.c0 = c.squaredNorm();
  return QuadraticObjective(std::move(model));
}

std::string kind_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kSecrecy: return "secrecy";
    case ProblemKind::kUplinkPower: return "uplink_power";
    case ProblemKind::kNetworkCost: return "network_cost";
  }
  return "unknown";
}

ProblemKind parse_kind(const std::string& name) {
  if (name == "secrecy") return ProblemKind::kSecrecy;
  if (name == "uplink_power" || name == "uplink") return ProblemKind::kUplinkPower;
  if (name == "network_cost" || name == "network") return ProblemKind::kNetworkCost;
  throw InvalidArgument("unknown problem kind '" + name + "'");
}

std::vector<CVector> effective_channels(const ChannelSet& cs, const CVector& e) {
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(cs.dims.K));
  for (Index k = 0; k < cs.dims.K; ++k) out.push_back(effective_channel(cs, e, k));
  return out;
}

double uplink_sinr(const std::vector<CVector>& channels, const RVector& powers, double noise,
                   Index k) {
  const Index K = static_cast<Index>(channels.size());
  if (k < 0 || k >= K || powers.size() != K) throw DimensionError("uplink_sinr: bad user index");
  const Index N = channels[k].size();
  CMatrix cov = CMatrix::Identity(N, N) * noise;
  for (Index i = 0; i < K; ++i) {
    if (i != k) cov += powers(i) * channels[i] * channels[i].adjoint();
  }
  return powers(k) * channels[k].dot(cov.llt().solve(channels[k])).real();
}

double downlink_sinr(const std::vector<CVector>& channels, const CMatrix& precoders, double noise,
                     Index k) {
  const Index K = static_cast<Index>(channels.size());
  if (k < 0 || k >= K || precoders.cols() != K) {
    throw DimensionError("downlink_sinr: bad user index or precoder count");
  }
  double interf = noise;
  for (Index l = 0; l < K; ++l) {
    if (l != k) interf += std::norm(channels[k].dot(precoders.col(l)));
  }
  return std::norm(channels[k].dot(precoders.col(k))) / interf;
}

RVector fixed_point_power_control(const std::vector<CVector>& channels, const RVector& targets,
                                  const RVector& caps, double noise, double rel_tol,
                                  int max_iters) {
  const Index K = static_cast<Index>(channels.size());
  if (K == 0 || targets.size() != K || caps.size() != K) {
    throw DimensionError("power control: channel, target and cap counts differ");
  }
  RVector x = RVector::Zero(K);
  RVector next(K);
  for (int it = 0; it < max_iters; ++it) {
    for (Index k = 0; k < K; ++k) {
      // r_k x_k / SINR_k(x) does not depend on x_k itself.
      RVector probe = x;
      probe(k) = 1.0;
      next(k) = targets(k) / uplink_sinr(channels, probe, noise, k);
    }
    if (!next.allFinite()) {
      throw FeasibilityError("power control diverged",
                             mmse_gain_radius(channels, targets, x, noise));
    }
    for (Index k = 0; k < K; ++k) {
      // Iterates increase monotonically from zero, so exceeding a cap is final.
      if (next(k) > caps(k) * (1.0 + 1e-12)) {
        throw FeasibilityError("power of user " + std::to_string(k) + " exceeds its cap",
                               mmse_gain_radius(channels, targets, next, noise));
      }
    }
    const double change = ((next - x).cwiseAbs().array() / next.array()).maxCoeff();
    x = next;
    if (change < rel_tol) return x;
  }
  throw FeasibilityError("power control did not converge",
                         mmse_gain_radius(channels, targets, x, noise));
}

RVector greedy_cache(const RVector& rates, double storage) {
  const Index K = rates.size();
  std::vector<Index> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return rates(a) > rates(b); });
  RVector x = RVector::Zero(K);
  double remaining = std::max(0.0, storage);
  for (const Index k : order) {
    if (rates(k) <= 0.0) break;
    const double take = std::min(1.0, remaining);
    x(k) = take;
    remaining -= take;
    if (remaining <= 0.0) break;
  }
  return x;
}

DualityPrecoders duality_precoders(const std::vector<CVector>& channels, const RVector& targets,
                                   double noise) {
  const Index K = static_cast<Index>(channels.size());
  const Index N = channels.front().size();
  const RVector no_cap = RVector::Constant(K, std::numeric_limits<double>::infinity());
  DualityPrecoders out;
  out.dual_powers = fixed_point_power_control(channels, targets, no_cap, noise);

  CMatrix cov = CMatrix::Identity(N, N) * noise;
  for (Index i = 0; i < K; ++i) cov += out.dual_powers(i) * channels[i] * channels[i].adjoint();
  Eigen::LLT<CMatrix> llt(cov);
  CMatrix dirs(N, K);
  for (Index k = 0; k < K; ++k) {
    CVector u = llt.solve(channels[k]);
    dirs.col(k) = u / u.norm();
  }

  // Downlink powers meeting every target with equality.
  Eigen::MatrixXd system(K, K);
  for (Index k = 0; k < K; ++k) {
    for (Index l = 0; l < K; ++l) {
      const double gain = std::norm(channels[k].dot(dirs.col(l)));
      system(k, l) = l == k ? gain / targets(k) : -gain;
    }
  }
  out.downlink_powers = system.partialPivLu().solve(RVector::Constant(K, noise));
  if (!out.downlink_powers.allFinite() || out.downlink_powers.minCoeff() <= 0.0) {
    CMatrix gains = CMatrix::Zero(K, K);
    for (Index k = 0; k < K; ++k) {
      for (Index l = 0; l < K; ++l) {
        if (l != k) gains(k, l) = -system(k, l) / system(k, k);
      }
    }
    throw FeasibilityError("downlink SINR targets unreachable", spectral_radius(gains));
  }
  out.precoders = dirs;
  for (Index k = 0; k < K; ++k) out.precoders.col(k) *= std::sqrt(out.downlink_powers(k));
  return out;
}

// ---------------------------------------------------------------------------
// Secrecy beamforming

SecrecyProblem::SecrecyProblem(ChannelSet cs, SecrecyParams params)
    : Problem(std::move(cs)), params_(params), w_(CVector::Zero(cs_.dims.N)) {
  if (!(params_.p_max > 0.0)) throw InvalidArgument("secrecy: P_max must be positive");
}

void SecrecyProblem::set_beamformer(CVector w) {
  if (w.size() != cs_.dims.N) throw DimensionError("beamformer must have length N");
  w_ = std::move(w);
}

CVector SecrecyProblem::user_cascade() const { return cs_.h.conjugate().cwiseProduct(cs_.H * w_); }

CVector SecrecyProblem::eve_cascade() const { return cs_.g.conjugate().cwiseProduct(cs_.H * w_); }

double SecrecyProblem::secrecy_rate(const CVector& e) const {
  if (e.size() != cs_.dims.M) throw DimensionError("secrecy: e must have length M");
  const double s2 = cs_.noise_power;
  const double num = s2 + std::norm(e.dot(user_cascade()));
  const double den = s2 + std::norm(e.dot(eve_cascade()));
  return std::log2(num / den);
}

double SecrecyProblem::objective(const CVector& e) const {
  const auto violated = violated_constraints(e);
  if (!violated.empty()) throw FeasibilityError("secrecy: violated " + violated.front(), 0.0);
  return -secrecy_rate(e);
}

std::unique_ptr<PhaseObjective> SecrecyProblem::phase_objective() const {
  return std::make_unique<SecrecyObjective>(user_cascade(), eve_cascade(), cs_.noise_power);
}

void SecrecyProblem::update_x(const CVector& e) {
  if (e.size() != cs_.dims.M) throw DimensionError("secrecy: e must have length M");
  // e^H diag(h^H) H w = a^H w with a = H^H (h .* e).
  const CVector a = cs_.H.adjoint() * cs_.h.cwiseProduct(e);
  const CVector b = cs_.H.adjoint() * cs_.g.cwiseProduct(e);
  w_ = numerics::generalized_rayleigh_max(a, b, cs_.noise_power, params_.p_max).w;
}

double SecrecyProblem::sinr(const CVector& e, Index k) const {
  if (k == 0) return std::norm(e.dot(user_cascade())) / cs_.noise_power;
  if (k == 1) return std::norm(e.dot(eve_cascade())) / cs_.noise_power;
  throw DimensionError("secrecy: index 0 is the user, 1 the eavesdropper");
}

std::vector<std::string> SecrecyProblem::violated_constraints(const CVector& e) const {
  if (e.size() != cs_.dims.M) throw DimensionError("secrecy: e must have length M");
  std::vector<std::string> out;
  if (w_.squaredNorm() > params_.p_max * (1.0 + kPowerSlack)) out.emplace_back("power_budget");
  return out;
}

nlohmann::json SecrecyProblem::x_state_json() const {
  return {{"kind", "secrecy"}, {"w", complex_list(w_)}};
}

// ---------------------------------------------------------------------------
// Uplink power minimization

UplinkPowerProblem::UplinkPowerProblem(ChannelSet cs, UplinkParams params)
    : Problem(std::move(cs)), params_(std::move(params)), x_(RVector::Zero(cs_.dims.K)) {
  const Index K = cs_.dims.K;
  if (params_.weights.size() != K || params_.caps.size() != K || params_.targets.size() != K) {
    throw DimensionError("uplink: weights, caps and targets need K entries");
  }
  if ((params_.caps.array() <= 0.0).any() || (params_.targets.array() <= 0.0).any()) {
    throw InvalidArgument("uplink: caps and targets must be positive");
  }
}

void UplinkPowerProblem::set_powers(RVector x) {
  if (x.size() != cs_.dims.K) throw DimensionError("uplink: powers need K entries");
  x_ = std::move(x);
}

double UplinkPowerProblem::objective(const CVector& e) const {
  if (e.size() != cs_.dims.M) throw DimensionError("uplink: e must have length M");
  std::string bad;
  for (Index k = 0; k < cs_.dims.K; ++k) {
    if (!(x_(k) > 0.0)) bad += " positivity[" + std::to_string(k) + "]";
    if (x_(k) > params_.caps(k) * (1.0 + kPowerSlack)) bad += " cap[" + std::to_string(k) + "]";
  }
  if (!bad.empty()) throw FeasibilityError("uplink: infeasible powers:" + bad, 0.0);
  return params_.weights.dot(x_);
}

std::unique_ptr<PhaseObjective> UplinkPowerProblem::phase_objective() const {
  return std::make_unique<UplinkMarginObjective>(cs_, x_, params_.targets);
}

void UplinkPowerProblem::update_x(const CVector& e) {
  x_ = fixed_point_power_control(effective_channels(cs_, e), params_.targets, params_.caps,
                                 cs_.noise_power);
}

double UplinkPowerProblem::sinr(const CVector& e, Index k) const {
  return uplink_sinr(effective_channels(cs_, e), x_, cs_.noise_power, k);
}

std::vector<std::string> UplinkPowerProblem::violated_constraints(const CVector& e) const {
  std::vector<std::string> out;
  const auto hs = effective_channels(cs_, e);
  for (Index k = 0; k < cs_.dims.K; ++k) {
    const std::string idx = "[" + std::to_string(k) + "]";
    if (!(x_(k) > 0.0)) {
      out.push_back("positivity" + idx);
      continue;
    }
    if (x_(k) > params_.caps(k) * (1.0 + kPowerSlack)) out.push_back("cap" + idx);
    if (uplink_sinr(hs, x_, cs_.noise_power, k) < params_.targets(k) * (1.0 - kSinrSlack)) {
      out.push_back("sinr" + idx);
    }
  }
  return out;
}

nlohmann::json UplinkPowerProblem::x_state_json() const {
  return {{"kind", "uplink_power"}, {"powers", real_list(x_)}};
}

// ---------------------------------------------------------------------------
// Cache-enabled downlink network cost

NetworkCostProblem::NetworkCostProblem(ChannelSet cs, NetworkCostParams params)
    : Problem(std::move(cs)),
      params_(std::move(params)),
      cache_(RVector::Zero(cs_.dims.K)),
      precoders_(CMatrix::Zero(cs_.dims.N, cs_.dims.K)),
      dual_(RVector::Zero(cs_.dims.K)) {
  if (params_.rates.size() != cs_.dims.K) throw DimensionError("network: rates need K entries");
  if (!(params_.bandwidth > 0.0) || !(params_.eta >= 0.0) || !(params_.storage >= 0.0)) {
    throw InvalidArgument("network: bandwidth must be positive, eta and storage non-negative");
  }
}

RVector NetworkCostProblem::sinr_targets() const {
  return (params_.rates.array() / params_.bandwidth).unaryExpr([](double r) {
    return std::exp2(r) - 1.0;
  });
}

void NetworkCostProblem::set_state(RVector cache, CMatrix precoders) {
  if (cache.size() != cs_.dims.K || precoders.rows() != cs_.dims.N ||
      precoders.cols() != cs_.dims.K) {
    throw DimensionError("network: cache needs K entries and precoders N x K");
  }
  cache_ = std::move(cache);
  precoders_ = std::move(precoders);
}

double NetworkCostProblem::objective(const CVector& e) const {
  if (e.size() != cs_.dims.M) throw DimensionError("network: e must have length M");
  std::string bad;
  for (Index k = 0; k < cs_.dims.K; ++k) {
    if (cache_(k) < -kPowerSlack || cache_(k) > 1.0 + kPowerSlack) {
      bad += " cache_box[" + std::to_string(k) + "]";
    }
  }
  if (cache_.sum() > params_.storage + kPowerSlack) bad += " storage";
  if (!bad.empty()) throw FeasibilityError("network: infeasible cache:" + bad, 0.0);
  const double backhaul = ((1.0 - cache_.array()) * params_.rates.array()).sum();
  return backhaul + params_.eta * precoders_.squaredNorm();
}

std::unique_ptr<PhaseObjective> NetworkCostProblem::phase_objective() const {
  return std::make_unique<DownlinkMarginObjective>(cs_, precoders_, sinr_targets());
}

void NetworkCostProblem::update_x(const CVector& e) {
  const RVector cache = greedy_cache(params_.rates, params_.storage);
  DualityPrecoders dp = duality_precoders(effective_channels(cs_, e), sinr_targets(),
                                          cs_.noise_power);
  cache_ = cache;
  precoders_ = std::move(dp.precoders);
  dual_ = std::move(dp.dual_powers);
}

double NetworkCostProblem::sinr(const CVector& e, Index k) const {
  return downlink_sinr(effective_channels(cs_, e), precoders_, cs_.noise_power, k);
}

std::vector<std::string> NetworkCostProblem::violated_constraints(const CVector& e) const {
  std::vector<std::string> out;
  const auto hs = effective_channels(cs_, e);
  const RVector gamma = sinr_targets();
  for (Index k = 0; k < cs_.dims.K; ++k) {
    const std::string idx = "[" + std::to_string(k) + "]";
    if (cache_(k) < -kPowerSlack || cache_(k) > 1.0 + kPowerSlack) out.push_back("cache_box" + idx);
    if (downlink_sinr(hs, precoders_, cs_.noise_power, k) < gamma(k) * (1.0 - kSinrSlack)) {
      out.push_back("sinr" + idx);
    }
  }
  if (cache_.sum() > params_.storage + kPowerSlack) out.emplace_back("storage");
  return out;
}

nlohmann::json NetworkCostProblem::x_state_json() const {
  nlohmann::json precoders = nlohmann::json::array();
  for (Index k = 0; k < precoders_.cols(); ++k) precoders.push_back(complex_list(precoders_.col(k)));
  return {{"kind", "network_cost"}, {"cache", real_list(cache_)}, {"precoders", precoders}};
}

std::unique_ptr<Problem> make_problem(ProblemKind kind, const ChannelSet& cs,
                                      const nlohmann::json& params) {
  const Index K = cs.dims.K;
  switch (kind) {
    case ProblemKind::kSecrecy:
      return std::make_unique<SecrecyProblem>(cs, SecrecyParams{params.value("p_max", 1.0)});
    case ProblemKind::kUplinkPower: {
      UplinkParams p;
      p.weights = vec_param(params, "weights", K, 1.0);
      p.caps = vec_param(params, "caps", K, 1.0);
      p.targets = vec_param(params, "targets", K, 1.0);
      return std::make_unique<UplinkPowerProblem>(cs, std::move(p));
    }
    case ProblemKind::kNetworkCost: {
      NetworkCostParams p;
      p.rates = vec_param(params, "rates", K, 10.0);
      p.bandwidth = params.value("bandwidth", 10.0);
      p.eta = params.value("eta", 100.0);
      p.storage = params.value("storage", 100.0);
      return std::make_unique<NetworkCostProblem>(cs, std::move(p));
    }
  }
  throw InvalidArgument("unknown problem kind");
}

}  // namespace risopt
