#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "risopt/types.hpp"

namespace risopt {

struct Dims {
  Index M = 0;  // reflecting elements
  Index N = 0;  // BS antennas
  Index K = 0;  // users
};

enum class FadingKind { kRayleigh, kRician };

struct FadingModel {
  FadingKind kind = FadingKind::kRayleigh;
  double k_factor = 0.0;

  static FadingModel rayleigh() { return {}; }
  static FadingModel rician(double k) { return {FadingKind::kRician, k}; }
};

/// All channel quantities of one network realization.
struct ChannelSet {
  Dims dims;
  FadingModel model;
  std::uint64_t seed = 0;
  CMatrix H;                 // BS -> RIS, M x N
  std::vector<CVector> h_r;  // RIS -> user k, length M each
  std::vector<CVector> h_d;  // BS -> user k, length N each
  CVector h;                 // RIS -> legitimate user, length M
  CVector g;                 // RIS -> eavesdropper, length M
  double noise_power = 1.0;

  /// Throws DimensionError/InvalidArgument when fields disagree with `dims`.
  void validate() const;
};

ChannelSet sample_channels(const Dims& dims, const FadingModel& model, std::uint64_t seed,
                           double noise_power = 1.0);

/// Conjugated equivalent channel of user k, i.e. (h_r^H diag(e) H + h_d^H)^H,
/// a length-N column vector.
CVector effective_channel(const ChannelSet& cs, const CVector& e, Index k);

/// Stable 64-bit fingerprint of every channel entry and the noise power.
std::uint64_t fingerprint(const ChannelSet& cs);

void save_dataset(const ChannelSet& cs, const std::filesystem::path& path);
ChannelSet load_dataset(const std::filesystem::path& path);

/// In-memory codec behind save_dataset/load_dataset.
std::string encode_dataset(const ChannelSet& cs);
ChannelSet decode_dataset(const std::string& bytes);

inline constexpr char kDatasetMagic[8] = {'R', 'I', 'S', 'C', 'H', 'A', 'N', '1'};

double db_to_linear(double db);
/// dBm to watts.
double dbm_to_linear(double dbm);

/// Per-trial seed: the base seed xor the trial index.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) { return base ^ trial; }

}  // namespace risopt
