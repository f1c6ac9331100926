#pragma once

#include <chrono>
#include <cstdint>

#include "risopt/solvers.hpp"

namespace risopt::detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    const auto dt = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double>(dt).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// |current - previous| <= rel_tol * |previous| (guarded at zero).
bool small_relative_change(double previous, double current, double rel_tol);

/// Fills final point, objective, residual and wall time.
void finish(SolverReport& report, const PhaseObjective& obj, const PhaseVector& e,
            const Stopwatch& clock);

/// Checks the length and projects e0 onto the unit circle.
CVector unit_start(const PhaseObjective& obj, const CVector& e0);

void require_unit_amplitude(const SolverConfig& cfg, const char* who);

/// Mixes a seed with a stream index (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace risopt::detail
