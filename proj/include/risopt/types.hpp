#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace risopt {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorCode : int {
  kOk = 0,
  kDimension = 1,
  kSymmetry = 2,
  kSingular = 3,
  kFeasibility = 4,
  kParse = 5,
  kIo = 6,
  kCapacity = 7,
  kInvalidArgument = 8,
  kNumerical = 9,
  kInternal = 10,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ErrorCode::kDimension, what) {}
};

class SymmetryError : public Error {
 public:
  explicit SymmetryError(const std::string& what) : Error(ErrorCode::kSymmetry, what) {}
};

class SingularMatrixError : public Error {
 public:
  explicit SingularMatrixError(const std::string& what) : Error(ErrorCode::kSingular, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::kInvalidArgument, what) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(ErrorCode::kCapacity, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

/// Malformed input; `offset` is the byte position where decoding failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : Error(ErrorCode::kParse, what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Raised when SINR targets or storage/power limits cannot be met.
/// `spectral_radius` carries the limiting diagnostic (>= 1 means the targets
/// are not jointly achievable with the current receive/transmit directions).
class FeasibilityError : public Error {
 public:
  FeasibilityError(const std::string& what, double spectral_radius)
      : Error(ErrorCode::kFeasibility, what), spectral_radius_(spectral_radius) {}
  double spectral_radius() const noexcept { return spectral_radius_; }

 private:
  double spectral_radius_;
};

}  // namespace risopt
