#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace plasmo {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I_unit{0.0, 1.0};

/// Broad failure classes. The numeric values double as CLI exit codes.
enum class ErrorCode : int {
  config = 2,
  validation = 3,
  numerical = 4,
};

/// Every failure raised by the library carries a class and a short
/// machine-readable tag ("degenerate-pole", "flat-signal", ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string tag, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& tag() const noexcept { return tag_; }

 private:
  ErrorCode code_;
  std::string tag_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& tag, const std::string& message);

inline CVec3 to_complex(const Vec3& v) { return v.cast<cplx>(); }

/// Bilinear (non-conjugating) pairing used throughout the scattering formulas.
inline cplx bilinear(const CVec3& a, const CVec3& b) { return a.transpose() * b; }

}  // namespace plasmo
