#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace carathset {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Default tolerances shared by every module. Callers override per call.
struct Tolerances {
  double boundary = 1e-9;    // slack for strict inequalities
  double residual = 1e-10;   // variety / through-point residuals
  double unimodular = 1e-12; // |omega| = 1 checks
  double pole = 1e-13;       // denominator floor before refusing evaluation
};

inline constexpr Tolerances kDefaultTolerances{};

enum class ErrorCode {
  DomainError,
  ZeroPolynomial,
  PoleError,
  Unsupported,
  InvalidAutomorphism,
  DegenerateImage,
  NotInDomain,
  EmptyLens,
  Infeasible,
  Tangent,
  BranchCollision,
  DegenerateDirection,
  NotOnVariety,
  ConvergenceFailure,
  EvaluationOutOfDisc,
  NoIntersection,
  ParameterViolation,
  Indeterminate,
  NotThrough,
  ResidualCheck,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::PoleError: return "PoleError";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::InvalidAutomorphism: return "InvalidAutomorphism";
    case ErrorCode::DegenerateImage: return "DegenerateImage";
    case ErrorCode::NotInDomain: return "NotInDomain";
    case ErrorCode::EmptyLens: return "EmptyLens";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Tangent: return "Tangent";
    case ErrorCode::BranchCollision: return "BranchCollision";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::NotOnVariety: return "NotOnVariety";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::EvaluationOutOfDisc: return "EvaluationOutOfDisc";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::ParameterViolation: return "ParameterViolation";
    case ErrorCode::Indeterminate: return "Indeterminate";
    case ErrorCode::NotThrough: return "NotThrough";
    case ErrorCode::ResidualCheck: return "ResidualCheck";
  }
  return "Unknown";
}

/// Errors that stem from the caller's input rather than from a numerical
/// event inside an algorithm. The CLI maps these to exit code 2.
constexpr bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError:
    case ErrorCode::ZeroPolynomial:
    case ErrorCode::Unsupported:
    case ErrorCode::InvalidAutomorphism:
    case ErrorCode::NotInDomain:
    case ErrorCode::EmptyLens:
    case ErrorCode::NotOnVariety:
    case ErrorCode::NoIntersection:
    case ErrorCode::ParameterViolation:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline void require_finite(Complex z, std::string_view what) {
  if (!is_finite(z)) throw Error(ErrorCode::DomainError, std::string(what) + " is not finite");
}

inline void require_in_disc(Complex z, std::string_view what) {
  require_finite(z, what);
  if (std::abs(z) >= 1.0) throw Error(ErrorCode::DomainError, std::string(what) + " lies outside the open unit disc");
}

inline bool is_unimodular(Complex z, double tol = kDefaultTolerances.unimodular) {
  return std::abs(std::abs(z) - 1.0) <= tol;
}

// Principal angle in [0, 2pi).
inline double wrap_angle(double theta) {
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  return t;
}

// Distance on the circle between two angles, in [0, pi].
inline double angular_distance(double s, double t) {
  double d = wrap_angle(s - t);
  return d > kPi ? 2.0 * kPi - d : d;
}

}  // namespace carathset
