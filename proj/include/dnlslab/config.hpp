#pragma once
#include <cmath>
#include <numbers>

namespace dnls {

//! Every numerical threshold used by the library lives here, so tests and
//! reports can quote one record.
struct Tolerances {
  double roundtrip = 1e-12;
  double plancherel = 1e-12;
  double hyperplane = 1e-9;       // |sum xi| <= hyperplane * max|xi|
  double boundary_mass = 1e-10;   // gauge boundary diagnostic threshold
  double boundary_strip = 0.05;   // fraction of the box checked on each side
  double blowup_factor = 1e6;
  double leak_floor = 1e-8;       // |alpha6| >= leak_floor * (N1*)^2 inside Omega
  double gn_slack = 1e-6;
  double singular_rel = 1e-6;     // |xi12 xi14| below this * scale^2 uses the limit form
  double hypothesis_coverage = 0.95;
  double window_endpoint = 1e-12;
};

inline constexpr Tolerances kTol{};

inline constexpr double kPi = std::numbers::pi;
inline const double kSmallMass = std::sqrt(2.0 * kPi);

//! Default exponents standing in for "1/2+" and "0-".
inline constexpr double kHalfPlus = 0.55;
inline constexpr double kZeroMinus = -0.05;

//! Default Lambda truncation (mode counts) per order.
inline constexpr int kTruncL6 = 32;
inline constexpr int kTruncL8 = 16;
inline constexpr int kTruncL10 = 8;

//! Upper bound on the number of multiplier evaluations in one nested sum.
inline constexpr double kLambdaBudget = 3.2e8;

} // namespace dnls
