#pragma once

#include "collar/constants.hpp"
#include "collar/errors.hpp"

namespace collar {

// Quintic smoothstep cutoff: 1 on [0, 1/2], 0 on [1, inf), C^2 across the
// joins. Derivative bounds are kEtaMaxAbsD1 / kEtaMaxAbsD2.

namespace detail {
/// Cutoff extended by 1 to negative arguments; used by weight and section
/// builders that feed eta(|rho| - c) with |rho| - c possibly negative.
inline double eta_ext(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  const double s = 2.0 * t - 1.0;
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

inline double eta_ext_d1(double t) {
  if (t <= 0.5 || t >= 1.0) return 0.0;
  const double s = 2.0 * t - 1.0;
  const double u = s * (1.0 - s);
  return -60.0 * u * u;
}

inline double eta_ext_d2(double t) {
  if (t <= 0.5 || t >= 1.0) return 0.0;
  const double s = 2.0 * t - 1.0;
  return -240.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
}
}  // namespace detail

/// eta(t) for t >= 0; negative arguments are a domain error.
inline double cutoff_eta(double t) {
  if (t < 0.0) throw DomainError("cutoff_eta: negative argument");
  return detail::eta_ext(t);
}

inline double cutoff_eta_d1(double t) {
  if (t < 0.0) throw DomainError("cutoff_eta_d1: negative argument");
  return detail::eta_ext_d1(t);
}

inline double cutoff_eta_d2(double t) {
  if (t < 0.0) throw DomainError("cutoff_eta_d2: negative argument");
  return detail::eta_ext_d2(t);
}

}  // namespace collar
