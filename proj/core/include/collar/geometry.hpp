#pragma once

#include <limits>
#include <optional>

#include "collar/constants.hpp"
#include "collar/log_complex.hpp"

namespace collar {

/// One Keen collar: core geodesic of length delta, half-width R solving
/// delta sinh R = eps1, and a Fourier truncation order for sections on it.
/// R is always derived from delta, never stored independently of it.
struct Collar {
  double delta = 0.0;
  double half_width = 0.0;  // R
  int k_max = 0;
};

/// Point in collar coordinates: signed distance rho to the core geodesic,
/// arc-length coordinate theta on the core, reduced mod delta.
struct CollarPoint {
  double rho = 0.0;
  double theta = 0.0;
};

/// Builds a collar with R = asinh(eps1/delta). Throws DomainError for
/// nonpositive delta. `warned` (if given) is set when delta exceeds the
/// recommended domain.
Collar make_collar(double delta, int k_max, bool* warned = nullptr);

/// Flat coordinate y = 2 arctan(e^rho) - pi/2, the Gudermannian of rho.
/// Strictly increasing, odd, range (-pi/2, pi/2); cos(y) cosh(rho) = 1.
double y_of_rho(double rho);

/// Inverse of y_of_rho: rho = asinh(tan y).
double rho_of_y(double y);

/// Flat-coordinate image of the half-width.
inline double y_range(const Collar& c) { return y_of_rho(c.half_width); }

/// The global holomorphic coordinate w = exp((2 pi i / delta)(theta + i y)),
/// in log form: log|w| = -(2 pi / delta) y(rho), arg w = 2 pi theta / delta.
LogComplex w_coordinate(const Collar& c, const CollarPoint& p);

/// log |w| at height rho.
inline double log_abs_w(const Collar& c, double rho) {
  return -(2.0 * kPi / c.delta) * y_of_rho(rho);
}

/// The point height rho0 < 0 with delta cosh^2(rho0) = eps1. Requires
/// delta < eps1; above that there is no interior solution.
double counterexample_rho0(const Collar& c);

/// Model injectivity radius (delta/2) cosh(rho), optionally clamped above.
/// The default clamp is +inf (the raw model value of the comparison bounds);
/// pass kEps2Default to cap collar points at the thick-part constant.
double inj_radius_model(const Collar& c, double rho,
                        double clamp = std::numeric_limits<double>::infinity());

/// Area of a hyperbolic disk at curvature -1: 2 pi (cosh r - 1).
double hyperbolic_disk_area(double radius);

/// Geodesic distance between two collar points: theta-difference reduced
/// mod delta, then cosh d = cosh r1 cosh r2 cosh t - sinh r1 sinh r2.
double geodesic_distance(const Collar& c, const CollarPoint& a, const CollarPoint& b);

/// The eight quantities delta*cosh(R +- 4), delta*sinh(R +- 4),
/// delta*e^{R +- 4} together with delta*cosh R and delta*e^{R}, and flags
/// for a fixed absolute window. Not applicable when R <= 4.
struct BandConstantsReport {
  bool applicable = false;
  double delta_cosh_R = 0.0;
  double delta_e_R = 0.0;
  double delta_cosh_R_plus_4 = 0.0;
  double delta_cosh_R_minus_4 = 0.0;
  double delta_sinh_R_plus_4 = 0.0;
  double delta_sinh_R_minus_4 = 0.0;
  double delta_e_R_plus_4 = 0.0;
  double delta_e_R_minus_4 = 0.0;
  double window_lo = 0.0;  // eps3
  double window_hi = 0.0;  // eps4
  bool in_window = false;
};

BandConstantsReport band_constants_report(const Collar& c);

}  // namespace collar
