#include "collar/geometry.hpp"

#include <cmath>

#include "collar/errors.hpp"

namespace collar {

Collar make_collar(double delta, int k_max, bool* warned) {
  if (!(delta > 0.0)) throw DomainError("make_collar: delta must be positive");
  if (k_max < 0) throw DomainError("make_collar: k_max must be nonnegative");
  if (warned) *warned = delta > kDeltaRecommendedMax;
  Collar c;
  c.delta = delta;
  c.half_width = std::asinh(kEps1 / delta);
  c.k_max = k_max;
  return c;
}

double y_of_rho(double rho) {
  // 2 atan(e^rho) - pi/2 == 2 atan(tanh(rho/2)); the latter never overflows.
  return 2.0 * std::atan(std::tanh(0.5 * rho));
}

double rho_of_y(double y) { return std::asinh(std::tan(y)); }

LogComplex w_coordinate(const Collar& c, const CollarPoint& p) {
  const double two_pi_over_delta = 2.0 * kPi / c.delta;
  return LogComplex::from_polar_log(-two_pi_over_delta * y_of_rho(p.rho),
                                    two_pi_over_delta * p.theta);
}

double counterexample_rho0(const Collar& c) {
  if (!(c.delta < kEps1))
    throw DomainError("counterexample_rho0: requires delta < eps1 = 8/sqrt(5)");
  return -std::acosh(std::sqrt(kEps1 / c.delta));
}

double inj_radius_model(const Collar& c, double rho, double clamp) {
  const double model = 0.5 * c.delta * std::cosh(rho);
  return std::min(model, clamp);
}

double hyperbolic_disk_area(double radius) {
  if (!(radius > 0.0)) throw DomainError("hyperbolic_disk_area: radius must be positive");
  return 2.0 * kPi * (std::cosh(radius) - 1.0);
}

double geodesic_distance(const Collar& c, const CollarPoint& a, const CollarPoint& b) {
  double t = std::fmod(b.theta - a.theta, c.delta);
  if (t > 0.5 * c.delta) t -= c.delta;
  if (t < -0.5 * c.delta) t += c.delta;
  const double ch =
      std::cosh(a.rho) * std::cosh(b.rho) * std::cosh(t) - std::sinh(a.rho) * std::sinh(b.rho);
  return std::acosh(std::max(1.0, ch));
}

BandConstantsReport band_constants_report(const Collar& c) {
  BandConstantsReport r;
  const double R = c.half_width;
  if (R <= 4.0) return r;
  r.applicable = true;
  const double d = c.delta;
  r.delta_cosh_R = d * std::cosh(R);
  r.delta_e_R = d * std::exp(R);
  r.delta_cosh_R_plus_4 = d * std::cosh(R + 4.0);
  r.delta_cosh_R_minus_4 = d * std::cosh(R - 4.0);
  r.delta_sinh_R_plus_4 = d * std::sinh(R + 4.0);
  r.delta_sinh_R_minus_4 = d * std::sinh(R - 4.0);
  r.delta_e_R_plus_4 = d * std::exp(R + 4.0);
  r.delta_e_R_minus_4 = d * std::exp(R - 4.0);
  // Window from the small-delta limits delta e^{R-4} -> 2 eps1 e^{-4} and
  // delta e^{R+4} -> 2 eps1 e^4, with slack for the sinh/cosh spread.
  r.window_lo = 0.5 * kEps1 * std::exp(-5.0);
  r.window_hi = 2.0 * kEps1 * std::exp(4.0) + 1.0;
  const double vals[8] = {r.delta_cosh_R_plus_4, r.delta_cosh_R_minus_4, r.delta_sinh_R_plus_4,
                          r.delta_sinh_R_minus_4, r.delta_e_R_plus_4,    r.delta_e_R_minus_4,
                          r.delta_cosh_R,        r.delta_e_R};
  r.in_window = true;
  for (double v : vals) r.in_window = r.in_window && v > r.window_lo && v < r.window_hi;
  return r;
}

}  // namespace collar
