#include "collar/weights.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "collar/errors.hpp"

namespace collar {

namespace {

constexpr double kSingularRadius = 1e-9;

double log_abs_w_ratio_minus_one(const Collar& c, const CollarPoint& p, double pole_rho) {
  // log | w(p)/w(pole) - 1 | with the pole at theta = 0, so w(pole) > 0.
  const double a = log_abs_w(c, p.rho) - log_abs_w(c, pole_rho);
  const double b = 2.0 * kPi * p.theta / c.delta;
  return log_abs_expm1(a, b);
}

void check_away_from(const Collar& c, const CollarPoint& p, const CollarPoint& s,
                     const char* what) {
  if (geodesic_distance(c, p, s) < kSingularRadius)
    throw SingularityError(std::string(what) + ": evaluation within 1e-9 of a singular point");
}

}  // namespace

CollarPeakSpec make_collar_peak(const Collar& c, double rho0, double p0_rho_offset) {
  if (!(c.half_width > 4.0)) throw DomainError("make_collar_peak: requires R > 4");
  const double r = std::abs(rho0);  // rho -> -rho isometry
  if (!(r < c.half_width - 4.0))
    throw DomainError("make_collar_peak: |rho0| must be < R - 4");
  CollarPeakSpec s;
  s.rho0 = r;
  s.p0_rho = c.half_width - p0_rho_offset;
  return s;
}

double alpha_of(double rho0) {
  // (y(rho0) + pi/2)/pi is the stable form of 2 arctan(e^{rho0})/pi.
  return (y_of_rho(rho0) + kPi / 2.0) / kPi;
}

double phi3(const Collar& c, const CollarPeakSpec& spec, const CollarPoint& p) {
  const CollarPoint x0{spec.rho0, 0.0};
  const CollarPoint p0{spec.p0_rho, 0.0};
  check_away_from(c, p, x0, "phi3");
  check_away_from(c, p, p0, "phi3");
  const double phi1 = log_abs_w_ratio_minus_one(c, p, spec.rho0);
  const double phi2 = log_abs_w_ratio_minus_one(c, p, spec.p0_rho);
  return phi1 - alpha_of(spec.rho0) * phi2;
}

double collar_weight(const Collar& c, const CollarPeakSpec& spec, const CollarPoint& p) {
  const double R = c.half_width;
  const double t = std::abs(p.rho) - (R - 3.0);
  if (t >= 1.0) return 0.0;  // |rho| >= R - 2, identically zero
  return 2.0 * detail::eta_ext(t) * phi3(c, spec, p);
}

double thick_weight(const ThickLogSpec& spec, double d) {
  if (!(spec.eps2 > 0.0)) throw DomainError("thick_weight: eps2 must be positive");
  if (d < 0.0) throw DomainError("thick_weight: distance must be nonnegative");
  if (d >= spec.eps2) return 0.0;
  if (d == 0.0) return -std::numeric_limits<double>::infinity();
  return 2.0 * detail::eta_ext(d / spec.eps2) * std::log(d / spec.eps2);
}

double evaluate_weight(const Collar& c, const WeightSpec& w, const CollarPoint& p) {
  return std::visit(
      [&](const auto& spec) -> double {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, ZeroWeight>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, CollarPeakSpec>) {
          return collar_weight(c, spec, p);
        } else {
          return thick_weight(spec, geodesic_distance(c, p, spec.center));
        }
      },
      w);
}

GradComponents grad_phi_components(const Collar& c, const CollarPeakSpec& spec,
                                   const CollarPoint& p) {
  const CollarPoint x0{spec.rho0, 0.0};
  const CollarPoint p0{spec.p0_rho, 0.0};
  check_away_from(c, p, x0, "grad_phi_components");
  check_away_from(c, p, p0, "grad_phi_components");
  const double pref = std::log(2.0 * kPi / c.delta) - std::log(std::cosh(p.rho));
  const double b = -2.0 * kPi * p.theta / c.delta;
  GradComponents g;
  // |1 - w0/w| in log space; w0/w = exp(log|w0| - log|w| - i arg w).
  const double l1 = log_abs_expm1(log_abs_w(c, spec.rho0) - log_abs_w(c, p.rho), b);
  const double l2 = log_abs_expm1(log_abs_w(c, spec.p0_rho) - log_abs_w(c, p.rho), b);
  g.grad_phi1 = std::exp(pref - l1);
  g.grad_phi2 = std::exp(pref - l2);
  return g;
}

namespace {

/// Discrete Laplacian of phi in the flat (theta, y) chart at p, spacing h.
double flat_laplacian(const Collar& c, const WeightSpec& w, const CollarPoint& p, double h) {
  const double y = y_of_rho(p.rho);
  auto at = [&](double th, double yy) {
    return evaluate_weight(c, w, CollarPoint{rho_of_y(yy), th});
  };
  const double center = at(p.theta, y);
  return (at(p.theta + h, y) + at(p.theta - h, y) + at(p.theta, y + h) + at(p.theta, y - h) -
          4.0 * center) /
         (h * h);
}

double phi3_flat_laplacian(const Collar& c, const CollarPeakSpec& spec, const CollarPoint& p,
                           double h) {
  const double y = y_of_rho(p.rho);
  auto at = [&](double th, double yy) { return phi3(c, spec, CollarPoint{rho_of_y(yy), th}); };
  const double center = at(p.theta, y);
  return (at(p.theta + h, y) + at(p.theta - h, y) + at(p.theta, y + h) + at(p.theta, y - h) -
          4.0 * center) /
         (h * h);
}

}  // namespace

CertificateReport weight_certificate(const Collar& c, const WeightSpec& w,
                                     const CertificateConfig& cfg, const QuadratureSpec& q) {
  (void)q;
  CertificateReport rep;
  if (std::holds_alternative<ZeroWeight>(w)) {
    rep.pass = true;
    return rep;
  }

  CollarPoint x0{0.0, 0.0};
  double clamp = kEps2Default;
  std::vector<CollarPoint> singular;
  if (const auto* pk = std::get_if<CollarPeakSpec>(&w)) {
    x0 = {pk->rho0, 0.0};
    singular.push_back(x0);
    singular.push_back({pk->p0_rho, 0.0});
  } else {
    const auto& tl = std::get<ThickLogSpec>(w);
    x0 = tl.center;
    clamp = tl.eps2;
    singular.push_back(x0);
  }
  rep.delta_x0 = inj_radius_model(c, x0.rho, clamp);
  rep.diverges_at_x0 = true;  // phi = 2 log d + smooth near x0 in both cases

  const double R = c.half_width;
  const double rho_ext = R - 2.0;
  const double h = cfg.laplace_h;
  double sup_phi = -std::numeric_limits<double>::infinity();
  double floor = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.n_rho; ++i) {
    const double rho = -rho_ext + 2.0 * rho_ext * (i + 0.35) / cfg.n_rho;
    for (int j = 0; j < cfg.n_theta; ++j) {
      const CollarPoint p{rho, c.delta * (j + 0.45) / cfg.n_theta};
      bool near_singular = false;
      for (const auto& s : singular)
        near_singular = near_singular || geodesic_distance(c, p, s) < 4.0 * h;
      if (near_singular) continue;
      sup_phi = std::max(sup_phi, evaluate_weight(c, w, p));
      const double curv =
          flat_laplacian(c, w, p, h) * std::pow(std::cos(y_of_rho(rho)), 2) / (4.0 * kPi);
      floor = std::min(floor, curv);
    }
  }
  rep.sup_phi = sup_phi;
  rep.curvature_floor = std::min(floor, 0.0);

  // (ii): phi >= 2 log d - 2 pi / delta_x0 - C on the sampled disk d <= delta_x0.
  double gap = -std::numeric_limits<double>::infinity();
  const int ns = cfg.disk_samples;
  for (int i = 0; i < ns; ++i) {
    const double r = rep.delta_x0 * (i + 0.5) / ns;
    for (int a = 0; a < ns; ++a) {
      const double ang = 2.0 * kPi * (a + 0.25) / ns;
      const CollarPoint p{x0.rho + r * std::cos(ang),
                          x0.theta + r * std::sin(ang) / std::cosh(x0.rho)};
      if (std::abs(p.rho) > R - 1e-6) continue;
      const double d = geodesic_distance(c, p, x0);
      if (d < 16.0 * kSingularRadius || d > rep.delta_x0) continue;
      gap = std::max(gap, 2.0 * std::log(d) - 2.0 * kPi / rep.delta_x0 -
                              evaluate_weight(c, w, p));
    }
  }
  rep.lower_gap = gap;

  // Harmonicity of phi3 away from its singular points (CollarPeak only).
  if (const auto* pk = std::get_if<CollarPeakSpec>(&w)) {
    double num = 0.0, den = 0.0;
    const CollarPoint probes[] = {{pk->rho0 + 0.25, c.delta / 3.0},
                                  {pk->rho0 - 0.35, c.delta / 5.0},
                                  {pk->rho0 + 0.45, c.delta / 7.0}};
    for (const auto& p : probes) {
      if (std::abs(p.rho) > R - 3.0) continue;
      num += std::abs(phi3_flat_laplacian(c, *pk, p, h));
      den += std::abs(phi3_flat_laplacian(c, *pk, p, 0.5 * h));
    }
    rep.harmonicity_ratio = den > 0.0 ? num / den : 0.0;
  }

  rep.pass = rep.sup_phi <= cfg.ceiling && rep.lower_gap <= cfg.ceiling &&
             rep.curvature_floor >= -cfg.ceiling;
  if (std::holds_alternative<CollarPeakSpec>(w))
    rep.pass = rep.pass && rep.harmonicity_ratio > 3.0 && rep.harmonicity_ratio < 5.0;
  return rep;
}

}  // namespace collar
