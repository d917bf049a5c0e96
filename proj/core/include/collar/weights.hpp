#pragma once

#include <variant>

#include "collar/cutoff.hpp"
#include "collar/geometry.hpp"
#include "collar/quadrature.hpp"

namespace collar {

/// Singular collar weight built from phi3 = phi1 - alpha phi2 and glued to
/// zero outside |rho| <= R - 2. rho0 is stored reflected to [0, R-4);
/// the singular points are x0 = (rho0, 0) and p0 = (p0_rho, 0).
struct CollarPeakSpec {
  double rho0 = 0.0;
  double p0_rho = 0.0;
};

/// Thick-point logarithmic weight 2 eta(d/eps2) log(d/eps2) as a function of
/// geodesic distance d to `center`.
struct ThickLogSpec {
  double eps2 = kEps2Default;
  CollarPoint center{0.0, 0.0};
};

struct ZeroWeight {};

using WeightSpec = std::variant<ZeroWeight, CollarPeakSpec, ThickLogSpec>;

/// Validates and builds a CollarPeakSpec; negative rho0 is reflected through
/// the rho -> -rho isometry. Requires R > 4 and |rho0| < R - 4.
CollarPeakSpec make_collar_peak(const Collar& c, double rho0, double p0_rho_offset = 1.0);

/// alpha = 2 arctan(e^{rho0}) / pi, strictly increasing, in (0, 1).
double alpha_of(double rho0);

/// phi3 = log|w/w0 - 1| - alpha log|w/w_{p0} - 1|; all ratios in log space.
/// Evaluation within 1e-9 of x0 or p0 is a singularity error.
double phi3(const Collar& c, const CollarPeakSpec& spec, const CollarPoint& p);

/// The glued weight 2 eta(|rho| - (R-3)) phi3: identically 0 for
/// |rho| >= R - 2, exactly 2 phi3 for |rho| <= R - 5/2.
double collar_weight(const Collar& c, const CollarPeakSpec& spec, const CollarPoint& p);

/// 2 eta(d/eps2) log(d/eps2); 0 for d >= eps2, -inf sentinel at d = 0.
double thick_weight(const ThickLogSpec& spec, double d);

/// Variant dispatch; ThickLog uses the geodesic distance to its center.
double evaluate_weight(const Collar& c, const WeightSpec& w, const CollarPoint& p);

/// Closed-form metric gradients of the two log terms:
/// |grad phi1| = (2 pi / (delta cosh rho)) |1 - w0/w|^{-1}, same for phi2.
struct GradComponents {
  double grad_phi1 = 0.0;
  double grad_phi2 = 0.0;
};
GradComponents grad_phi_components(const Collar& c, const CollarPeakSpec& spec,
                                   const CollarPoint& p);

struct CertificateConfig {
  int n_rho = 200;
  int n_theta = 64;
  double ceiling = 50.0;    // cap for sup phi, lower gap, and -curvature floor
  int disk_samples = 48;    // radial x angular samples on the d <= delta_x0 disk
  double laplace_h = 1e-3;  // base stencil spacing in the (theta, y) chart
};

/// Empirical weight certificate: (i) sup phi; (ii) the singular lower bound
/// 2 log d - 2 pi / delta_x0 - C on the disk d <= delta_x0; (iii) discrete
/// curvature floor of (i/2pi) ddbar phi against omega; (iv) divergence of
/// int e^{-phi} at x0, decided from the 2 log d local form. Failures are
/// report entries, never exceptions.
struct CertificateReport {
  double sup_phi = 0.0;
  double lower_gap = 0.0;        // max over disk of 2 log d - 2pi/delta_x0 - phi
  double curvature_floor = 0.0;  // min of discrete (i/2pi) ddbar phi / omega
  bool diverges_at_x0 = false;
  double harmonicity_ratio = 0.0;  // residual(h) / residual(h/2) for phi3; ~4
  double delta_x0 = 0.0;
  bool pass = false;
};

CertificateReport weight_certificate(const Collar& c, const WeightSpec& w,
                                     const CertificateConfig& cfg, const QuadratureSpec& q);

}  // namespace collar
