#include <cmath>
#include <complex>

#include "collar/errors.hpp"
#include "collar/rng.hpp"
#include "collar/weights.hpp"
#include "doctest.h"

using namespace collar;

namespace {
const QuadratureSpec kQ{16, 1e-11, 48};

// Direct complex-arithmetic evaluation of log|w/w_pole - 1|, usable while
// the exponent stays small; independent of the log-space helper.
double phi_term_direct(const Collar& c, const CollarPoint& p, double pole_rho) {
  const double a = log_abs_w(c, p.rho) - log_abs_w(c, pole_rho);
  const std::complex<double> ratio = std::polar(std::exp(a), 2.0 * kPi * p.theta / c.delta);
  return std::log(std::abs(ratio - 1.0));
}
}  // namespace

TEST_CASE("alpha_of") {
  CHECK(alpha_of(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(alpha_of(-40.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(alpha_of(40.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(alpha_of(-2.47477) == doctest::Approx(0.05346608746637468).epsilon(1e-12));
  double prev = -1.0;
  for (double r = -8.0; r <= 8.0; r += 0.25) {
    const double a = alpha_of(r);
    CHECK(a > prev);
    CHECK(a > 0.0);
    CHECK(a < 1.0);
    prev = a;
  }
}

TEST_CASE("phi3 formula") {
  const Collar c = make_collar(0.1, 8);
  // |-1 - 1| = 2 at the antipodal theta on the pole circle
  CollarPeakSpec near_core{0.0, c.half_width - 1.0};
  const double at_antipode = phi3(c, near_core, {0.0, c.delta / 2.0});
  const double phi2_there = phi_term_direct(c, {0.0, c.delta / 2.0}, near_core.p0_rho);
  CHECK(at_antipode + 0.5 * phi2_there == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // high-precision oracle evaluation at the core point, rho0 at the
  // reflected counterexample height
  CollarPeakSpec spec{2.4747389065575617, c.half_width - 1.0};
  CHECK(phi3(c, spec, {0.0, 0.0}) == doctest::Approx(-0.7614981635052527).epsilon(1e-11));

  // singularity guards
  CHECK_THROWS_AS(phi3(c, near_core, {0.0, 1e-12}), SingularityError);
  CHECK_THROWS_AS(phi3(c, near_core, {c.half_width - 1.0, 0.0}), SingularityError);

  // sup over a grid away from the singular disks stays bounded
  double sup = -1e300;
  for (int i = 0; i <= 200; ++i) {
    const double rho = -(c.half_width - 2.0) + 2.0 * (c.half_width - 2.0) * i / 200.0;
    for (int j = 0; j < 64; ++j) {
      const CollarPoint p{rho, c.delta * (j + 0.5) / 64.0};
      if (geodesic_distance(c, p, {near_core.rho0, 0.0}) < 1e-3) continue;
      sup = std::max(sup, phi3(c, near_core, p));
    }
  }
  CHECK(std::isfinite(sup));
  CHECK(sup < 50.0);
}

TEST_CASE("phi3 harmonicity under h-halving") {
  const Collar c = make_collar(0.1, 8);
  const CollarPeakSpec spec = make_collar_peak(c, 0.1);
  auto lap = [&](const CollarPoint& p, double h) {
    const double y = y_of_rho(p.rho);
    auto at = [&](double th, double yy) { return phi3(c, spec, {rho_of_y(yy), th}); };
    return (at(p.theta + h, y) + at(p.theta - h, y) + at(p.theta, y + h) + at(p.theta, y - h) -
            4.0 * at(p.theta, y)) /
           (h * h);
  };
  for (const CollarPoint& p : {CollarPoint{0.45, 0.033}, CollarPoint{-0.62, 0.021}}) {
    const double r1 = std::abs(lap(p, 1e-3));
    const double r2 = std::abs(lap(p, 5e-4));
    CHECK(r1 / r2 > 3.5);
    CHECK(r1 / r2 < 4.5);
  }
}

TEST_CASE("collar weight gluing") {
  const Collar c = make_collar(0.1, 8);
  const CollarPeakSpec spec = make_collar_peak(c, 0.0);
  CHECK(spec.p0_rho == doctest::Approx(c.half_width - 1.0));
  const double R = c.half_width;
  // identically zero outside |rho| >= R - 2 (exact, incl. at the p0 circle)
  CHECK(collar_weight(c, spec, {R - 1.5, 0.02}) == 0.0);
  CHECK(collar_weight(c, spec, {-(R - 0.3), 0.07}) == 0.0);
  CHECK(collar_weight(c, spec, {R - 1.0, 0.0}) == 0.0);
  // exactly 2 phi3 on the plateau
  for (double rho : {0.4, -1.1, R - 3.0}) {
    const CollarPoint p{rho, 0.013};
    CHECK(collar_weight(c, spec, p) == 2.0 * phi3(c, spec, p));
  }
  // finite gradient across the gluing band (grid scan)
  double worst = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double rho = (R - 3.0) + (i + 0.5) / 60.0;
    for (int j = 0; j < 16; ++j) {
      const CollarPoint p{rho, c.delta * (j + 0.5) / 16.0};
      const double h = 1e-5;
      const double dr =
          (collar_weight(c, spec, {p.rho + h, p.theta}) -
           collar_weight(c, spec, {p.rho - h, p.theta})) /
          (2 * h);
      const double dt =
          (collar_weight(c, spec, {p.rho, p.theta + h}) -
           collar_weight(c, spec, {p.rho, p.theta - h})) /
          (2 * h);
      worst = std::max(worst, std::hypot(dr, dt / std::cosh(p.rho)));
    }
  }
  CHECK(std::isfinite(worst));
  CHECK(worst < 100.0);

  // validated constructor: reflection and the R > 4 / R - 4 domain
  CHECK(make_collar_peak(c, -0.2).rho0 == doctest::Approx(0.2));
  CHECK_THROWS_AS(make_collar_peak(c, 1.0), DomainError);          // beyond R - 4
  CHECK_THROWS_AS(make_collar_peak(make_collar(0.5, 8), 0.0), DomainError);  // R <= 4
}

TEST_CASE("thick weight") {
  const ThickLogSpec spec{kEps2Default, {0.0, 0.0}};
  CHECK(thick_weight(spec, spec.eps2) == 0.0);
  CHECK(thick_weight(spec, 2.0 * spec.eps2) == 0.0);
  CHECK(thick_weight(spec, spec.eps2 / 2.0) ==
        doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-14));
  // eta(0.75) = 0.5 from the cutoff
  CHECK(thick_weight(spec, 0.75 * spec.eps2) ==
        doctest::Approx(std::log(0.75)).epsilon(1e-13));
  CHECK(std::isinf(thick_weight(spec, 0.0)));
  for (double d = 1e-4; d < 2.0 * spec.eps2; d += 1e-3) {
    const double v = thick_weight(spec, d);
    CHECK(v <= 0.0);
    if (d < spec.eps2) CHECK(v < 0.0);
  }
  CHECK_THROWS_AS(thick_weight(spec, -1.0), DomainError);
}

TEST_CASE("gradient closed forms match finite differences") {
  const Collar c = make_collar(0.1, 8);
  const CollarPeakSpec spec = make_collar_peak(c, 0.05);
  Rng rng(2024);
  int tested = 0;
  while (tested < 100) {
    // interior points with O(1) distance to x0 so both gradients carry digits
    const CollarPoint p{spec.rho0 + (rng.uniform() - 0.5) * 0.8,
                        c.delta * (0.1 + 0.8 * rng.uniform())};
    const double dist = geodesic_distance(c, p, {spec.rho0, 0.0});
    if (dist < 0.05 || dist > 0.5) continue;
    ++tested;
    const auto g = grad_phi_components(c, spec, p);
    const double h = 1e-4;
    auto fd = [&](double pole) {
      const double dr = (phi_term_direct(c, {p.rho + h, p.theta}, pole) -
                         phi_term_direct(c, {p.rho - h, p.theta}, pole)) /
                        (2 * h);
      const double dt = (phi_term_direct(c, {p.rho, p.theta + h}, pole) -
                         phi_term_direct(c, {p.rho, p.theta - h}, pole)) /
                        (2 * h);
      return std::hypot(dr, dt / std::cosh(p.rho));
    };
    CHECK(g.grad_phi1 == doctest::Approx(fd(spec.rho0)).epsilon(1e-5));
    CHECK(g.grad_phi2 == doctest::Approx(fd(spec.p0_rho)).epsilon(1e-5));
    CHECK(g.grad_phi1 >= 0.0);
    CHECK(g.grad_phi2 >= 0.0);
  }
  // limit |grad phi1| -> 2 pi/(delta cosh rho) as |w0/w| -> 0
  const CollarPoint far{2.5, 0.04};
  CHECK(grad_phi_components(c, spec, far).grad_phi1 ==
        doctest::Approx(2.0 * kPi / (c.delta * std::cosh(far.rho))).epsilon(1e-8));
  // theta symmetry of |grad phi2|
  const auto gp = grad_phi_components(c, spec, {0.8, 0.02});
  const auto gm = grad_phi_components(c, spec, {0.8, -0.02});
  CHECK(gp.grad_phi2 == doctest::Approx(gm.grad_phi2).epsilon(1e-14));
}

TEST_CASE("weight certificates") {
  const Collar c = make_collar(0.1, 8);
  CertificateConfig cfg;
  cfg.n_rho = 120;
  cfg.n_theta = 48;

  const auto zero = weight_certificate(c, ZeroWeight{}, cfg, kQ);
  CHECK(zero.pass);
  CHECK(zero.sup_phi == 0.0);
  CHECK(zero.lower_gap == 0.0);
  CHECK(zero.curvature_floor == 0.0);
  CHECK_FALSE(zero.diverges_at_x0);

  const auto thick = weight_certificate(c, ThickLogSpec{kEps2Default, {0.0, 0.0}}, cfg, kQ);
  CHECK(thick.diverges_at_x0);
  CHECK(thick.pass);
  CHECK(thick.sup_phi <= 1e-12);
  CHECK(thick.curvature_floor >= -50.0);

  const auto peak = weight_certificate(c, make_collar_peak(c, 0.0), cfg, kQ);
  CHECK(peak.diverges_at_x0);
  CHECK(peak.pass);
  CHECK(peak.sup_phi <= 50.0);
  CHECK(peak.lower_gap <= 20.0);
  CHECK(peak.curvature_floor >= -50.0);
  CHECK(peak.harmonicity_ratio > 3.5);
  CHECK(peak.harmonicity_ratio < 4.5);
  CHECK(peak.delta_x0 == doctest::Approx(0.05));
}
