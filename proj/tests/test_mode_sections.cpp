#include <cmath>
#include <complex>

#include "collar/errors.hpp"
#include "collar/mode_section.hpp"
#include "collar/rng.hpp"
#include "doctest.h"

using namespace collar;
using cd = std::complex<double>;

namespace {

const QuadratureSpec kQ{16, 1e-11, 48};

// Independent oracle: composite Simpson in the rho variable (the library
// integrates adaptively in y), for int |w|^{2k} cosh^{1-2m} rho d rho.
double rho_mode_integral(const Collar& c, int k, int m, int n = 40000) {
  const double R = c.half_width;
  const double h = 2.0 * R / n;
  auto f = [&](double rho) {
    const double logw2k = 2.0 * k * log_abs_w(c, rho);
    return std::exp(logw2k) * std::pow(std::cosh(rho), 1.0 - 2.0 * m);
  };
  double s = f(-R) + f(R);
  for (int i = 1; i < n; ++i) s += f(-R + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

ModeSection random_section(Rng& rng, const Collar& c, int m, int band) {
  ModeSection s(m);
  for (int k = -band; k <= band; ++k) {
    // mode scaled so its largest boundary value is O(1)
    const double lg = -std::abs(k) * (2.0 * kPi / c.delta) * y_range(c);
    s.set_log(k, LogComplex::from(rng.complex_normal()) * LogComplex::from_polar_log(lg, 0.0));
  }
  return s;
}

}  // namespace

TEST_CASE("eval_f basics") {
  const Collar c = make_collar(0.1, 64);
  ModeSection one(2);
  one.set(0, 1.0);
  CHECK(eval_f(one, c, {0.7, 0.02}) == cd(1.0, 0.0));
  CHECK(eval_f(one, c, {-3.1, 0.09}) == cd(1.0, 0.0));

  ModeSection w1(2);
  w1.set(1, 1.0);
  // w = e^{i pi} at theta = delta/2 on the core
  const cd v = eval_f(w1, c, {0.0, c.delta / 2.0});
  CHECK(v.real() == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(v.imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
  // log|w|(R) = -(2 pi / delta) y(R), direct evaluation
  const LogComplex at_r = eval_f_log(w1, c, {c.half_width, 0.0});
  CHECK(at_r.log_mod == doctest::Approx(-96.94029745858168).epsilon(1e-12));
}

TEST_CASE("eval_f overflow names the offending mode") {
  const Collar c = make_collar(0.05, 64);
  ModeSection s(2);
  s.set(64, 1.0);
  try {
    eval_f(s, c, {-c.half_width + 0.01, 0.0});
    FAIL("expected OverflowError");
  } catch (const OverflowError& e) {
    CHECK(e.offending_mode == 64);
  }
  // log evaluation of the same point is fine
  CHECK(std::isfinite(eval_f_log(s, c, {-c.half_width + 0.01, 0.0}).log_mod));
}

TEST_CASE("pointwise squared norm") {
  const Collar c = make_collar(0.1, 8);
  ModeSection one1(1), one2(2);
  one1.set(0, 1.0);
  one2.set(0, 1.0);
  CHECK(pointwise_sq_norm(one1, c, {0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
  const double rho0 = counterexample_rho0(c);
  CHECK(pointwise_sq_norm(one2, c, {rho0, 0.0}) ==
        doctest::Approx(7.8125e-4).epsilon(1e-12));  // 1/1280 exactly
  // quadratic scaling under coefficient scaling
  const ModeSection twice = one2.scaled(2.0);
  CHECK(pointwise_sq_norm(twice, c, {0.4, 0.01}) ==
        doctest::Approx(4.0 * pointwise_sq_norm(one2, c, {0.4, 0.01})).epsilon(1e-14));
}

TEST_CASE("l2 inner products against the rho-variable oracle") {
  const Collar c = make_collar(0.1, 8);
  ModeSection dz2(2);
  dz2.set(0, 1.0);
  // ||(dz)^2||^2 = delta * mu1; oracle integrates sech^3 in rho
  const double mu1 = rho_mode_integral(c, 0, 2);
  CHECK(mu1 == doctest::Approx(1.5707817826971292).epsilon(1e-12));  // closed form check below
  const double closed = (1.0 / std::cosh(c.half_width)) * std::tanh(c.half_width) +
                        std::atan(std::sinh(c.half_width));
  CHECK(mu1 == doctest::Approx(closed).epsilon(1e-12));
  const cd ip = l2_inner(dz2, dz2, c, -c.half_width, c.half_width, kQ);
  CHECK(ip.real() == doctest::Approx(0.1 * mu1).epsilon(1e-10));
  CHECK(ip.imag() == 0.0);

  // distinct modes are exactly orthogonal (theta integral vanishes per mode)
  ModeSection w1(2);
  w1.set(1, 1.0);
  CHECK(l2_inner(w1, dz2, c, -c.half_width, c.half_width, kQ) == cd(0.0, 0.0));

  // mode norms against the oracle for a few k
  for (int k : {-2, -1, 1, 2}) {
    ModeSection wk(2);
    wk.set(k, 1.0);
    const double lg = l2_inner_log(wk, wk, c, -c.half_width, c.half_width, kQ).log_mod;
    const double oracle = std::log(0.1) + std::log(rho_mode_integral(c, k, 2));
    CHECK(lg == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("l2 inner conjugate symmetry and positivity on random sections") {
  const Collar c = make_collar(2.0, 8);
  Rng rng(41);
  for (int rep = 0; rep < 4; ++rep) {
    ModeSection a = random_section(rng, c, 3, 4);
    ModeSection b = random_section(rng, c, 3, 4);
    const cd ab = l2_inner(a, b, c, -c.half_width, c.half_width, kQ);
    const cd ba = l2_inner(b, a, c, -c.half_width, c.half_width, kQ);
    CHECK(ab.real() == doctest::Approx(ba.real()).epsilon(1e-11));
    CHECK(ab.imag() == doctest::Approx(-ba.imag()).epsilon(1e-11));
    const cd aa = l2_inner(a, a, c, -c.half_width, c.half_width, kQ);
    CHECK(aa.real() > 0.0);
    CHECK(std::abs(aa.imag()) <= 1e-14 * aa.real());
  }
  ModeSection zero_vs(3);
  zero_vs.set(2, 1e-30);
  CHECK(l2_inner_log(zero_vs, zero_vs, c, -c.half_width, c.half_width, kQ).log_mod >
        -std::numeric_limits<double>::infinity());
  // mismatched powers
  ModeSection p2(2), p3(3);
  p2.set(0, 1.0);
  p3.set(0, 1.0);
  CHECK_THROWS_AS(l2_inner(p2, p3, c, -1.0, 1.0, kQ), PowerMismatchError);
}

TEST_CASE("mode propagation") {
  const Collar c = make_collar(0.1, 8);
  CHECK(propagate_mode(c, 0, -1.0, 2.0).log_mod == 0.0);
  CHECK(propagate_mode(c, 5, 0.7, 0.7).log_mod == 0.0);
  const double lg = propagate_mode(c, 1, 0.0, c.half_width).log_mod;
  CHECK(lg == doctest::Approx(-96.94029745858168).epsilon(1e-12));
  // semigroup in log space
  Rng rng(7);
  for (int k : {-3, 1, 2}) {
    for (int rep = 0; rep < 8; ++rep) {
      const double a = (rng.uniform() * 2 - 1) * c.half_width;
      const double b = (rng.uniform() * 2 - 1) * c.half_width;
      const double mid = (rng.uniform() * 2 - 1) * c.half_width;
      const double split =
          propagate_mode(c, k, a, mid).log_mod + propagate_mode(c, k, mid, b).log_mod;
      CHECK(split == doctest::Approx(propagate_mode(c, k, a, b).log_mod)
                         .epsilon(1e-12)
                         .scale(std::max(1.0, std::abs(split))));
    }
  }
}

TEST_CASE("boundary decomposition basics") {
  const Collar c = make_collar(0.1, 8);
  // constant section: only g2 survives
  const auto dec = decompose_boundary(c, {}, {{0, 1.0}}, 0.0, 2);
  CHECK(dec.g2.coeff(0) == cd(1.0, 0.0));
  CHECK(dec.g1.empty());
  CHECK(dec.g3.empty());
  // A = {1: 1} from the left boundary: coefficient equals the propagation
  // factor from -R to the core
  const auto dec2 = decompose_boundary(c, {{1, 1.0}}, {}, 0.0, 2);
  CHECK(dec2.g1.coeff_log(1).log_mod ==
        doctest::Approx(propagate_mode(c, 1, -c.half_width, 0.0).log_mod).epsilon(1e-13));
  CHECK(dec2.g1.coeff_log(1).log_mod == doctest::Approx(-96.94029745858168).epsilon(1e-12));
  CHECK_THROWS_AS(decompose_boundary(c, {}, {}, c.half_width, 2), DomainError);
}

TEST_CASE("Fourier boundary analysis") {
  const Collar c = make_collar(0.1, 16);
  // constants and single oscillations
  std::vector<cd> samples(64, cd(2.5, -1.0));
  auto coeffs = fourier_boundary(samples, c);
  REQUIRE(coeffs.count(0) == 1);
  CHECK(coeffs.at(0).real() == doctest::Approx(2.5).epsilon(1e-14));
  for (const auto& [k, a] : coeffs)
    if (k != 0) CHECK(std::abs(a) <= 1e-13);
  for (int j = 0; j < 64; ++j) samples[j] = std::polar(1.0, 2.0 * kPi * j / 64.0);
  coeffs = fourier_boundary(samples, c);
  REQUIRE(coeffs.count(1) == 1);
  CHECK(std::abs(coeffs.at(1) - cd(1.0, 0.0)) <= 1e-13);
  for (const auto& [k, a] : coeffs)
    if (k != 1) CHECK(std::abs(a) <= 1e-13);

  // random band-limited: round trip and Parseval to 1e-12
  Rng rng(11);
  std::map<int, cd> truth;
  for (int k = -16; k <= 16; ++k) truth[k] = rng.complex_normal();
  const int N = 64;
  std::vector<cd> sig(N);
  for (int j = 0; j < N; ++j) {
    cd v(0.0, 0.0);
    for (const auto& [k, a] : truth) v += a * std::polar(1.0, 2.0 * kPi * k * j / double(N));
    sig[j] = v;
  }
  const auto got = fourier_boundary(sig, c);
  double parseval = 0.0, mean_sq = 0.0;
  for (const auto& [k, a] : truth) {
    CHECK(std::abs(got.at(k) - a) <= 1e-12);
  }
  for (const auto& [k, a] : got) parseval += std::norm(a);
  for (const auto& v : sig) mean_sq += std::norm(v) / N;
  CHECK(parseval == doctest::Approx(mean_sq).epsilon(1e-12));

  CHECK_THROWS_AS(fourier_boundary(std::vector<cd>(16, cd(1, 0)), c), AliasingError);
}

TEST_CASE("reconstruction: decompose then re-evaluate matches the section") {
  // sample a truncated holomorphic f on both boundary circles, decompose,
  // re-evaluate across the collar; self-consistency to 1e-9 relative
  const Collar c = make_collar(0.5, 16);
  Rng rng(101);
  const ModeSection f = random_section(rng, c, 2, 12);
  const int N = 64;
  std::vector<cd> left(N), right(N);
  for (int j = 0; j < N; ++j) {
    const double theta = c.delta * j / N;
    left[j] = eval_f(f, c, {-c.half_width, theta});
    right[j] = eval_f(f, c, {c.half_width, theta});
  }
  const auto A = fourier_boundary(left, c);
  const auto B = fourier_boundary(right, c);
  const auto dec = decompose_boundary(c, A, B, 0.0, 2);
  const ModeSection g = dec.g1 + dec.g2 + dec.g3;
  double max_f = 0.0, max_err = 0.0;
  for (double rho = -c.half_width; rho <= c.half_width + 1e-9; rho += c.half_width / 8.0) {
    for (int j = 0; j < 8; ++j) {
      const CollarPoint p{std::min(rho, c.half_width), c.delta * (j + 0.37) / 8.0};
      const cd fv = eval_f(f, c, p);
      max_f = std::max(max_f, std::abs(fv));
      max_err = std::max(max_err, std::abs(fv - eval_f(g, c, p)));
    }
  }
  CHECK(max_err <= 1e-9 * max_f);
}

TEST_CASE("contract") {
  const Collar c = make_collar(0.1, 8);
  ModeSection s3(3), u1(1), s2(2);
  s3.set(1, 1.0);
  u1.set(0, 1.0);
  s2.set(0, 1.0);
  // S = U = (dz)^m reproduces the pointwise squared norm
  const CollarPoint p{0.8, 0.02};
  const auto self = contract(s2, s2, c, p);
  CHECK(self.power == 0);
  CHECK(self.scalar().real() ==
        doctest::Approx(pointwise_sq_norm(s2, c, p)).epsilon(1e-13));
  // S = w (dz)^3 against (dz)^1 at the core: value w * cosh^{-2} 0 = w
  const auto v = contract(s3, u1, c, {0.0, 0.0});
  CHECK(v.power == 2);
  CHECK(v.scalar().real() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(contract(u1, s3, c, p), PowerMismatchError);
}

TEST_CASE("JSON round trip is byte-exact") {
  ModeSection s(4);
  s.set(-3, cd(0.1234567890123456789, -9.87e-101));
  s.set(0, cd(-1.0, 3.5));
  s.set(17, cd(2.2250738585072014e-308, 1.7976931348623157e308));
  const std::string j1 = to_json(s);
  const ModeSection s2 = mode_section_from_json(j1);
  const std::string j2 = to_json(s2);
  CHECK(j1 == j2);
  CHECK(mode_section_from_json(j2).coeff(0) == s.coeff(0));
  // a coefficient outside double range cannot use the exchange format
  ModeSection big(2);
  big.set_log(1, LogComplex::from_polar_log(1000.0, 0.3));
  CHECK_THROWS_AS(to_json(big), OverflowError);
}
