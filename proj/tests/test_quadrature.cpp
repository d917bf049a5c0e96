#include <cmath>

#include "collar/errors.hpp"
#include "collar/constants.hpp"
#include "collar/quadrature.hpp"
#include "doctest.h"

using namespace collar;

TEST_CASE("adaptive Simpson on smooth integrands") {
  QuadratureSpec q;
  q.rel_tol = 1e-12;
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, kPi, q) ==
        doctest::Approx(2.0).epsilon(1e-11));
  CHECK(adaptive_simpson([](double x) { return std::exp(-x * x); }, -8.0, 8.0, q) ==
        doctest::Approx(std::sqrt(kPi)).epsilon(1e-11));
  CHECK_THROWS_AS(adaptive_simpson([](double) { return 1.0; }, 0.0, 1.0,
                                   QuadratureSpec{8, 2.0, 8}),
                  DomainError);
}

TEST_CASE("log-space Simpson matches plain Simpson where both work") {
  QuadratureSpec q;
  q.rel_tol = 1e-12;
  auto f = [](double x) { return std::exp(-0.5 * x) * (2.0 + std::cos(3 * x)); };
  const double plain = adaptive_simpson(f, 0.0, 4.0, q);
  const double logv = log_adaptive_simpson([&](double x) { return std::log(f(x)); }, 0.0, 4.0, q);
  CHECK(std::exp(logv) == doctest::Approx(plain).epsilon(1e-10));
}

TEST_CASE("log-space Simpson handles thousands of e-folds") {
  QuadratureSpec q;
  q.rel_tol = 1e-11;
  q.max_refine = 60;
  // int_0^1 e^{a x} dx = (e^a - 1)/a: log-value a + log((1 - e^{-a})/a)
  const double a = 5000.0;
  const double logv = log_adaptive_simpson([&](double x) { return a * x; }, 0.0, 1.0, q);
  CHECK(logv == doctest::Approx(a - std::log(a)).epsilon(1e-10));
  // and a steep decaying one
  const double logd = log_adaptive_simpson([&](double x) { return -2000.0 * x; }, 0.0, 1.0, q);
  CHECK(logd == doctest::Approx(-std::log(2000.0)).epsilon(1e-10));
}

TEST_CASE("non-convergence raises an accuracy error with both estimates") {
  QuadratureSpec q;
  q.rel_tol = 1e-13;
  q.max_refine = 2;  // starved on purpose
  auto nasty = [](double x) { return std::log(std::abs(std::sin(1.0 / (x + 1e-4)))) * 0.5 - 40.0 * x; };
  CHECK_THROWS_AS(log_adaptive_simpson(nasty, 0.0, 1.0, q), AccuracyError);
  try {
    log_adaptive_simpson(nasty, 0.0, 1.0, q);
  } catch (const AccuracyError& e) {
    CHECK(std::isfinite(e.previous_estimate));
    CHECK(std::isfinite(e.last_estimate));
  }
}

TEST_CASE("composite Simpson weights integrate cubics exactly") {
  for (int n : {9, 12, 17, 33}) {
    const double h = 2.0 / (n - 1);
    const auto w = composite_simpson_weights(n, h);
    double acc = 0.0, lin = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = -1.0 + i * h;
      acc += w[i] * x * x * x;  // odd: zero
      lin += w[i] * (1.0 + x * x);
    }
    CHECK(acc == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
    CHECK(lin == doctest::Approx(2.0 + 2.0 / 3.0).epsilon(1e-13));
  }
}
