#pragma once

#include <functional>
#include <vector>

namespace collar {

/// Adaptive-Simpson controls. Panels are the initial subdivision; refinement
/// halves intervals until the local Richardson estimate meets rel_tol or the
/// depth budget is spent, which is an error, never a silent result.
struct QuadratureSpec {
  int panels = 16;
  double rel_tol = 1e-11;
  int max_refine = 48;
};

/// Adaptive Simpson for an ordinary integrand.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureSpec& q);

/// Adaptive Simpson for a strictly positive integrand given through its log.
/// Returns the log of the integral; all arithmetic stays in log space, so
/// integrands spanning thousands of e-folds are fine.
double log_adaptive_simpson(const std::function<double(double)>& log_f, double a, double b,
                            const QuadratureSpec& q);

/// Fixed composite Simpson on n panels (n even); no adaptivity, no log space.
double composite_simpson(const std::function<double(double)>& f, double a, double b, int n);

/// Composite quadrature weights for n uniform samples with spacing h:
/// Simpson, with a 3/8 block when the interval count is odd.
std::vector<double> composite_simpson_weights(int n, double h);

}  // namespace collar
