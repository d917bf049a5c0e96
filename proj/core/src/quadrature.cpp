#include "collar/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "collar/errors.hpp"

namespace collar {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (b > a) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double log_simpson(double h, double lfa, double lfm, double lfb) {
  return log_sum(log_sum(lfa, std::log(4.0) + lfm), lfb) + std::log(h / 6.0);
}

struct LogAdapt {
  const std::function<double(double)>& lf;
  double rel_tol;
  int max_depth;

  double refine(double a, double b, double lfa, double lfm, double lfb, double s, int depth) const {
    const double m = 0.5 * (a + b);
    const double lm1 = lf(0.5 * (a + m));
    const double lm2 = lf(0.5 * (m + b));
    const double h2 = 0.5 * (b - a);
    const double sl = log_simpson(h2, lfa, lm1, lfm);
    const double sr = log_simpson(h2, lfm, lm2, lfb);
    const double s2 = log_sum(sl, sr);
    if (s == kNegInf && s2 == kNegInf) return kNegInf;
    const double err = std::abs(std::expm1(s - s2));
    if (err <= 15.0 * rel_tol) {
      // Richardson step (16 S2 - S)/15 when it keeps the sign.
      const double r = s - s2;
      if (r < std::log(16.0)) return s2 + std::log((16.0 - std::exp(r)) / 15.0);
      return s2;
    }
    if (depth >= max_depth)
      throw AccuracyError("log_adaptive_simpson: no convergence within max_refine (estimates are logs)",
                          s, s2);
    return log_sum(refine(a, m, lfa, lm1, lfm, sl, depth + 1),
                   refine(m, b, lfm, lm2, lfb, sr, depth + 1));
  }
};

struct Adapt {
  const std::function<double(double)>& f;
  double rel_tol;
  int max_depth;
  double scale;  // magnitude reference for the relative test

  double refine(double a, double b, double fa, double fm, double fb, double s, int depth) const {
    const double m = 0.5 * (a + b);
    const double f1 = f(0.5 * (a + m));
    const double f2 = f(0.5 * (m + b));
    const double h2 = 0.5 * (b - a);
    const double sl = (fa + 4.0 * f1 + fm) * h2 / 6.0;
    const double sr = (fm + 4.0 * f2 + fb) * h2 / 6.0;
    const double s2 = sl + sr;
    const double err = std::abs(s2 - s);
    if (err <= 15.0 * rel_tol * std::max(std::abs(s2), scale)) return s2 + (s2 - s) / 15.0;
    if (depth >= max_depth)
      throw AccuracyError("adaptive_simpson: no convergence within max_refine", s, s2);
    return refine(a, m, fa, f1, fm, sl, depth + 1) + refine(m, b, fm, f2, fb, sr, depth + 1);
  }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureSpec& q) {
  if (!(q.rel_tol > 0.0 && q.rel_tol < 1.0))
    throw DomainError("adaptive_simpson: rel_tol must lie in (0, 1)");
  const int panels = std::max(q.panels, 8);
  const double h = (b - a) / panels;
  // First pass to set the magnitude reference.
  std::vector<double> fa(panels + 1), fm(panels);
  for (int i = 0; i <= panels; ++i) fa[i] = f(a + i * h);
  double rough = 0.0;
  for (int i = 0; i < panels; ++i) {
    fm[i] = f(a + (i + 0.5) * h);
    rough += (fa[i] + 4.0 * fm[i] + fa[i + 1]) * h / 6.0;
  }
  Adapt ad{f, q.rel_tol, q.max_refine, std::abs(rough) / panels + 1e-300};
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double l = a + i * h;
    const double s = (fa[i] + 4.0 * fm[i] + fa[i + 1]) * h / 6.0;
    total += ad.refine(l, l + h, fa[i], fm[i], fa[i + 1], s, 0);
  }
  return total;
}

double log_adaptive_simpson(const std::function<double(double)>& log_f, double a, double b,
                            const QuadratureSpec& q) {
  if (!(q.rel_tol > 0.0 && q.rel_tol < 1.0))
    throw DomainError("log_adaptive_simpson: rel_tol must lie in (0, 1)");
  const int panels = std::max(q.panels, 8);
  const double h = (b - a) / panels;
  LogAdapt ad{log_f, q.rel_tol, q.max_refine};
  double total = kNegInf;
  for (int i = 0; i < panels; ++i) {
    const double l = a + i * h;
    const double r = l + h;
    const double lfa = log_f(l);
    const double lfm = log_f(0.5 * (l + r));
    const double lfb = log_f(r);
    const double s = log_simpson(h, lfa, lfm, lfb);
    total = log_sum(total, ad.refine(l, r, lfa, lfm, lfb, s, 0));
  }
  return total;
}

double composite_simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n < 2 || n % 2 != 0) throw DomainError("composite_simpson: n must be even and >= 2");
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

std::vector<double> composite_simpson_weights(int n, double h) {
  if (n < 2) throw DomainError("composite_simpson_weights: need n >= 2");
  std::vector<double> w(n, 0.0);
  auto add_simpson = [&](int lo, int hi) {
    for (int i = lo; i + 2 <= hi; i += 2) {
      w[i] += h / 3.0;
      w[i + 1] += 4.0 * h / 3.0;
      w[i + 2] += h / 3.0;
    }
  };
  const int intervals = n - 1;
  if (intervals % 2 == 0) {
    add_simpson(0, n - 1);
  } else if (n >= 5) {
    add_simpson(0, n - 4);
    const double c = 3.0 * h / 8.0;
    w[n - 4] += c;
    w[n - 3] += 3.0 * c;
    w[n - 2] += 3.0 * c;
    w[n - 1] += c;
  } else {
    for (int i = 0; i + 1 < n; ++i) {
      w[i] += 0.5 * h;
      w[i + 1] += 0.5 * h;
    }
  }
  return w;
}

}  // namespace collar
