#include "collar/bergman.hpp"

#include <cmath>

#include "collar/errors.hpp"

namespace collar {

namespace {

double log_sum(double a, double b) {
  if (std::isinf(a) && a < 0) return b;
  if (std::isinf(b) && b < 0) return a;
  if (b > a) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

double log_mode_sq_norm(const Collar& c, int k, int m, const QuadratureSpec& q) {
  if (std::abs(k) > c.k_max) throw DomainError("mode_sq_norm: |k| beyond the collar's k_max");
  return std::log(c.delta) +
         log_mode_weight_integral(c, k, m, -c.half_width, c.half_width, q);
}

double mode_sq_norm(const Collar& c, int k, int m, const QuadratureSpec& q) {
  const double lg = log_mode_sq_norm(c, k, m, q);
  if (lg > kMaxExp) throw OverflowError("mode_sq_norm: N_k exceeds double range at k=" + std::to_string(k), k);
  return std::exp(lg);
}

DensityValue density_with_share(const Collar& c, int m, const CollarPoint& p,
                                const QuadratureSpec& q) {
  const double log_w2 = 2.0 * log_abs_w(c, p.rho);
  const double log_fiber = -2.0 * m * std::log(std::cosh(p.rho));
  double total = -std::numeric_limits<double>::infinity();
  double best = total;
  int best_k = 0;
  for (int k = -c.k_max; k <= c.k_max; ++k) {
    const double term = k * log_w2 + log_fiber - log_mode_sq_norm(c, k, m, q);
    if (term > best) {
      best = term;
      best_k = k;
    }
    total = log_sum(total, term);
  }
  if (total > kMaxExp) throw OverflowError("density: value exceeds double range", best_k);
  DensityValue v;
  v.value = std::exp(total);
  v.dominant_mode_share = std::exp(best - total);
  v.dominant_mode = best_k;
  return v;
}

double density(const Collar& c, int m, const CollarPoint& p, const QuadratureSpec& q) {
  return density_with_share(c, m, p, q).value;
}

CounterexampleSections counterexample_sections(const Collar& c, int m,
                                               const std::map<int, std::complex<double>>& A,
                                               const std::map<int, std::complex<double>>& B) {
  for (const auto& [k, v] : A)
    if (k < 1 && v != std::complex<double>(0.0, 0.0))
      throw DomainError("counterexample_sections: A must be supported on k >= 1");
  for (const auto& [k, v] : B)
    if (k > 0 && v != std::complex<double>(0.0, 0.0))
      throw DomainError("counterexample_sections: B must be supported on k <= 0");
  const auto dec = decompose_boundary(c, A, B, 0.0, m);
  return {dec.g1, dec.g2, dec.g3};
}

CounterexampleSections counterexample_sections(const Collar& c, int m) {
  return counterexample_sections(c, m, {{1, 1.0}}, {{0, 1.0}, {-1, 1.0}});
}

CounterexampleReport counterexample_report(const Collar& c, int m, const QuadratureSpec& q) {
  if (!(c.delta < kEps1)) throw DomainError("counterexample_report: requires delta < eps1");
  CounterexampleReport r;
  r.delta = c.delta;
  r.m = m;
  r.rho0 = counterexample_rho0(c);
  const CollarPoint x0{r.rho0, 0.0};
  const auto s = counterexample_sections(c, m);
  const auto ratio = [&](const ModeSection& sec) {
    const double num = log_pointwise_sq_norm(sec, c, x0);
    const double den = log_sq_norm_l2(sec, c, q);
    return std::exp(num - den);
  };
  r.ratio1 = ratio(s.s1);
  r.ratio2 = ratio(s.s2);
  r.ratio3 = ratio(s.s3);
  r.mu1 = std::exp(log_mode_weight_integral(c, 0, m, -c.half_width, c.half_width, q));
  r.predicted_ratio2 =
      std::exp((m - 1) * std::log(c.delta) - std::log(r.mu1) - m * std::log(kEps1));
  return r;
}

double log_partial_estimate_profile(int m, double delta_x, double D) {
  if (m < 1 || !(delta_x > 0.0) || !(D > 0.0))
    throw DomainError("partial_estimate_profile: need m >= 1, delta_x > 0, D > 0");
  // log(1 + e^t) with t = pi/delta_x - log(sqrt(m) delta_x^2)
  const double t = kPi / delta_x - std::log(std::sqrt(double(m)) * delta_x * delta_x);
  const double softplus = t > 36.0 ? t : std::log1p(std::exp(t));
  return 0.5 * std::log(double(m)) - std::log(D) - softplus;
}

double partial_estimate_profile(int m, double delta_x, double D) {
  return std::exp(log_partial_estimate_profile(m, delta_x, D));
}

std::vector<DensityReport> density_scan(const std::vector<double>& deltas, int m, int k_max,
                                        const QuadratureSpec& q, int profile_rows) {
  std::vector<DensityReport> out;
  for (double d : deltas) {
    DensityReport rep;
    rep.delta = d;
    rep.m = m;
    rep.k_max = k_max;
    try {
      if (!(d > 0.0 && d < kEps1))
        throw DomainError("density_scan: delta must lie in (0, eps1)");
      const Collar c = make_collar(d, k_max);
      rep.rho0 = counterexample_rho0(c);
      const double lo = -(c.half_width - 1.0), hi = c.half_width - 1.0;
      for (int i = 0; i < profile_rows; ++i) {
        const double rho = profile_rows == 1 ? 0.0 : lo + (hi - lo) * i / (profile_rows - 1);
        const auto v = density_with_share(c, m, {rho, 0.0}, q);
        rep.rows.push_back({rho, v.value, v.dominant_mode_share});
      }
      rep.at_x0 = density(c, m, {rep.rho0, 0.0}, q);
      const auto cr = counterexample_report(c, m, q);
      rep.ratio1 = cr.ratio1;
      rep.ratio2 = cr.ratio2;
      rep.ratio3 = cr.ratio3;
      rep.predicted_ratio2 = cr.predicted_ratio2;
    } catch (const Error& e) {
      rep.error = e.what();
    }
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace collar
