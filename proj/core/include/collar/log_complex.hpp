#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "collar/constants.hpp"
#include "collar/errors.hpp"

namespace collar {

/// Complex value stored as (log |z|, arg z). All powers of the collar
/// coordinate w are handled in this form: exponents reach +-10^3 and
/// more for small core lengths, far beyond double range.
struct LogComplex {
  double log_mod = -std::numeric_limits<double>::infinity();  // -inf encodes zero
  double phase = 0.0;                                         // radians in (-pi, pi]

  static LogComplex zero() { return {}; }
  static LogComplex one() { return {0.0, 0.0}; }

  static LogComplex from(std::complex<double> z) {
    if (z == std::complex<double>(0.0, 0.0)) return zero();
    return {std::log(std::abs(z)), std::arg(z)};
  }

  static LogComplex from_polar_log(double log_mod, double phase) {
    LogComplex v{log_mod, 0.0};
    v.phase = wrap_phase(phase);
    return v;
  }

  static LogComplex from_real(double x) {
    if (x == 0.0) return zero();
    return {std::log(std::abs(x)), x > 0.0 ? 0.0 : kPi};
  }

  bool is_zero() const { return std::isinf(log_mod) && log_mod < 0.0; }

  /// Linear-scale value; saturates to 0 / +-inf components outside range.
  std::complex<double> to_complex() const {
    if (is_zero()) return {0.0, 0.0};
    const double m = std::exp(log_mod);
    return {m * std::cos(phase), m * std::sin(phase)};
  }

  /// Linear-scale value, throwing if the exponent cannot be represented.
  std::complex<double> to_complex_checked(int mode_for_error = 0) const {
    if (!is_zero() && std::abs(log_mod) > kMaxExp)
      throw OverflowError("exponent magnitude exceeds 700 after combination", mode_for_error);
    return to_complex();
  }

  static double wrap_phase(double p) {
    if (std::isnan(p)) return 0.0;
    p = std::fmod(p, 2.0 * kPi);
    if (p > kPi) p -= 2.0 * kPi;
    if (p <= -kPi) p += 2.0 * kPi;
    return p;
  }
};

inline LogComplex conj(LogComplex a) {
  a.phase = LogComplex::wrap_phase(-a.phase);
  return a;
}

inline LogComplex operator*(LogComplex a, LogComplex b) {
  if (a.is_zero() || b.is_zero()) return LogComplex::zero();
  return LogComplex::from_polar_log(a.log_mod + b.log_mod, a.phase + b.phase);
}

inline LogComplex operator/(LogComplex a, LogComplex b) {
  if (a.is_zero()) return LogComplex::zero();
  return LogComplex::from_polar_log(a.log_mod - b.log_mod, a.phase - b.phase);
}

inline LogComplex operator*(LogComplex a, double s) { return a * LogComplex::from_real(s); }

inline LogComplex operator-(LogComplex a) {
  return LogComplex::from_polar_log(a.log_mod, a.phase + kPi);
}

/// a^k for integer k; exact in log space.
inline LogComplex pow_int(LogComplex a, long k) {
  if (k == 0) return LogComplex::one();
  if (a.is_zero()) return LogComplex::zero();
  return LogComplex::from_polar_log(static_cast<double>(k) * a.log_mod,
                                    static_cast<double>(k) * a.phase);
}

/// Sum in log space: the smaller term is folded onto the larger one.
inline LogComplex operator+(LogComplex a, LogComplex b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (b.log_mod > a.log_mod) std::swap(a, b);
  const std::complex<double> rest =
      1.0 + std::polar(std::exp(b.log_mod - a.log_mod), b.phase - a.phase);
  if (rest == std::complex<double>(0.0, 0.0)) return LogComplex::zero();
  return LogComplex::from_polar_log(a.log_mod + std::log(std::abs(rest)),
                                    a.phase + std::arg(rest));
}

inline LogComplex operator-(LogComplex a, LogComplex b) { return a + (-b); }

/// log |e^{a+ib} - 1|, stable across the whole range of a.
/// Uses |e^{a+ib} - 1|^2 = expm1(a)^2 + 4 e^a sin^2(b/2).
inline double log_abs_expm1(double a, double b) {
  if (a > 350.0) return a + log_abs_expm1(-a, -b);
  const double em1 = std::expm1(a);
  const double s = std::sin(0.5 * b);
  const double sq = em1 * em1 + 4.0 * std::exp(a) * s * s;
  return 0.5 * std::log(sq);
}

/// log |z - 1| for z given in log form.
inline double log_abs_minus_one(LogComplex z) {
  if (z.is_zero()) return 0.0;
  return log_abs_expm1(z.log_mod, z.phase);
}

/// Accumulator for sums of complex terms spanning many decades: terms are
/// added at a running log scale that is rebased when a larger term arrives.
class ScaledAccumulator {
 public:
  void add(LogComplex term) {
    if (term.is_zero()) return;
    if (empty_) {
      scale_ = term.log_mod;
      empty_ = false;
    } else if (term.log_mod > scale_ + 30.0) {
      rebase(term.log_mod);
    }
    sum_ += std::polar(std::exp(term.log_mod - scale_), term.phase);
  }

  void add_scaled(double log_weight, std::complex<double> v) {
    if (v == std::complex<double>(0.0, 0.0)) return;
    add(LogComplex::from(v) * LogComplex::from_polar_log(log_weight, 0.0));
  }

  LogComplex value() const {
    if (empty_) return LogComplex::zero();
    return LogComplex::from(sum_) * LogComplex::from_polar_log(scale_, 0.0);
  }

 private:
  void rebase(double new_scale) {
    sum_ *= std::exp(scale_ - new_scale);
    scale_ = new_scale;
  }
  std::complex<double> sum_{0.0, 0.0};
  double scale_ = 0.0;
  bool empty_ = true;
};

}  // namespace collar
