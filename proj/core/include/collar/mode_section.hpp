#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "collar/geometry.hpp"
#include "collar/log_complex.hpp"
#include "collar/quadrature.hpp"

namespace collar {

/// Stored coefficient: the log form drives all arithmetic; the linear
/// snapshot is kept when the amplitude was set from (or fits in) double
/// range so the JSON exchange format round-trips bit-exactly.
struct Amplitude {
  LogComplex value;
  std::complex<double> lin{0.0, 0.0};
  bool lin_exact = false;
};

/// Truncated Laurent series f = sum_k c_k w^k times (dz)^m. Amplitudes are
/// referenced to the rho = 0 normalization of w (|w| = 1 on the core).
class ModeSection {
 public:
  explicit ModeSection(int power);

  int power() const { return power_; }
  const std::map<int, Amplitude>& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }
  int max_abs_mode() const;

  void set(int k, std::complex<double> c);
  void set_log(int k, LogComplex c);
  bool has(int k) const { return coeffs_.count(k) != 0; }
  LogComplex coeff_log(int k) const;
  std::complex<double> coeff(int k) const;  // throws OverflowError outside double range

  ModeSection scaled(std::complex<double> s) const;
  ModeSection scaled_log(LogComplex s) const;
  friend ModeSection operator+(const ModeSection& a, const ModeSection& b);
  friend ModeSection operator-(const ModeSection& a, const ModeSection& b);

  /// Product with a section of lower or equal power; powers add.
  friend ModeSection operator*(const ModeSection& a, const ModeSection& b);

 private:
  int power_;
  std::map<int, Amplitude> coeffs_;
};

/// f(w) at p, in log form; never overflows.
LogComplex eval_f_log(const ModeSection& s, const Collar& c, const CollarPoint& p);

/// f(w) at p as a double complex. Overflow after exponent combination is an
/// error naming the offending mode; underflowed terms vanish harmlessly.
std::complex<double> eval_f(const ModeSection& s, const Collar& c, const CollarPoint& p);

/// log of ||f (dz)^m||^2 = 2 log|f| + 2m log cos y.
double log_pointwise_sq_norm(const ModeSection& s, const Collar& c, const CollarPoint& p);

double pointwise_sq_norm(const ModeSection& s, const Collar& c, const CollarPoint& p);

/// L^2(C) inner product over rho in [rho_lo, rho_hi], computed per mode in
/// the flat y variable (the theta integral is exact by mode orthogonality):
/// <a,b> = delta sum_k a_k conj(b_k) int e^{-2k(2pi/delta) y} cos^{2m-2} y dy.
LogComplex l2_inner_log(const ModeSection& a, const ModeSection& b, const Collar& c,
                        double rho_lo, double rho_hi, const QuadratureSpec& q);

std::complex<double> l2_inner(const ModeSection& a, const ModeSection& b, const Collar& c,
                              double rho_lo, double rho_hi, const QuadratureSpec& q);

/// log ||a||^2 over the whole collar.
double log_sq_norm_l2(const ModeSection& a, const Collar& c, const QuadratureSpec& q);

/// log of the single-mode weight integral I_k = int e^{-2k(2pi/delta)y}
/// cos^{2m-2} y dy over [y(rho_lo), y(rho_hi)].
double log_mode_weight_integral(const Collar& c, int k, int m, double rho_lo, double rho_hi,
                                const QuadratureSpec& q);

/// Mode propagation factor p_k(rho_to)/p_k(rho_from) =
/// exp(-(4 pi k/delta)(arctan e^{rho_to} - arctan e^{rho_from})); real
/// positive, exact in log space.
LogComplex propagate_mode(const Collar& c, int k, double rho_from, double rho_to);

struct BoundaryDecomposition {
  ModeSection g1;  // modes k >= 1, carried from the left boundary circle
  ModeSection g2;  // the mean mode B_0
  ModeSection g3;  // modes k <= -1, carried from the right boundary circle
};

/// Splits boundary Fourier data into the three holomorphic pieces: A are the
/// coefficients of f on the circle rho = -(R-b), B on rho = +(R-b). Only
/// A_{k>=1}, B_0 and B_{k<=-1} enter, matching the construction; stored
/// amplitudes are converted to the core reference via propagate_mode.
BoundaryDecomposition decompose_boundary(const Collar& c,
                                         const std::map<int, std::complex<double>>& A,
                                         const std::map<int, std::complex<double>>& B, double band,
                                         int m);

/// Trapezoid-exact discrete Fourier coefficients of equispaced boundary
/// samples: c_k = (1/N) sum_j f_j e^{-2 pi i j k / N} for |k| <= k_max.
/// N < 2 k_max + 1 cannot resolve the band and is an aliasing error.
std::map<int, std::complex<double>> fourier_boundary(const std::vector<std::complex<double>>& samples,
                                                     const Collar& c);

/// Pointwise coordinate-ring contraction <S, U>_{H^{m1}} (dz)^{m - m1}:
/// the scalar is f_S(w) conj(f_U(w)) cosh^{-2 m1} rho.
struct ContractValue {
  LogComplex scalar_log;
  int power = 0;
  std::complex<double> scalar() const { return scalar_log.to_complex_checked(); }
};

ContractValue contract(const ModeSection& S, const ModeSection& U, const Collar& c,
                       const CollarPoint& p);

/// JSON exchange format {power, coeffs: [[k, re, im], ...], reference: "core"}.
std::string to_json(const ModeSection& s);
ModeSection mode_section_from_json(const std::string& text);

}  // namespace collar
