#include "collar/mode_section.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "collar/errors.hpp"

namespace collar {

namespace {

void check_powers(const ModeSection& a, const ModeSection& b) {
  if (a.power() != b.power())
    throw PowerMismatchError("section powers differ: " + std::to_string(a.power()) + " vs " +
                             std::to_string(b.power()));
}

void check_mode_range(const ModeSection& s, const Collar& c, const char* what) {
  if (s.max_abs_mode() > c.k_max)
    throw DomainError(std::string(what) + ": section mode exceeds the collar's k_max");
}

Amplitude make_amplitude(LogComplex v) {
  Amplitude a;
  a.value = v;
  if (!v.is_zero() && std::abs(v.log_mod) <= kMaxExp) {
    a.lin = v.to_complex();
    a.lin_exact = false;  // derived, not authoritative
  }
  return a;
}

}  // namespace

ModeSection::ModeSection(int power) : power_(power) {
  if (power < 1) throw DomainError("ModeSection: power must be >= 1");
}

int ModeSection::max_abs_mode() const {
  int m = 0;
  for (const auto& [k, a] : coeffs_) m = std::max(m, std::abs(k));
  return m;
}

void ModeSection::set(int k, std::complex<double> c) {
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
    throw DomainError("ModeSection::set: amplitude must be finite");
  if (c == std::complex<double>(0.0, 0.0)) {
    coeffs_.erase(k);
    return;
  }
  Amplitude a;
  a.value = LogComplex::from(c);
  a.lin = c;
  a.lin_exact = true;
  coeffs_[k] = a;
}

void ModeSection::set_log(int k, LogComplex c) {
  if (std::isnan(c.log_mod) || std::isnan(c.phase))
    throw DomainError("ModeSection::set_log: amplitude must not be NaN");
  if (c.is_zero()) {
    coeffs_.erase(k);
    return;
  }
  coeffs_[k] = make_amplitude(c);
}

LogComplex ModeSection::coeff_log(int k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? LogComplex::zero() : it->second.value;
}

std::complex<double> ModeSection::coeff(int k) const {
  auto it = coeffs_.find(k);
  if (it == coeffs_.end()) return {0.0, 0.0};
  if (it->second.lin_exact) return it->second.lin;
  return it->second.value.to_complex_checked(k);
}

ModeSection ModeSection::scaled(std::complex<double> s) const { return scaled_log(LogComplex::from(s)); }

ModeSection ModeSection::scaled_log(LogComplex s) const {
  ModeSection out(power_);
  for (const auto& [k, a] : coeffs_) out.set_log(k, a.value * s);
  return out;
}

ModeSection operator+(const ModeSection& a, const ModeSection& b) {
  check_powers(a, b);
  ModeSection out(a.power());
  for (const auto& [k, c] : a.coeffs_) out.set_log(k, c.value);
  for (const auto& [k, c] : b.coeffs_) out.set_log(k, out.coeff_log(k) + c.value);
  return out;
}

ModeSection operator-(const ModeSection& a, const ModeSection& b) {
  check_powers(a, b);
  ModeSection out(a.power());
  for (const auto& [k, c] : a.coeffs_) out.set_log(k, c.value);
  for (const auto& [k, c] : b.coeffs_) out.set_log(k, out.coeff_log(k) - c.value);
  return out;
}

ModeSection operator*(const ModeSection& a, const ModeSection& b) {
  ModeSection out(a.power() + b.power());
  for (const auto& [ka, ca] : a.coeffs_)
    for (const auto& [kb, cb] : b.coeffs_)
      out.set_log(ka + kb, out.coeff_log(ka + kb) + ca.value * cb.value);
  return out;
}

LogComplex eval_f_log(const ModeSection& s, const Collar& c, const CollarPoint& p) {
  check_mode_range(s, c, "eval_f");
  const LogComplex w = w_coordinate(c, p);
  ScaledAccumulator acc;
  for (const auto& [k, a] : s.coeffs()) acc.add(a.value * pow_int(w, k));
  return acc.value();
}

std::complex<double> eval_f(const ModeSection& s, const Collar& c, const CollarPoint& p) {
  check_mode_range(s, c, "eval_f");
  const LogComplex w = w_coordinate(c, p);
  ScaledAccumulator acc;
  for (const auto& [k, a] : s.coeffs()) {
    const LogComplex term = a.value * pow_int(w, k);
    if (!term.is_zero() && term.log_mod > kMaxExp)
      throw OverflowError("eval_f: exponent exceeds 700 at mode k=" + std::to_string(k), k);
    acc.add(term);
  }
  return acc.value().to_complex_checked();
}

double log_pointwise_sq_norm(const ModeSection& s, const Collar& c, const CollarPoint& p) {
  const LogComplex f = eval_f_log(s, c, p);
  if (f.is_zero()) return -std::numeric_limits<double>::infinity();
  // cos y = sech rho, so 2m log cos y = -2m log cosh rho.
  const double log_cos_y = -std::log(std::cosh(p.rho));
  return 2.0 * f.log_mod + 2.0 * s.power() * log_cos_y;
}

double pointwise_sq_norm(const ModeSection& s, const Collar& c, const CollarPoint& p) {
  const double lg = log_pointwise_sq_norm(s, c, p);
  if (lg > kMaxExp) throw OverflowError("pointwise_sq_norm: exponent exceeds 700", 0);
  return std::exp(lg);
}

double log_mode_weight_integral(const Collar& c, int k, int m, double rho_lo, double rho_hi,
                                const QuadratureSpec& q) {
  const double y_lo = y_of_rho(rho_lo);
  const double y_hi = y_of_rho(rho_hi);
  const double rate = -2.0 * k * (2.0 * kPi / c.delta);
  const double cos_pow = 2.0 * m - 2.0;
  auto log_f = [&](double y) { return rate * y + cos_pow * std::log(std::cos(y)); };
  return log_adaptive_simpson(log_f, y_lo, y_hi, q);
}

LogComplex l2_inner_log(const ModeSection& a, const ModeSection& b, const Collar& c,
                        double rho_lo, double rho_hi, const QuadratureSpec& q) {
  check_powers(a, b);
  check_mode_range(a, c, "l2_inner");
  check_mode_range(b, c, "l2_inner");
  if (!(rho_lo < rho_hi) || rho_lo < -c.half_width - 1e-12 || rho_hi > c.half_width + 1e-12)
    throw DomainError("l2_inner: need rho_lo < rho_hi within [-R, R]");
  const int m = a.power();
  ScaledAccumulator acc;
  for (const auto& [k, ca] : a.coeffs()) {
    if (!b.has(k)) continue;
    const double log_ik = log_mode_weight_integral(c, k, m, rho_lo, rho_hi, q);
    acc.add(ca.value * conj(b.coeff_log(k)) * LogComplex::from_polar_log(log_ik, 0.0) *
            LogComplex::from_real(c.delta));
  }
  return acc.value();
}

std::complex<double> l2_inner(const ModeSection& a, const ModeSection& b, const Collar& c,
                              double rho_lo, double rho_hi, const QuadratureSpec& q) {
  return l2_inner_log(a, b, c, rho_lo, rho_hi, q).to_complex_checked();
}

double log_sq_norm_l2(const ModeSection& a, const Collar& c, const QuadratureSpec& q) {
  const LogComplex v = l2_inner_log(a, a, c, -c.half_width, c.half_width, q);
  return v.log_mod;
}

LogComplex propagate_mode(const Collar& c, int k, double rho_from, double rho_to) {
  if (std::abs(rho_from) > c.half_width + 1e-12 || std::abs(rho_to) > c.half_width + 1e-12)
    throw DomainError("propagate_mode: rho outside [-R, R]");
  // -(4 pi k/delta)(atan e^{to} - atan e^{from}) = -(2 pi k/delta)(y_to - y_from)
  const double log_factor = -(2.0 * kPi * k / c.delta) * (y_of_rho(rho_to) - y_of_rho(rho_from));
  return LogComplex::from_polar_log(log_factor, 0.0);
}

BoundaryDecomposition decompose_boundary(const Collar& c,
                                         const std::map<int, std::complex<double>>& A,
                                         const std::map<int, std::complex<double>>& B, double band,
                                         int m) {
  if (!(band >= 0.0 && band < c.half_width))
    throw DomainError("decompose_boundary: band must lie in [0, R)");
  for (const auto& [k, v] : A)
    if (std::abs(k) > c.k_max) throw DomainError("decompose_boundary: A mode beyond k_max");
  for (const auto& [k, v] : B)
    if (std::abs(k) > c.k_max) throw DomainError("decompose_boundary: B mode beyond k_max");
  const double rho_left = -(c.half_width - band);
  const double rho_right = c.half_width - band;
  BoundaryDecomposition out{ModeSection(m), ModeSection(m), ModeSection(m)};
  for (const auto& [k, v] : A)
    if (k >= 1) out.g1.set_log(k, LogComplex::from(v) * propagate_mode(c, k, rho_left, 0.0));
  if (auto it = B.find(0); it != B.end()) out.g2.set(0, it->second);
  for (const auto& [k, v] : B)
    if (k <= -1) out.g3.set_log(k, LogComplex::from(v) * propagate_mode(c, k, rho_right, 0.0));
  return out;
}

std::map<int, std::complex<double>> fourier_boundary(const std::vector<std::complex<double>>& samples,
                                                     const Collar& c) {
  const int n = static_cast<int>(samples.size());
  if (n < 2 * c.k_max + 1)
    throw AliasingError("fourier_boundary: need at least 2*k_max+1 samples, got " +
                        std::to_string(n));
  std::map<int, std::complex<double>> out;
  for (int k = -c.k_max; k <= c.k_max; ++k) {
    std::complex<double> s{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
      const double ang = -2.0 * kPi * j * k / n;
      s += samples[j] * std::polar(1.0, ang);
    }
    s /= static_cast<double>(n);
    if (s != std::complex<double>(0.0, 0.0)) out[k] = s;
  }
  return out;
}

ContractValue contract(const ModeSection& S, const ModeSection& U, const Collar& c,
                       const CollarPoint& p) {
  if (U.power() > S.power())
    throw PowerMismatchError("contract: contracting power exceeds the section power");
  ContractValue v;
  v.power = S.power() - U.power();
  const LogComplex fs = eval_f_log(S, c, p);
  const LogComplex fu = eval_f_log(U, c, p);
  const double log_sech = -std::log(std::cosh(p.rho));
  v.scalar_log = fs * conj(fu) * LogComplex::from_polar_log(2.0 * U.power() * log_sech, 0.0);
  return v;
}

std::string to_json(const ModeSection& s) {
  nlohmann::ordered_json j;
  j["power"] = s.power();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [k, a] : s.coeffs()) {
    std::complex<double> v;
    if (a.lin_exact) {
      v = a.lin;
    } else {
      v = a.value.to_complex_checked(k);  // throws outside double range
    }
    arr.push_back({k, v.real(), v.imag()});
  }
  j["coeffs"] = arr;
  j["reference"] = "core";
  return j.dump();
}

ModeSection mode_section_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("reference").get<std::string>() != "core")
    throw DomainError("mode_section_from_json: unknown coefficient reference");
  ModeSection s(j.at("power").get<int>());
  for (const auto& e : j.at("coeffs")) {
    if (!e.is_array() || e.size() != 3)
      throw DomainError("mode_section_from_json: coeff entries must be [k, re, im]");
    s.set(e[0].get<int>(), {e[1].get<double>(), e[2].get<double>()});
  }
  return s;
}

}  // namespace collar
