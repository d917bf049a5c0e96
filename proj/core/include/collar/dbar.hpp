#pragma once

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "collar/mode_section.hpp"
#include "collar/weights.hpp"

namespace collar {

/// Uniform sample grid in the flat coordinate y.
struct YGrid {
  double y_lo = 0.0;
  double y_hi = 0.0;
  int n = 0;  // sample points; n >= 16
  double h() const { return (y_hi - y_lo) / (n - 1); }
  double y(int i) const { return y_lo + i * h(); }
  bool operator==(const YGrid&) const = default;
};

using ModeSamples = std::map<int, std::vector<std::complex<double>>>;

/// Per-mode sampled right-hand sides v_k of dbar u = v (coefficient of
/// e^{i k tau} dzbar (dz)^m).
struct DbarRhs {
  int power = 1;
  YGrid grid;
  ModeSamples modes;
  bool supported(int k) const { return modes.count(k) != 0; }
};

struct DbarSolution {
  int power = 1;
  YGrid grid;
  ModeSamples modes;
  double weighted_sq_norm = 0.0;
  double rhs_weighted_sq_norm = 0.0;
  double gram_condition = 1.0;
};

/// Discrete dbar of per-mode section samples g_k in the z = theta + i y
/// chart: v_k = (i/2)(g_k' + (2 pi k / delta) g_k), central differences
/// inside, second-order one-sided at the ends.
DbarRhs apply_dbar(const ModeSamples& sections, const YGrid& grid, const Collar& c, int m);

struct SolveOptions {
  int n_theta = 256;         // theta quadrature for theta-dependent weights
  double cond_limit = 1e12;  // Gram condition ceiling
  int projection_band = -1;  // modes |j| <= band retained; -1 means collar k_max
};

/// Minimal weighted-norm solve: per-mode integrating-factor particular
/// solution marched in the damped direction, then subtraction of the
/// weighted-L2-orthogonal projection onto the retained holomorphic modes
/// (full dense Gram system when the weight couples modes through theta).
DbarSolution solve_dbar(const DbarRhs& rhs, const Collar& c, const WeightSpec& w,
                        const QuadratureSpec& q, const SolveOptions& opt = {});

/// Weighted inner product of two mode-sample fields of K^m-valued sections
/// over the grid, int <a,b> e^{-phi} dV.
std::complex<double> weighted_field_inner(const ModeSamples& a, const ModeSamples& b,
                                          const YGrid& grid, const Collar& c, const WeightSpec& w,
                                          int m, int n_theta = 256);

/// Worst relative weighted inner product of the solution against the
/// retained holomorphic modes.
double kernel_orthogonality(const DbarSolution& sol, const Collar& c, const WeightSpec& w,
                            const SolveOptions& opt = {});

struct HormanderCertificate {
  double ratio = 0.0;  // weighted ||u||^2 / weighted ||u_1||^2
  double bound = 0.0;  // tolerance_factor / (m - 1)
  bool ok = true;
};
HormanderCertificate hormander_ratio(const DbarSolution& sol, const WeightSpec& w,
                                     const Collar& c, int m, double tolerance_factor = 2.0);

/// Stable particular solution of g' + kappa g = f on the grid; marches in
/// the damped direction with an exponentially fitted quadratic rule,
/// g = 0 at the marching start. f_at(i, y_i) supplies samples on demand.
std::vector<std::complex<double>> march_particular(
    double kappa, const YGrid& grid,
    const std::function<std::complex<double>(int, double)>& f_at);

// ---------------------------------------------------------------------------
// Peak sections

struct PeakConfig {
  int m0_gate = 16;   // smallest power accepted by the full pipeline
  int n_y = 16385;
  int n_theta = 512;
  int mode_band = 32;
  double tolerance_factor = 2.0;
  bool sqrt_m_scaled_cutoff = true;  // cutoff support delta_x0 / (2 sqrt m)
};

/// The data u_1 = dbar(eta) F for the frame F = e^{m c1 (z - z0)} (dz)^m,
/// c1 = -i tan y0, together with the mode samples of eta F and the weight
/// the pipeline solves against.
struct PeakRhs {
  DbarRhs rhs;
  ModeSamples eta_f;
  double rho0 = 0.0;  // reflected to [0, R)
  double y0 = 0.0;
  std::complex<double> c1{0.0, 0.0};
  double delta_x0 = 0.0;
  double cut_radius = 0.0;
  WeightSpec weight;
  double eta_f_l2_sq = 0.0;
};

PeakRhs build_peak_rhs(const Collar& c, int m, double rho0, const PeakConfig& cfg = {});

struct PeakReport {
  double rho0 = 0.0;
  double delta_x0 = 0.0;
  double cut_radius = 0.0;
  double log_s_x0 = 0.0;
  double log_s_l2 = 0.0;
  double log_achieved = 0.0;
  double achieved_ratio = 0.0;
  double fitted_log_D = 0.0;  // log of the smallest D with profile <= achieved
  double log_profile_at_D100 = 0.0;
  bool profile_ok_at_D100 = false;
  double u_x0_over_s_x0 = 0.0;
  bool u_small_ok = false;
  double frame_grad_check = 0.0;
  double eta_f_l2_sq = 0.0;
  double hormander_ratio = 0.0;
  double hormander_bound = 0.0;
  bool hormander_ok = false;
  double projection_residual = 0.0;
  double gram_condition = 1.0;
};

/// Full pipeline: S = eta F - u with u the minimal weighted-norm solution of
/// dbar u = dbar(eta F) against the singular weight at x0 = (rho0, 0).
/// Profile violations are report flags, not exceptions.
std::pair<ModeSection, PeakReport> peak_section(const Collar& c, int m, double rho0,
                                                const QuadratureSpec& q,
                                                const PeakConfig& cfg = {});

/// JSON exchange for solutions: grid spec and per-mode sample arrays with
/// the norms embedded.
std::string to_json(const DbarSolution& sol);
DbarSolution dbar_solution_from_json(const std::string& text);

}  // namespace collar
