#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "collar/dbar.hpp"
#include "collar/mode_section.hpp"

namespace collar {

/// Cut-off generator of K^{m0}: u_1 = (1/sqrt(delta)) eta(|rho| - (R-1))
/// (dz)^{m0}, corrected to the holomorphic U' = u_1 - u by a minimal-norm
/// dbar solve.
struct CollarGeneratorResult {
  ModeSection u_prime{1};
  std::complex<double> alpha{0.0, 0.0};  // coefficient of u_1 in U' over C(R-2)
  double u_perp_norm = 0.0;              // u_1-orthogonal part of u over C(R-2)
  double u_l2_sq = 0.0;                  // ||u||^2 over the collar
  double u_norm_bound_ratio = 0.0;       // u_l2_sq / delta^{2 m0 - 1}
  double c0_share = 0.0;                 // |c_0| share of the coefficient mass
  double projection_residual = 0.0;
};

CollarGeneratorResult collar_generator(const Collar& c, int m0, const QuadratureSpec& q,
                                       int n_grid = (1 << 15) + 1);

/// Envelope check for sections with zero mean mode: fits
/// log ||U''||(rho) - log ||U''||_{L2} - m0 (R - |rho|)  ~  log C - eps6 e^{R-|rho|}
/// by least squares over |rho| <= R - 3 (sides folded by max), and the
/// gradient analogue with exponent (m0 + 1)(R - |rho|).
struct DecayCheckResult {
  double eps6_hat = 0.0;
  double sup_ratio = 0.0;  // worst data/envelope ratio against the fitted line
  double log_c_fit = 0.0;
  double grad_eps6_hat = 0.0;
  double grad_sup_ratio = 0.0;
};

DecayCheckResult orthogonal_decay_check(const ModeSection& u_pp, const Collar& c, int m0,
                                        const QuadratureSpec& q, int n_rho = 241);

/// Smallest r >= 2 with a certified positive lower bound for ||U'|| on
/// |rho| <= R - r (dominant k = 0 term minus a rigorous tail bound).
struct NonvanishingResult {
  double r = 0.0;
  double margin = 0.0;  // certified min of |f| on the region
  bool certified = false;
  std::string diagnostic;
};

NonvanishingResult nonvanishing_radius(const ModeSection& u_prime, const Collar& c,
                                       const QuadratureSpec& q);

/// Generator family: the collar generator plus single modes w^k (dz)^{m0},
/// later members corrected to be u_1-orthogonal over C(R-2) and everything
/// normalized to unit L^2 norm. The orthonormalizer M satisfies M G M* = I.
struct GeneratorFamily {
  int m0 = 0;
  std::vector<ModeSection> members;
  Eigen::MatrixXcd gram;
  Eigen::MatrixXcd orthonormalizer;
  double least_eigenvalue = 0.0;
};

GeneratorFamily build_family(const Collar& c, int m0, const std::vector<int>& extra_modes,
                             const QuadratureSpec& q);

struct CoronaConfig {
  int n_fine = 1 << 18;    // marching grid for the dbar solves
  int n_report = 4097;     // evaluation grid for residual checks
  double denom_floor = 1e-10;
  double residual_ceiling = 1e-6;
  double norm_ceiling = 100.0;
};

struct CoronaReport {
  int generators = 0;
  int m = 0;
  int m0 = 0;
  double residual_sup = 0.0;  // sup ||S - sum T_i U_i|| / sup ||S||
  double residual_l2 = 0.0;
  std::vector<double> dbar_residuals;  // holomorphic-projection residual per T_i
  struct Norms {
    double sup = 0.0;
    double l2 = 0.0;
  };
  std::vector<Norms> norms;  // of T_i U_i
  double s_sup = 0.0;
  double s_l2 = 0.0;
  bool pass = false;
};

/// Wolff-style decomposition S = sum_i T_i U_i over the family, with
/// smooth first guesses b_k, mode-wise dbar solves for the corrections and
/// holomorphic projection of the assembled T_i.
std::pair<std::vector<ModeSection>, CoronaReport> corona_decompose(const ModeSection& S,
                                                                   const GeneratorFamily& family,
                                                                   const Collar& c,
                                                                   const QuadratureSpec& q,
                                                                   const CoronaConfig& cfg = {});

std::string to_json(const CoronaReport& rep);

}  // namespace collar
