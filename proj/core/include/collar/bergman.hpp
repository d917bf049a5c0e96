#pragma once

#include <string>
#include <vector>

#include "collar/mode_section.hpp"

namespace collar {

/// Squared L^2(C) norm of the single mode w^k (dz)^m:
/// N_k = delta int_{-R}^{R} |w|^{2k} cosh^{1-2m} rho d rho, as a log.
double log_mode_sq_norm(const Collar& c, int k, int m, const QuadratureSpec& q);

/// N_k in linear scale; overflow of the exponent is an error.
double mode_sq_norm(const Collar& c, int k, int m, const QuadratureSpec& q);

/// Sum over |k| <= k_max of |w(p)|^{2k} cosh^{-2m} rho / N_k: the density of
/// the truncated orthonormal mode basis at p. Theta-independent.
double density(const Collar& c, int m, const CollarPoint& p, const QuadratureSpec& q);

/// Same evaluation but also reporting the largest single-mode share.
struct DensityValue {
  double value = 0.0;
  double dominant_mode_share = 0.0;
  int dominant_mode = 0;
};
DensityValue density_with_share(const Collar& c, int m, const CollarPoint& p,
                                const QuadratureSpec& q);

/// The three pairwise-orthogonal boundary sections S_i = g_i (dz)^m built
/// from boundary data A (supported on k >= 1) and B (supported on k <= 0).
struct CounterexampleSections {
  ModeSection s1;
  ModeSection s2;
  ModeSection s3;
};
CounterexampleSections counterexample_sections(const Collar& c, int m,
                                               const std::map<int, std::complex<double>>& A,
                                               const std::map<int, std::complex<double>>& B);

/// Defaults A = {1: 1}, B = {0: 1, -1: 1}.
CounterexampleSections counterexample_sections(const Collar& c, int m);

/// Ratios ||S_i||^2(x0) / ||S_i||^2_{L^2(C)} at the point x0 = (rho0, 0)
/// with delta cosh^2 rho0 = eps1, against the predicted rate for S_2.
struct CounterexampleReport {
  double delta = 0.0;
  int m = 0;
  double rho0 = 0.0;
  double mu1 = 0.0;  // int_{-R}^{R} cosh^{1-2m}
  double ratio1 = 0.0;
  double ratio2 = 0.0;
  double ratio3 = 0.0;
  double predicted_ratio2 = 0.0;  // delta^{m-1} / (mu1 eps1^m)
};
CounterexampleReport counterexample_report(const Collar& c, int m, const QuadratureSpec& q);

/// sqrt(m) / (D (1 + e^{pi/delta_x} / (sqrt(m) delta_x^2))), in log form;
/// computed in log space so tiny delta_x cannot overflow.
double log_partial_estimate_profile(int m, double delta_x, double D);
double partial_estimate_profile(int m, double delta_x, double D);

/// One scan row per requested core length; per-delta errors are recorded in
/// the report and the scan continues.
struct DensityReport {
  double delta = 0.0;
  int m = 0;
  int k_max = 0;
  struct Row {
    double rho = 0.0;
    double density = 0.0;
    double dominant_mode_share = 0.0;
  };
  std::vector<Row> rows;
  double rho0 = 0.0;
  double at_x0 = 0.0;
  double ratio1 = 0.0;
  double ratio2 = 0.0;
  double ratio3 = 0.0;
  double predicted_ratio2 = 0.0;
  std::string error;  // empty on success
};

std::vector<DensityReport> density_scan(const std::vector<double>& deltas, int m, int k_max,
                                        const QuadratureSpec& q, int profile_rows = 25);

}  // namespace collar
