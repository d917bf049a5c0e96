#include "collar/corona.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "collar/errors.hpp"

namespace collar {

using cd = std::complex<double>;

namespace {

double log_sum(double a, double b) {
  if (std::isinf(a) && a < 0) return b;
  if (std::isinf(b) && b < 0) return a;
  if (b > a) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Restricted integral of k = 0 samples against cos^{2m-2} over |y| <= y_cut.
cd restricted_integral(const std::vector<cd>& v, const YGrid& g, double y_cut, int m,
                       double delta) {
  int i0 = 0, i1 = g.n - 1;
  while (i0 < g.n && g.y(i0) < -y_cut) ++i0;
  while (i1 >= 0 && g.y(i1) > y_cut) --i1;
  const int n = i1 - i0 + 1;
  if (n < 2) return {0.0, 0.0};
  const auto w = composite_simpson_weights(n, g.h());
  cd s(0.0, 0.0);
  for (int i = 0; i < n; ++i)
    s += w[i] * v[i0 + i] * std::pow(std::cos(g.y(i0 + i)), 2.0 * m - 2.0);
  return s * delta;
}

double restricted_sq_norm(const std::vector<cd>& v, const YGrid& g, double y_cut, int m,
                          double delta) {
  int i0 = 0, i1 = g.n - 1;
  while (i0 < g.n && g.y(i0) < -y_cut) ++i0;
  while (i1 >= 0 && g.y(i1) > y_cut) --i1;
  const int n = i1 - i0 + 1;
  if (n < 2) return 0.0;
  const auto w = composite_simpson_weights(n, g.h());
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    s += w[i] * std::norm(v[i0 + i]) * std::pow(std::cos(g.y(i0 + i)), 2.0 * m - 2.0);
  return s * delta;
}

}  // namespace

CollarGeneratorResult collar_generator(const Collar& c, int m0, const QuadratureSpec& q,
                                       int n_grid) {
  if (m0 < 1) throw DomainError("collar_generator: m0 must be >= 1");
  if (!(c.half_width > 4.0)) throw DomainError("collar_generator: requires R > 4");
  const double R = c.half_width;
  const double yR = y_range(c);
  const double inv_sqrt_delta = 1.0 / std::sqrt(c.delta);
  YGrid grid{-yR, yR, n_grid};

  auto eta_tilde = [&](double y) {
    return detail::eta_ext(std::abs(rho_of_y(y)) - (R - 1.0));
  };
  auto deta_tilde_dy = [&](double y) {
    const double rho = rho_of_y(y);
    const double t = std::abs(rho) - (R - 1.0);
    const double sgn = rho >= 0.0 ? 1.0 : -1.0;
    return std::cosh(rho) * sgn * detail::eta_ext_d1(t);
  };

  DbarRhs rhs;
  rhs.power = m0;
  rhs.grid = grid;
  auto& v0 = rhs.modes[0];
  v0.resize(grid.n);
  for (int i = 0; i < grid.n; ++i)
    v0[i] = cd(0.0, 0.5) * inv_sqrt_delta * deta_tilde_dy(grid.y(i));

  const DbarSolution sol = solve_dbar(rhs, c, ZeroWeight{}, q);
  const auto& u = sol.modes.at(0);

  std::vector<cd> uprime(grid.n);
  for (int i = 0; i < grid.n; ++i) uprime[i] = inv_sqrt_delta * eta_tilde(grid.y(i)) - u[i];

  // Holomorphic coefficient (kappa = 0 mode) and projection residual.
  const cd num = restricted_integral(uprime, grid, yR, m0, c.delta);
  const double den =
      std::exp(std::log(c.delta) +
               log_mode_weight_integral(c, 0, m0, -R, R, q));
  const cd c0 = num / den;
  CollarGeneratorResult out;
  out.u_prime = ModeSection(m0);
  out.u_prime.set(0, c0);
  {
    std::vector<cd> diff(grid.n);
    for (int i = 0; i < grid.n; ++i) diff[i] = uprime[i] - c0;
    const double dn = restricted_sq_norm(diff, grid, yR, m0, c.delta);
    const double un = restricted_sq_norm(uprime, grid, yR, m0, c.delta);
    out.projection_residual = un > 0.0 ? std::sqrt(dn / un) : 0.0;
  }
  out.c0_share = 1.0;  // single retained mode by construction

  // Split over C(R-2), where u_1 = (1/sqrt(delta)) (dz)^{m0} exactly.
  const double y2 = y_of_rho(R - 2.0);
  std::vector<cd> ones(grid.n, cd(1.0, 0.0));
  const double i_cos = restricted_integral(ones, grid, y2, m0, c.delta).real();
  const double u1_sq = inv_sqrt_delta * inv_sqrt_delta * i_cos;
  out.alpha = restricted_integral(uprime, grid, y2, m0, c.delta) * inv_sqrt_delta / u1_sq;
  const cd alpha_u = restricted_integral(u, grid, y2, m0, c.delta) * inv_sqrt_delta / u1_sq;
  const double u_sq_r2 = restricted_sq_norm(u, grid, y2, m0, c.delta);
  out.u_perp_norm = std::sqrt(std::max(0.0, u_sq_r2 - std::norm(alpha_u) * u1_sq));
  out.u_l2_sq = restricted_sq_norm(u, grid, yR, m0, c.delta);
  out.u_norm_bound_ratio = out.u_l2_sq / std::pow(c.delta, 2.0 * m0 - 1.0);
  return out;
}

DecayCheckResult orthogonal_decay_check(const ModeSection& u_pp, const Collar& c, int m0,
                                        const QuadratureSpec& q, int n_rho) {
  if (u_pp.power() != m0)
    throw PowerMismatchError("orthogonal_decay_check: section power must equal m0");
  if (u_pp.has(0))
    throw DomainError("orthogonal_decay_check: mean mode c_0 must vanish, got |c_0| = " +
                      std::to_string(std::exp(u_pp.coeff_log(0).log_mod)));
  if (u_pp.empty()) throw DomainError("orthogonal_decay_check: empty section");
  const double R = c.half_width;
  const double log_l2 = 0.5 * log_sq_norm_l2(u_pp, c, q);

  // Fold the two sides: data(s) = log sup_theta ||U''|| at |rho| = R - s.
  std::vector<double> X(n_rho), Z(n_rho), ZG(n_rho);
  for (int j = 0; j < n_rho; ++j) {
    const double rho = (R - 3.0) * j / (n_rho - 1);
    double side[2], side_g[2];
    for (int s = 0; s < 2; ++s) {
      const double r = s == 0 ? rho : -rho;
      const double lw = log_abs_w(c, r);
      const double tan_y = std::sinh(r);
      double acc = kNegInf, acc_g = kNegInf;
      for (const auto& [k, a] : u_pp.coeffs()) {
        const double term = a.value.log_mod + k * lw;
        acc = log_sum(acc, term);
        const double kappa = 2.0 * kPi * k / c.delta;
        acc_g = log_sum(acc_g, term + std::log(std::abs(kappa + m0 * tan_y)));
      }
      const double log_sech = -std::log(std::cosh(r));
      side[s] = acc + m0 * log_sech;
      side_g[s] = acc_g + (m0 + 1) * log_sech;
    }
    const double s_coord = R - rho;
    X[j] = std::exp(s_coord);
    Z[j] = std::max(side[0], side[1]) - log_l2 - m0 * s_coord;
    ZG[j] = std::max(side_g[0], side_g[1]) - log_l2 - (m0 + 1) * s_coord;
  }

  auto fit = [&](const std::vector<double>& z, double* c_fit, double* slope) {
    double sx = 0, sz = 0, sxx = 0, sxz = 0;
    for (int j = 0; j < n_rho; ++j) {
      sx += X[j];
      sz += z[j];
      sxx += X[j] * X[j];
      sxz += X[j] * z[j];
    }
    const double n = n_rho;
    const double det = n * sxx - sx * sx;
    *slope = -(n * sxz - sx * sz) / det;         // z ~ c - slope * X
    *c_fit = (sz + *slope * sx) / n;
  };
  DecayCheckResult out;
  fit(Z, &out.log_c_fit, &out.eps6_hat);
  double gc;
  fit(ZG, &gc, &out.grad_eps6_hat);
  double worst = kNegInf, worst_g = kNegInf;
  for (int j = 0; j < n_rho; ++j) {
    worst = std::max(worst, Z[j] - (out.log_c_fit - out.eps6_hat * X[j]));
    worst_g = std::max(worst_g, ZG[j] - (gc - out.grad_eps6_hat * X[j]));
  }
  out.sup_ratio = std::exp(worst);
  out.grad_sup_ratio = std::exp(worst_g);
  return out;
}

NonvanishingResult nonvanishing_radius(const ModeSection& u_prime, const Collar& c,
                                       const QuadratureSpec& q) {
  (void)q;
  NonvanishingResult out;
  const double R = c.half_width;
  const LogComplex c0 = u_prime.coeff_log(0);
  if (c0.is_zero()) {
    out.r = R;
    out.diagnostic = "no mean mode: the dominant-term bound is empty";
    return out;
  }
  const int m0 = u_prime.power();
  for (double r = 2.0; r < R - 0.25; r += 0.25) {
    double log_tail = kNegInf;
    for (const auto& [k, a] : u_prime.coeffs()) {
      if (k == 0) continue;
      log_tail = log_sum(log_tail,
                         a.value.log_mod + std::abs(k) * (2.0 * kPi / c.delta) * y_of_rho(R - r));
    }
    if (log_tail < c0.log_mod) {
      out.r = r;
      const double lm = c0.log_mod + std::log1p(-std::exp(log_tail - c0.log_mod)) -
                        m0 * std::log(std::cosh(R - r));
      out.margin = std::exp(std::min(lm, kMaxExp));
      out.certified = true;
      return out;
    }
  }
  out.r = R;
  out.diagnostic = "tail bound never drops below |c_0|; no certified region";
  return out;
}

GeneratorFamily build_family(const Collar& c, int m0, const std::vector<int>& extra_modes,
                             const QuadratureSpec& q) {
  for (size_t i = 0; i < extra_modes.size(); ++i) {
    if (extra_modes[i] == 0) throw DomainError("build_family: extra modes must be nonzero");
    if (std::abs(extra_modes[i]) > c.k_max)
      throw DomainError("build_family: extra mode beyond k_max");
    for (size_t j = i + 1; j < extra_modes.size(); ++j)
      if (extra_modes[i] == extra_modes[j])
        throw DomainError("build_family: extra modes must be distinct");
  }
  GeneratorFamily fam;
  fam.m0 = m0;
  const auto gen = collar_generator(c, m0, q);
  auto normalize = [&](const ModeSection& s) {
    const double log_n = 0.5 * log_sq_norm_l2(s, c, q);
    return s.scaled_log(LogComplex::from_polar_log(-log_n, 0.0));
  };
  fam.members.push_back(normalize(gen.u_prime));

  // v_1 restricted to C(R-2) is a pure mean mode; corrections per the Gram
  // recipe make later members v_1-orthogonal there.
  ModeSection v1(m0);
  v1.set(0, 1.0 / std::sqrt(c.delta));
  const double r2 = c.half_width - 2.0;
  const LogComplex den = l2_inner_log(fam.members[0], v1, c, -r2, r2, q);
  for (int k : extra_modes) {
    ModeSection raw(m0);
    raw.set(k, 1.0);
    const LogComplex gamma = l2_inner_log(raw, v1, c, -r2, r2, q) / den;
    ModeSection corrected = raw - fam.members[0].scaled_log(gamma);
    fam.members.push_back(normalize(corrected));
  }

  const int d = static_cast<int>(fam.members.size());
  fam.gram.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      fam.gram(i, j) =
          l2_inner_log(fam.members[i], fam.members[j], c, -c.half_width, c.half_width, q)
              .to_complex_checked();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(fam.gram);
  fam.least_eigenvalue = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(fam.least_eigenvalue > 0.0) || lmax / fam.least_eigenvalue > 1e12)
    throw ConditioningError("build_family: Gram matrix too ill-conditioned",
                            fam.least_eigenvalue > 0.0 ? lmax / fam.least_eigenvalue
                                                       : std::numeric_limits<double>::infinity());
  Eigen::LLT<Eigen::MatrixXcd> llt(fam.gram);
  fam.orthonormalizer =
      llt.matrixL().solve(Eigen::MatrixXcd::Identity(d, d));
  return fam;
}

namespace {

/// Linear accumulator at a fixed log offset; avoids a log/exp round trip
/// per added term when the term scale is known in advance.
struct OffsetAccumulator {
  double off = 0.0;
  cd sum{0.0, 0.0};
  void add(double log_w, cd v) {
    const double e = log_w - off;
    if (e < -700.0) return;
    sum += std::exp(e) * v;
  }
  LogComplex value() const {
    if (sum == cd(0.0, 0.0)) return LogComplex::zero();
    return LogComplex::from(sum) * LogComplex::from_polar_log(off, 0.0);
  }
};

struct FamilyView {
  int d = 0;
  std::vector<int> mode;        // single mode k_j of member j
  std::vector<LogComplex> amp;  // its amplitude
  std::vector<double> kappa;    // 2 pi k_j / delta

  double log_D(double y, double* dlog = nullptr) const {
    double acc = kNegInf;
    for (int j = 0; j < d; ++j) acc = log_sum(acc, 2.0 * amp[j].log_mod - 2.0 * kappa[j] * y);
    if (dlog) {
      double s = 0.0;
      for (int j = 0; j < d; ++j)
        s += -2.0 * kappa[j] * std::exp(2.0 * amp[j].log_mod - 2.0 * kappa[j] * y - acc);
      *dlog = s;
    }
    return acc;
  }
};

FamilyView make_view(const GeneratorFamily& fam, const Collar& c) {
  FamilyView fv;
  fv.d = static_cast<int>(fam.members.size());
  for (const auto& mem : fam.members) {
    if (mem.coeffs().size() != 1)
      throw DomainError("corona_decompose: family members must be single-mode sections");
    const auto& [k, a] = *mem.coeffs().begin();
    fv.mode.push_back(k);
    fv.amp.push_back(a.value);
    fv.kappa.push_back(2.0 * kPi * k / c.delta);
  }
  return fv;
}

}  // namespace

std::pair<std::vector<ModeSection>, CoronaReport> corona_decompose(const ModeSection& S,
                                                                   const GeneratorFamily& family,
                                                                   const Collar& c,
                                                                   const QuadratureSpec& q,
                                                                   const CoronaConfig& cfg) {
  const int m = S.power();
  const int m0 = family.m0;
  if (m <= 2 * m0)
    throw DomainError("corona_decompose: needs m > 2 m0 for the correction solves");
  const FamilyView fv = make_view(family, c);
  const int d = fv.d;
  const double R = c.half_width;
  const double yR = y_range(c);

  CoronaReport rep;
  rep.generators = d;
  rep.m = m;
  rep.m0 = m0;

  std::vector<ModeSection> T(d, ModeSection(m - m0));
  if (S.empty()) {
    rep.pass = true;
    rep.dbar_residuals.assign(d, 0.0);
    rep.norms.assign(d, {});
    return {T, rep};
  }

  // Denominator floor: min over the collar of sum_j ||U_j||^2.
  {
    const int nprobe = 4096;
    for (int i = 0; i <= nprobe; ++i) {
      const double y = -yR + 2.0 * yR * i / nprobe;
      const double qsec = fv.log_D(y) + 2.0 * m0 * std::log(std::cos(y));
      if (qsec < std::log(cfg.denom_floor))
        throw DecompositionError("corona_decompose: sum ||U_j||^2 fell below the floor",
                                 rho_of_y(y), 0.0);
    }
  }
  // The eta_1 S / U_0 division needs the generator certified nonvanishing.
  {
    const auto nv = nonvanishing_radius(family.members[0], c, q);
    if (!nv.certified || !(nv.margin > 0.0))
      throw DecompositionError("corona_decompose: generator nonvanishing not certified", R, 0.0);
  }

  // Fine marching grid; the report grid is a strided subset.
  const int nf = cfg.n_fine + 1;
  if ((cfg.n_fine % (cfg.n_report - 1)) != 0)
    throw DomainError("corona_decompose: n_report - 1 must divide n_fine");
  const int stride = cfg.n_fine / (cfg.n_report - 1);
  YGrid fine{-yR, yR, nf};
  YGrid report{-yR, yR, cfg.n_report};
  const double hf = fine.h();

  // Cached per-point scalars.
  std::vector<double> logD(nf), dlogD(nf), eta1(nf), deta1(nf), logcos(nf);
  for (int i = 0; i < nf; ++i) {
    const double y = fine.y(i);
    logD[i] = fv.log_D(y, &dlogD[i]);
    const double rho = rho_of_y(y);
    const double t = std::abs(rho) - (R - 1.0);
    eta1[i] = detail::eta_ext(t);
    deta1[i] = std::cosh(rho) * (rho >= 0.0 ? 1.0 : -1.0) * detail::eta_ext_d1(t);
    logcos[i] = std::log(std::cos(y));
  }

  // S mode data.
  std::vector<int> smode;
  std::vector<LogComplex> scoef;
  for (const auto& [n, a] : S.coeffs()) {
    smode.push_back(n);
    scoef.push_back(a.value);
  }
  const int ns = static_cast<int>(smode.size());
  auto kap = [&](int k) { return 2.0 * kPi * k / c.delta; };

  // b_j mode profile and its y-derivative at fine index i, for S mode n.
  // b_j = [j==0] eta1 S/U_0 + (1 - eta1) <S,U_j>/Q.
  auto b_piece = [&](int j, int n_idx, int i, cd* val, cd* dval) {
    const int n = smode[n_idx];
    const double y = fine.y(i);
    const double kn = kap(n);
    const LogComplex cn = scoef[n_idx];
    // (1 - eta1) c_n conj(u_j) e^{-(k_n + k_j) y} / D
    const double e2 = cn.log_mod + fv.amp[j].log_mod - (kn + fv.kappa[j]) * y - logD[i];
    const cd ph2 = std::polar(1.0, cn.phase - fv.amp[j].phase);
    const cd t2 = (e2 > -700.0 ? std::exp(e2) : 0.0) * ph2;
    cd v = (1.0 - eta1[i]) * t2;
    cd dv = -deta1[i] * t2 + (1.0 - eta1[i]) * t2 * (-(kn + fv.kappa[j]) - dlogD[i]);
    if (j == 0) {
      const double e1 = cn.log_mod - fv.amp[0].log_mod - (kn - fv.kappa[0]) * y;
      const cd ph1 = std::polar(1.0, cn.phase - (-fv.amp[0].phase));
      const cd t1 = (e1 > -700.0 && e1 < 700.0 ? std::exp(e1) : 0.0) * ph1;
      v += eta1[i] * t1;
      dv += deta1[i] * t1 + eta1[i] * t1 * (-(kn - fv.kappa[0]));
    }
    *val = v;
    *dval = dv;
  };

  // Report-grid accumulation of T_i per mode, plus projection integrals.
  // T_i modes are S modes shifted by -k_i.
  std::vector<std::map<int, std::vector<cd>>> t_grid(d);
  std::vector<std::map<int, OffsetAccumulator>> t_proj(d);
  const double wmeas = 2.0 * (m - m0) - 2.0;
  for (int i_gen = 0; i_gen < d; ++i_gen)
    for (int n_idx = 0; n_idx < ns; ++n_idx) {
      const int J = smode[n_idx] - fv.mode[i_gen];
      t_grid[i_gen][J].assign(cfg.n_report, cd(0.0, 0.0));
      OffsetAccumulator acc;
      // Offset estimate: scan the report grid for the max exponent of the
      // projection weight e^{-kappa_J y} cos^{wmeas} y.
      double off = kNegInf;
      for (int r = 0; r < cfg.n_report; ++r) {
        const double y = report.y(r);
        off = std::max(off, -kap(J) * y + wmeas * std::log(std::cos(y)));
      }
      acc.off = off + 5.0;
      t_proj[i_gen][J] = acc;
    }

  // Analytic b_i contributions.
  for (int i = 0; i < nf; ++i) {
    const double y = fine.y(i);
    const double sw = (i == 0 || i == nf - 1) ? hf / 3.0 : (i % 2 ? 4.0 * hf / 3.0 : 2.0 * hf / 3.0);
    for (int g = 0; g < d; ++g) {
      for (int n_idx = 0; n_idx < ns; ++n_idx) {
        cd v, dv;
        b_piece(g, n_idx, i, &v, &dv);
        if (v == cd(0.0, 0.0) && dv == cd(0.0, 0.0)) continue;
        const int J = smode[n_idx] - fv.mode[g];
        if (i % stride == 0) t_grid[g][J][i / stride] += v;
        t_proj[g][J].add(std::log(sw) - kap(J) * y + wmeas * logcos[i], v);
      }
    }
  }

  // Correction solves b_ab for ordered pairs a != b, marched mode by mode.
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      if (a == b) continue;
      for (int n_idx = 0; n_idx < ns; ++n_idx) {
        // dbar b_b lives in mode jt = n - k_b; c_ab in mode jp = jt - k_a.
        const int jt = smode[n_idx] - fv.mode[b];
        const int jp = jt - fv.mode[a];
        const double kjt = kap(jt);
        auto rhs_at = [&](int i, double) -> cd {
          cd v, dv;
          b_piece(b, n_idx, i, &v, &dv);
          const cd dbar_b = cd(0.0, 0.5) * (dv + kjt * v);
          const double e = fv.amp[a].log_mod - fv.kappa[a] * fine.y(i) - logD[i];
          const cd c_ab = dbar_b * (e > -700.0 ? std::exp(e) : 0.0) *
                          std::polar(1.0, -fv.amp[a].phase);
          return -2.0 * cd(0.0, 1.0) * c_ab;
        };
        const auto g_sol = march_particular(kap(jp), fine, rhs_at);
        // +U_b into T_a (mode jp + k_b), -U_a into T_b (mode jp + k_a = jt).
        const int Ja = jp + fv.mode[b];
        const int Jb = jt;
        auto& grid_a = t_grid[a][Ja];
        auto& grid_b = t_grid[b][Jb];
        auto& proj_a = t_proj[a][Ja];
        auto& proj_b = t_proj[b][Jb];
        for (int i = 0; i < nf; ++i) {
          const double y = fine.y(i);
          const double sw =
              (i == 0 || i == nf - 1) ? hf / 3.0 : (i % 2 ? 4.0 * hf / 3.0 : 2.0 * hf / 3.0);
          const cd g = g_sol[i];
          if (g == cd(0.0, 0.0)) continue;
          const double eb = fv.amp[b].log_mod - fv.kappa[b] * y;
          const double ea = fv.amp[a].log_mod - fv.kappa[a] * y;
          const cd ub = (eb > -700.0 && eb < 700.0 ? std::exp(eb) : 0.0) *
                        std::polar(1.0, fv.amp[b].phase);
          const cd ua = (ea > -700.0 && ea < 700.0 ? std::exp(ea) : 0.0) *
                        std::polar(1.0, fv.amp[a].phase);
          if (i % stride == 0) {
            grid_a[i / stride] += g * ub;
            grid_b[i / stride] -= g * ua;
          }
          const double lsw = std::log(sw) + wmeas * logcos[i];
          proj_a.add(lsw - kap(Ja) * y, g * ub);
          proj_b.add(lsw - kap(Jb) * y, -g * ua);
        }
      }
    }
  }

  // Holomorphic projection: T_i coefficients and the projection residuals.
  rep.dbar_residuals.assign(d, 0.0);
  for (int g = 0; g < d; ++g) {
    for (auto& [J, acc] : t_proj[g]) {
      const double log_den =
          std::log(c.delta) + log_mode_weight_integral(c, J, m - m0, -R, R, q);
      const LogComplex coeff =
          (acc.value() * LogComplex::from_real(c.delta)) /
          LogComplex::from_polar_log(log_den, 0.0);
      T[g].set_log(J, coeff);
    }
    double worst = 0.0, scale = 0.0;
    for (int r = 0; r < cfg.n_report; ++r) {
      const double y = report.y(r);
      const double cospow = (m - m0) * std::log(1.0 / std::cos(y));
      double diff_sum = 0.0, fit_sum = 0.0;
      for (const auto& [J, samples] : t_grid[g]) {
        const LogComplex fit_log =
            T[g].coeff_log(J) * LogComplex::from_polar_log(-kap(J) * y, 0.0);
        const cd fit = fit_log.to_complex();
        diff_sum += std::abs(samples[r] - fit);
        fit_sum += std::abs(fit);
      }
      worst = std::max(worst, diff_sum * std::exp(-cospow));
      scale = std::max(scale, fit_sum * std::exp(-cospow));
    }
    rep.dbar_residuals[g] = scale > 0.0 ? worst / scale : 0.0;
  }

  // Reconstruction residual and norms.
  ModeSection recon(m);
  for (int g = 0; g < d; ++g) recon = recon + T[g] * family.members[g];
  const ModeSection resid = S - recon;

  auto sup_bound = [&](const ModeSection& sec) {
    double best = kNegInf;
    for (int r = 0; r < cfg.n_report; ++r) {
      const double y = report.y(r);
      const double lw = -2.0 * kPi / c.delta * y;
      double acc = kNegInf;
      for (const auto& [k, a] : sec.coeffs()) acc = log_sum(acc, a.value.log_mod + k * lw);
      best = std::max(best, acc + sec.power() * std::log(std::cos(y)));
    }
    return best;  // log of the theta-sum upper bound, maxed over the grid
  };
  auto sup_eval = [&](const ModeSection& sec) {
    double best = kNegInf;
    for (int r = 0; r < cfg.n_report; ++r) {
      const double rho = rho_of_y(report.y(r));
      for (int t = 0; t < 16; ++t) {
        const CollarPoint p{rho, c.delta * t / 16.0};
        best = std::max(best, 0.5 * log_pointwise_sq_norm(sec, c, p));
      }
    }
    return best;
  };
  const double log_s_sup = sup_eval(S);
  rep.s_sup = std::exp(std::min(log_s_sup, kMaxExp));
  rep.s_l2 = std::exp(std::min(0.5 * log_sq_norm_l2(S, c, q), kMaxExp));
  rep.residual_sup = resid.empty() ? 0.0 : std::exp(sup_bound(resid) - log_s_sup);
  rep.residual_l2 =
      resid.empty() ? 0.0
                    : std::exp(0.5 * log_sq_norm_l2(resid, c, q) - std::log(rep.s_l2));

  bool norms_ok = true;
  for (int g = 0; g < d; ++g) {
    const ModeSection tu = T[g] * family.members[g];
    CoronaReport::Norms nn;
    nn.sup = tu.empty() ? 0.0 : std::exp(std::min(sup_bound(tu), kMaxExp));
    nn.l2 = tu.empty() ? 0.0 : std::exp(std::min(0.5 * log_sq_norm_l2(tu, c, q), kMaxExp));
    norms_ok = norms_ok && std::isfinite(nn.sup) && std::isfinite(nn.l2) &&
               nn.sup <= cfg.norm_ceiling * rep.s_sup && nn.l2 <= cfg.norm_ceiling * rep.s_l2;
    rep.norms.push_back(nn);
  }
  bool dbar_ok = true;
  for (double v : rep.dbar_residuals) dbar_ok = dbar_ok && v <= cfg.residual_ceiling;
  rep.pass = rep.residual_sup <= cfg.residual_ceiling && rep.residual_l2 <= cfg.residual_ceiling &&
             dbar_ok && norms_ok;
  return {T, rep};
}

std::string to_json(const CoronaReport& rep) {
  nlohmann::ordered_json j;
  j["generators"] = rep.generators;
  j["m"] = rep.m;
  j["m0"] = rep.m0;
  j["residual_sup"] = rep.residual_sup;
  j["residual_l2"] = rep.residual_l2;
  j["dbar_residuals"] = rep.dbar_residuals;
  auto norms = nlohmann::ordered_json::array();
  for (const auto& n : rep.norms) norms.push_back({{"sup", n.sup}, {"l2", n.l2}});
  j["norms"] = norms;
  j["pass"] = rep.pass;
  return j.dump();
}

}  // namespace collar
