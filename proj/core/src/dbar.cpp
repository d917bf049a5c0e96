#include "collar/dbar.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "collar/bergman.hpp"
#include "collar/errors.hpp"

namespace collar {

using cd = std::complex<double>;

namespace {

void check_grid(const YGrid& g) {
  if (g.n < 16) throw DomainError("YGrid: need at least 16 sample points");
  if (!(g.y_lo < g.y_hi)) throw DomainError("YGrid: empty range");
}

std::vector<double> quad_weights(int n, double h) { return composite_simpson_weights(n, h); }

/// Exponential moments W_p = int_0^h u^p e^{-kappa (h-u)} du for kappa >= 0.
struct ExpMoments {
  double w0, w1, w2;
};

ExpMoments exp_moments(double kappa, double h) {
  const double x = kappa * h;
  ExpMoments m{};
  if (x < 0.5) {
    // W_p = h^{p+1} e^{-x} sum_n x^n / (n! (p+n+1))
    const double ex = std::exp(-x);
    for (int p = 0; p <= 2; ++p) {
      double term = 1.0 / (p + 1);
      double sum = term;
      double xn = 1.0;
      for (int nn = 1; nn < 30; ++nn) {
        xn *= x / nn;
        const double t = xn / (p + nn + 1);
        sum += t;
        if (t < 1e-18 * sum) break;
      }
      const double hp = std::pow(h, p + 1);
      (p == 0 ? m.w0 : p == 1 ? m.w1 : m.w2) = hp * ex * sum;
    }
    return m;
  }
  const double e = std::exp(-x);
  m.w0 = (1.0 - e) / kappa;
  m.w1 = (h - m.w0) / kappa;
  m.w2 = (h * h - 2.0 * m.w1) / kappa;
  return m;
}

std::vector<cd> march_up(double kappa, const YGrid& grid,
                         const std::function<cd(int, double)>& f_at) {
  const int n = grid.n;
  const double h = grid.h();
  const ExpMoments mom = exp_moments(kappa, h);
  const double damp = std::exp(-kappa * h);
  std::vector<cd> g(n, cd(0.0, 0.0));
  std::vector<cd> f(n);
  for (int i = 0; i < n; ++i) f[i] = f_at(i, grid.y(i));
  for (int i = 0; i + 1 < n; ++i) {
    cd a0, a1, a2;
    if (i == 0) {
      a0 = f[0];
      a1 = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
      a2 = (f[0] - 2.0 * f[1] + f[2]) / (2.0 * h * h);
    } else {
      a0 = f[i];
      a1 = (f[i + 1] - f[i - 1]) / (2.0 * h);
      a2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (2.0 * h * h);
    }
    g[i + 1] = damp * g[i] + a0 * mom.w0 + a1 * mom.w1 + a2 * mom.w2;
  }
  return g;
}

/// Fourier table of the weight: W_j(y_i) = int_0^delta e^{i j tau} e^{-phi}
/// d theta, stored for j in [0, max_j]; W_{-j} = conj(W_j).
struct WeightTable {
  bool zero = true;
  double delta = 0.0;
  int max_j = 0;
  std::vector<std::vector<cd>> rows;  // rows[j][i]

  cd get(int j, int i) const {
    if (zero) return j == 0 ? cd(delta, 0.0) : cd(0.0, 0.0);
    const int a = std::abs(j);
    if (a > max_j) return cd(0.0, 0.0);
    const cd v = rows[a][i];
    return j >= 0 ? v : std::conj(v);
  }
};

WeightTable build_weight_table(const YGrid& grid, const Collar& c, const WeightSpec& w,
                               int n_theta, int max_j) {
  WeightTable t;
  t.delta = c.delta;
  if (std::holds_alternative<ZeroWeight>(w)) return t;
  t.zero = false;
  t.max_j = max_j;
  t.rows.assign(max_j + 1, std::vector<cd>(grid.n, cd(0.0, 0.0)));
  std::vector<double> expphi(n_theta);
  for (int i = 0; i < grid.n; ++i) {
    const double rho = rho_of_y(grid.y(i));
    for (int s = 0; s < n_theta; ++s) {
      const double theta = c.delta * (s + 0.5) / n_theta;
      double phi;
      try {
        phi = evaluate_weight(c, w, {rho, theta});
      } catch (const SingularityError&) {
        phi = evaluate_weight(c, w, {rho, theta + 1e-7 * c.delta});
      }
      expphi[s] = std::exp(-phi);
    }
    for (int j = 0; j <= max_j; ++j) {
      const cd rot = std::polar(1.0, 2.0 * kPi * j / n_theta);
      cd ph = std::polar(1.0, 2.0 * kPi * j * 0.5 / n_theta);
      cd acc(0.0, 0.0);
      for (int s = 0; s < n_theta; ++s) {
        acc += expphi[s] * ph;
        ph *= rot;
      }
      t.rows[j][i] = acc * (c.delta / n_theta);
    }
  }
  return t;
}

double log_sum(double a, double b) {
  if (std::isinf(a) && a < 0) return b;
  if (std::isinf(b) && b < 0) return a;
  if (b > a) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

std::vector<cd> march_particular(double kappa, const YGrid& grid,
                                 const std::function<cd(int, double)>& f_at) {
  check_grid(grid);
  if (kappa >= 0.0) return march_up(kappa, grid, f_at);
  const int n = grid.n;
  YGrid mirrored{-grid.y_hi, -grid.y_lo, n};
  auto f_ref = [&](int i, double) { return -f_at(n - 1 - i, grid.y(n - 1 - i)); };
  auto g = march_up(-kappa, mirrored, f_ref);
  std::reverse(g.begin(), g.end());
  return g;
}

DbarRhs apply_dbar(const ModeSamples& sections, const YGrid& grid, const Collar& c, int m) {
  check_grid(grid);
  DbarRhs rhs;
  rhs.power = m;
  rhs.grid = grid;
  const int n = grid.n;
  const double h = grid.h();
  for (const auto& [k, g] : sections) {
    if (static_cast<int>(g.size()) != n)
      throw GridMismatchError("apply_dbar: sample vector size does not match grid");
    const double kappa = 2.0 * kPi * k / c.delta;
    std::vector<cd> v(n);
    for (int i = 0; i < n; ++i) {
      cd d;
      if (i == 0)
        d = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h);
      else if (i == n - 1)
        d = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * h);
      else
        d = (g[i + 1] - g[i - 1]) / (2.0 * h);
      v[i] = cd(0.0, 0.5) * (d + kappa * g[i]);
    }
    rhs.modes[k] = std::move(v);
  }
  return rhs;
}

std::complex<double> weighted_field_inner(const ModeSamples& a, const ModeSamples& b,
                                          const YGrid& grid, const Collar& c, const WeightSpec& w,
                                          int m, int n_theta) {
  check_grid(grid);
  const int n = grid.n;
  const auto sw = quad_weights(n, grid.h());
  std::vector<double> meas(n);
  for (int i = 0; i < n; ++i)
    meas[i] = sw[i] * std::pow(std::cos(grid.y(i)), 2.0 * m - 2.0);
  if (std::holds_alternative<ZeroWeight>(w)) {
    cd total(0.0, 0.0);
    for (const auto& [k, ak] : a) {
      auto it = b.find(k);
      if (it == b.end()) continue;
      cd s(0.0, 0.0);
      for (int i = 0; i < n; ++i) s += meas[i] * ak[i] * std::conj(it->second[i]);
      total += s * c.delta;
    }
    return total;
  }
  int max_j = 0;
  for (const auto& [k, v] : a)
    for (const auto& [l, u] : b) max_j = std::max(max_j, std::abs(k - l));
  const auto table = build_weight_table(grid, c, w, n_theta, max_j);
  cd total(0.0, 0.0);
  for (const auto& [k, ak] : a)
    for (const auto& [l, bl] : b) {
      cd s(0.0, 0.0);
      for (int i = 0; i < n; ++i)
        s += meas[i] * ak[i] * std::conj(bl[i]) * table.get(k - l, i);
      total += s;
    }
  return total;
}

DbarSolution solve_dbar(const DbarRhs& rhs, const Collar& c, const WeightSpec& w,
                        const QuadratureSpec& q, const SolveOptions& opt) {
  (void)q;
  check_grid(rhs.grid);
  const YGrid& grid = rhs.grid;
  const int n = grid.n;
  const int m = rhs.power;
  for (const auto& [k, v] : rhs.modes) {
    if (static_cast<int>(v.size()) != n)
      throw GridMismatchError("solve_dbar: rhs sample vector size does not match grid");
    for (const cd& z : v)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("solve_dbar: rhs samples must be finite");
  }
  const int band = opt.projection_band >= 0 ? opt.projection_band : c.k_max;

  // Particular solutions, one stable march per mode.
  ModeSamples part;
  for (const auto& [k, v] : rhs.modes) {
    const double kappa = 2.0 * kPi * k / c.delta;
    const auto& vk = v;
    part[k] = march_particular(
        kappa, grid, [&](int i, double) { return cd(0.0, -2.0) * vk[i]; });
  }

  const auto sw = quad_weights(n, grid.h());
  std::vector<double> meas(n);
  for (int i = 0; i < n; ++i)
    meas[i] = sw[i] * std::pow(std::cos(grid.y(i)), 2.0 * m - 2.0);

  // Normalized holomorphic profiles p_j(y) = e^{-kappa_j (y - yref_j)}.
  auto profile = [&](int j, int i) {
    const double kappa = 2.0 * kPi * j / c.delta;
    const double yref = kappa >= 0.0 ? grid.y_lo : grid.y_hi;
    return std::exp(-kappa * (grid.y(i) - yref));
  };

  DbarSolution sol;
  sol.power = m;
  sol.grid = grid;
  sol.modes = part;

  if (std::holds_alternative<ZeroWeight>(w)) {
    // Modes decouple: scalar projection per rhs mode.
    for (auto& [k, u] : sol.modes) {
      if (std::abs(k) > band) continue;
      double den = 0.0;
      cd num(0.0, 0.0);
      for (int i = 0; i < n; ++i) {
        const double p = profile(k, i);
        den += meas[i] * p * p;
        num += meas[i] * u[i] * p;
      }
      const cd coeff = num / den;
      for (int i = 0; i < n; ++i) u[i] -= coeff * profile(k, i);
    }
    sol.gram_condition = 1.0;
  } else {
    const int K = 2 * band + 1;
    const auto table = build_weight_table(grid, c, w, opt.n_theta, 2 * band);
    Eigen::MatrixXcd G(K, K);
    Eigen::VectorXcd bvec(K);
    for (int j = -band; j <= band; ++j) {
      for (int l = -band; l <= band; ++l) {
        if (l < j) {
          G(j + band, l + band) = std::conj(G(l + band, j + band));
          continue;
        }
        cd s(0.0, 0.0);
        for (int i = 0; i < n; ++i)
          s += meas[i] * profile(j, i) * profile(l, i) * table.get(j - l, i);
        G(j + band, l + band) = s;
      }
      cd s(0.0, 0.0);
      for (const auto& [k, u] : part) {
        for (int i = 0; i < n; ++i) s += meas[i] * u[i] * profile(j, i) * table.get(k - j, i);
      }
      bvec(j + band) = s;
    }
    // Unit-diagonal normalization keeps the condition estimate meaningful.
    Eigen::VectorXd d(K);
    for (int j = 0; j < K; ++j) d(j) = std::sqrt(std::max(G(j, j).real(), 1e-300));
    Eigen::MatrixXcd Gn = G;
    for (int j = 0; j < K; ++j)
      for (int l = 0; l < K; ++l) Gn(j, l) /= d(j) * d(l);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Gn);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > opt.cond_limit)
      throw ConditioningError(
          "solve_dbar: weighted Gram condition exceeds limit; try a smaller k_max",
          lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity());
    sol.gram_condition = lmax / lmin;
    Eigen::VectorXcd bn = bvec;
    for (int j = 0; j < K; ++j) bn(j) /= d(j);
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(Gn);
    Eigen::VectorXcd cn = ldlt.solve(bn);
    cn += ldlt.solve(bn - Gn * cn);  // one refinement pass
    for (int j = -band; j <= band; ++j) {
      const cd coeff = cn(j + band) / d(j + band);
      if (coeff == cd(0.0, 0.0)) continue;
      auto& u = sol.modes[j];
      if (u.empty()) u.assign(n, cd(0.0, 0.0));
      for (int i = 0; i < n; ++i) u[i] -= coeff * profile(j, i);
    }
  }

  sol.rhs_weighted_sq_norm =
      weighted_field_inner(rhs.modes, rhs.modes, grid, c, w, m + 1, opt.n_theta).real();
  sol.weighted_sq_norm =
      weighted_field_inner(sol.modes, sol.modes, grid, c, w, m, opt.n_theta).real();
  return sol;
}

double kernel_orthogonality(const DbarSolution& sol, const Collar& c, const WeightSpec& w,
                            const SolveOptions& opt) {
  const int band = opt.projection_band >= 0 ? opt.projection_band : c.k_max;
  const YGrid& grid = sol.grid;
  const double unorm = std::sqrt(std::max(
      weighted_field_inner(sol.modes, sol.modes, grid, c, w, sol.power, opt.n_theta).real(),
      0.0));
  if (unorm == 0.0) return 0.0;
  double worst = 0.0;
  for (int j = -band; j <= band; ++j) {
    const double kappa = 2.0 * kPi * j / c.delta;
    const double yref = kappa >= 0.0 ? grid.y_lo : grid.y_hi;
    ModeSamples mode;
    auto& p = mode[j];
    p.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) p[i] = std::exp(-kappa * (grid.y(i) - yref));
    const double pnorm = std::sqrt(
        weighted_field_inner(mode, mode, grid, c, w, sol.power, opt.n_theta).real());
    const cd ip = weighted_field_inner(sol.modes, mode, grid, c, w, sol.power, opt.n_theta);
    worst = std::max(worst, std::abs(ip) / (unorm * pnorm));
  }
  return worst;
}

HormanderCertificate hormander_ratio(const DbarSolution& sol, const WeightSpec& w,
                                     const Collar& c, int m, double tolerance_factor) {
  (void)w;
  (void)c;
  HormanderCertificate h;
  if (sol.rhs_weighted_sq_norm > 0.0) h.ratio = sol.weighted_sq_norm / sol.rhs_weighted_sq_norm;
  h.bound = m >= 2 ? tolerance_factor / (m - 1) : std::numeric_limits<double>::infinity();
  h.ok = h.ratio <= h.bound;
  return h;
}

// ---------------------------------------------------------------------------
// Peak sections

PeakRhs build_peak_rhs(const Collar& c, int m, double rho0, const PeakConfig& cfg) {
  const double R = c.half_width;
  PeakRhs pk;
  pk.rho0 = std::abs(rho0);  // rho -> -rho isometry
  if (!(pk.rho0 <= R - 1.0))
    throw DomainError("build_peak_rhs: |rho0| must be <= R - 1");
  pk.y0 = y_of_rho(pk.rho0);
  pk.c1 = cd(0.0, -std::sinh(pk.rho0));  // -i tan(y0); kills d log||F||^2 at x0
  pk.delta_x0 = inj_radius_model(c, pk.rho0, kEps2Default);
  const double scale = cfg.sqrt_m_scaled_cutoff ? 2.0 * std::sqrt(double(m)) : 2.0;
  pk.cut_radius = pk.delta_x0 / scale;
  if (pk.rho0 <= R - 4.0) {
    pk.weight = make_collar_peak(c, pk.rho0);
  } else {
    pk.weight = ThickLogSpec{kEps2Default, CollarPoint{pk.rho0, 0.0}};
  }

  const double yR = y_range(c);
  YGrid grid{-yR, yR, cfg.n_y};
  check_grid(grid);
  pk.rhs.power = m;
  pk.rhs.grid = grid;

  const int B = std::min(cfg.mode_band, c.k_max);
  const int nt = cfg.n_theta;
  const CollarPoint x0{pk.rho0, 0.0};
  std::vector<cd> row_v(nt), row_e(nt);
  for (int k = -B; k <= B; ++k) {
    pk.rhs.modes[k].assign(grid.n, cd(0.0, 0.0));
    pk.eta_f[k].assign(grid.n, cd(0.0, 0.0));
  }
  for (int i = 0; i < grid.n; ++i) {
    const double y = grid.y(i);
    if (std::abs(y - pk.y0) > 1.25 * pk.cut_radius) continue;
    const double rho = rho_of_y(y);
    const double ch = std::cosh(rho), sh = std::sinh(rho);
    const double ch0 = std::cosh(pk.rho0), sh0 = std::sinh(pk.rho0);
    bool any = false;
    for (int s = 0; s < nt; ++s) {
      double theta = c.delta * (s + 0.5) / nt;
      double t = theta;  // reduced theta difference to x0 (theta0 = 0)
      if (t > 0.5 * c.delta) t -= c.delta;
      const double chd = std::max(1.0, ch * ch0 * std::cosh(t) - sh * sh0);
      const double d = std::acosh(chd);
      row_v[s] = cd(0.0, 0.0);
      row_e[s] = cd(0.0, 0.0);
      if (d >= pk.cut_radius) continue;  // outside the cutoff support
      any = true;
      const cd F = std::exp(double(m) * pk.c1 * cd(theta, y - pk.y0));
      const double tt = d / pk.cut_radius;  // eta argument
      row_e[s] = detail::eta_ext(tt) * F;
      const double dp = detail::eta_ext_d1(tt);
      if (dp != 0.0 && d > 0.0) {
        const double sd = std::sinh(d);
        const double dd_drho = (sh * ch0 * std::cosh(t) - ch * sh0) / sd;
        const double dd_dtheta = (ch * ch0 * std::sinh(t)) / sd;
        const cd dbar_d = 0.5 * cd(dd_dtheta, ch * dd_drho);  // (1/2)(d_theta + i d_y)
        row_v[s] = (dp / pk.cut_radius) * dbar_d * F;
      }
    }
    if (!any) continue;
    for (int k = -B; k <= B; ++k) {
      cd accv(0.0, 0.0), acce(0.0, 0.0);
      for (int s = 0; s < nt; ++s) {
        const cd ph = std::polar(1.0, -2.0 * kPi * k * (s + 0.5) / nt);
        accv += row_v[s] * ph;
        acce += row_e[s] * ph;
      }
      pk.rhs.modes[k][i] = accv / double(nt);
      pk.eta_f[k][i] = acce / double(nt);
    }
  }
  // Drop identically-zero mode rows to keep downstream loops lean.
  for (auto it = pk.rhs.modes.begin(); it != pk.rhs.modes.end();) {
    auto allz = [](const std::vector<cd>& v) {
      for (const cd& z : v)
        if (z != cd(0.0, 0.0)) return false;
      return true;
    };
    const int k = it->first;
    if (allz(it->second) && allz(pk.eta_f[k])) {
      pk.eta_f.erase(k);
      it = pk.rhs.modes.erase(it);
    } else {
      ++it;
    }
  }

  const auto swts = quad_weights(grid.n, grid.h());
  double ef = 0.0;
  for (const auto& [k, samples] : pk.eta_f) {
    double s = 0.0;
    for (int i = 0; i < grid.n; ++i)
      s += swts[i] * std::norm(samples[i]) * std::pow(std::cos(grid.y(i)), 2.0 * m - 2.0);
    ef += s * c.delta;
  }
  pk.eta_f_l2_sq = ef;
  return pk;
}

namespace {

cd interp_at(const std::vector<cd>& v, const YGrid& g, double y) {
  // 4-point Lagrange interpolation around y.
  const double h = g.h();
  int i1 = static_cast<int>(std::floor((y - g.y_lo) / h));
  i1 = std::clamp(i1, 1, g.n - 3);
  const int i0 = i1 - 1;
  cd out(0.0, 0.0);
  for (int a = 0; a < 4; ++a) {
    double lag = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      lag *= (y - g.y(i0 + b)) / (g.y(i0 + a) - g.y(i0 + b));
    }
    out += lag * v[i0 + a];
  }
  return out;
}

}  // namespace

std::pair<ModeSection, PeakReport> peak_section(const Collar& c, int m, double rho0,
                                                const QuadratureSpec& q, const PeakConfig& cfg) {
  if (m < cfg.m0_gate)
    throw DomainError("peak_section: m below the configured m0 gate");
  PeakRhs pk = build_peak_rhs(c, m, rho0, cfg);
  SolveOptions opt;
  opt.n_theta = cfg.n_theta;
  opt.projection_band = std::min(cfg.mode_band, c.k_max);
  const DbarSolution sol = solve_dbar(pk.rhs, c, pk.weight, q, opt);

  PeakReport rep;
  rep.rho0 = pk.rho0;
  rep.delta_x0 = pk.delta_x0;
  rep.cut_radius = pk.cut_radius;
  rep.eta_f_l2_sq = pk.eta_f_l2_sq;
  rep.gram_condition = sol.gram_condition;

  const YGrid& grid = sol.grid;
  const auto swts = quad_weights(grid.n, grid.h());

  // S = eta F - u, per mode; extract the holomorphic coefficients.
  ModeSamples s_modes = pk.eta_f;
  for (const auto& [k, u] : sol.modes) {
    auto& sk = s_modes[k];
    if (sk.empty()) sk.assign(grid.n, cd(0.0, 0.0));
    for (int i = 0; i < grid.n; ++i) sk[i] -= u[i];
  }
  ModeSection section(m);
  double resid_num = 0.0, resid_den = 0.0;
  for (const auto& [k, sk] : s_modes) {
    const double kappa = 2.0 * kPi * k / c.delta;
    ScaledAccumulator acc;
    for (int i = 0; i < grid.n; ++i) {
      if (sk[i] == cd(0.0, 0.0)) continue;
      const double lw = std::log(swts[i]) - kappa * grid.y(i) +
                        (2.0 * m - 2.0) * std::log(std::cos(grid.y(i)));
      acc.add(LogComplex::from(sk[i]) * LogComplex::from_polar_log(lw, 0.0));
    }
    const double log_den = log_adaptive_simpson(
        [&](double y) {
          return -2.0 * kappa * y + (2.0 * m - 2.0) * std::log(std::cos(y));
        },
        grid.y_lo, grid.y_hi, q);
    const LogComplex coeff = acc.value() / LogComplex::from_polar_log(log_den, 0.0);
    section.set_log(k, coeff);
    // Projection residual pieces (linear scale; profiles are bounded here).
    for (int i = 0; i < grid.n; ++i) {
      const double mcos = swts[i] * std::pow(std::cos(grid.y(i)), 2.0 * m - 2.0);
      const cd fit = (coeff * LogComplex::from_polar_log(-kappa * grid.y(i), 0.0)).to_complex();
      resid_num += mcos * std::norm(sk[i] - fit);
      resid_den += mcos * std::norm(sk[i]);
    }
  }
  rep.projection_residual = resid_den > 0.0 ? std::sqrt(resid_num / resid_den) : 0.0;

  // Values at x0: eta F(x0) = 1 by construction.
  cd u_x0(0.0, 0.0);
  for (const auto& [k, u] : sol.modes) u_x0 += interp_at(u, grid, pk.y0);
  const double log_cos0 = std::log(std::cos(pk.y0));
  rep.log_s_x0 = std::log(std::abs(1.0 - u_x0)) + m * log_cos0;
  rep.u_x0_over_s_x0 = std::abs(u_x0) / std::abs(1.0 - u_x0);
  rep.u_small_ok = rep.u_x0_over_s_x0 <= 1e-3;

  rep.log_s_l2 = 0.5 * log_sq_norm_l2(section, c, q);
  rep.log_achieved = rep.log_s_x0 - rep.log_s_l2;
  rep.achieved_ratio = std::exp(std::min(rep.log_achieved, kMaxExp));

  const double t = kPi / pk.delta_x0 - std::log(std::sqrt(double(m)) * pk.delta_x0 * pk.delta_x0);
  const double softplus = t > 36.0 ? t : std::log1p(std::exp(t));
  rep.fitted_log_D = 0.5 * std::log(double(m)) - softplus - rep.log_achieved;
  rep.log_profile_at_D100 = log_partial_estimate_profile(m, pk.delta_x0, 100.0);
  rep.profile_ok_at_D100 = rep.log_profile_at_D100 <= rep.log_achieved;

  // Frame criticality: d/drho log ||F||^2 at x0 by central differences.
  auto logF2 = [&](double rho) {
    const double y = y_of_rho(rho);
    return 2.0 * m * std::sinh(pk.rho0) * (y - pk.y0) + 2.0 * m * std::log(std::cos(y));
  };
  const double hh = 1e-5;
  rep.frame_grad_check = std::abs(logF2(pk.rho0 + hh) - logF2(pk.rho0 - hh)) / (2.0 * hh);

  const auto horm = hormander_ratio(sol, pk.weight, c, m, cfg.tolerance_factor);
  rep.hormander_ratio = horm.ratio;
  rep.hormander_bound = horm.bound;
  rep.hormander_ok = horm.ok;
  return {section, rep};
}

std::string to_json(const DbarSolution& sol) {
  nlohmann::ordered_json j;
  j["power"] = sol.power;
  j["grid"] = {{"y_lo", sol.grid.y_lo}, {"y_hi", sol.grid.y_hi}, {"n", sol.grid.n}};
  auto modes = nlohmann::ordered_json::object();
  for (const auto& [k, v] : sol.modes) {
    auto arr = nlohmann::ordered_json::array();
    for (const cd& z : v) arr.push_back({z.real(), z.imag()});
    modes[std::to_string(k)] = arr;
  }
  j["modes"] = modes;
  j["weighted_sq_norm"] = sol.weighted_sq_norm;
  j["rhs_weighted_sq_norm"] = sol.rhs_weighted_sq_norm;
  return j.dump();
}

DbarSolution dbar_solution_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  DbarSolution sol;
  sol.power = j.at("power").get<int>();
  sol.grid.y_lo = j.at("grid").at("y_lo").get<double>();
  sol.grid.y_hi = j.at("grid").at("y_hi").get<double>();
  sol.grid.n = j.at("grid").at("n").get<int>();
  for (const auto& [key, arr] : j.at("modes").items()) {
    std::vector<cd> v;
    v.reserve(arr.size());
    for (const auto& e : arr) v.emplace_back(e[0].get<double>(), e[1].get<double>());
    sol.modes[std::stoi(key)] = std::move(v);
  }
  sol.weighted_sq_norm = j.at("weighted_sq_norm").get<double>();
  sol.rhs_weighted_sq_norm = j.at("rhs_weighted_sq_norm").get<double>();
  return sol;
}

}  // namespace collar
