#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "chlab/diffeo.hpp"
#include "chlab/grid.hpp"
#include "chlab/interp.hpp"
#include "chlab/spectral.hpp"

namespace chlab {

/// Offset c(x) entering the right-invariant action
/// a = (1/2) int int (u + c)^2 + (u_x)^2 dx dt:
/// zero, a constant (c0, or omega0 sqrt(g h0)/g + c0), or sampled F(x).
struct ActionOffset {
  std::vector<double> c;

  static ActionOffset zero(const Grid1D& g) {
    return ActionOffset{std::vector<double>(static_cast<std::size_t>(g.n), 0.0)};
  }
  static ActionOffset constant(const Grid1D& g, double c0) {
    return ActionOffset{std::vector<double>(static_cast<std::size_t>(g.n), c0)};
  }
  static ActionOffset samples(const Grid1D& g, std::vector<double> c) {
    if (static_cast<int>(c.size()) != g.n)
      throw std::invalid_argument("ActionOffset: sample count mismatch");
    FieldState f{g, c, 0.0};
    require_finite(f, "ActionOffset");
    return ActionOffset{std::move(c)};
  }
};

namespace detail {

inline std::vector<double> compose_with_inverse(const Grid1D& g, const std::vector<double>& field,
                                                const DiscreteDiffeo& inv) {
  PeriodicField interp(g, field);
  std::vector<double> out(static_cast<std::size_t>(g.n));
  for (int j = 0; j < g.n; ++j) out[static_cast<std::size_t>(j)] = interp(inv.gamma_at(j));
  return out;
}

}  // namespace detail

/// d/de (gamma + e phi)^{-1} at e = 0: -(phi o gamma^{-1}) / (gamma_x o gamma^{-1}).
inline FieldState variation_inverse(const DiscreteDiffeo& gamma, const std::vector<double>& phi) {
  const Grid1D& g = gamma.grid;
  if (static_cast<int>(phi.size()) != g.n)
    throw std::invalid_argument("variation_inverse: sample count mismatch");
  FieldState gx = gamma.gamma_x();
  const double min_slope = *std::min_element(gx.values.begin(), gx.values.end());
  if (!(min_slope > 1e-10))
    throw std::invalid_argument("variation_inverse: degenerate slope gamma_x");
  DiscreteDiffeo inv = invert(gamma);
  auto phi_comp = detail::compose_with_inverse(g, phi, inv);
  auto gx_comp = detail::compose_with_inverse(g, gx.values, inv);
  FieldState out = make_field(g);
  for (int j = 0; j < g.n; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    out.values[js] = -phi_comp[js] / gx_comp[js];
  }
  return out;
}

/// d/de [(gamma_t + e phi_t) o (gamma + e phi)^{-1}] at e = 0:
/// phi_t o gamma^{-1} - (phi o gamma^{-1}) d_x(gamma_t o gamma^{-1}).
/// The x-derivative of the Eulerian velocity is evaluated both spectrally and
/// through (gamma_tx o gamma^{-1}) / (gamma_x o gamma^{-1}); the two routes
/// must agree.
inline FieldState variation_velocity(const DiscreteDiffeo& gamma,
                                     const std::vector<double>& gamma_t,
                                     const std::vector<double>& phi,
                                     const std::vector<double>& phi_t) {
  const Grid1D& g = gamma.grid;
  DiscreteDiffeo inv = invert(gamma);
  auto phi_comp = detail::compose_with_inverse(g, phi, inv);
  auto phit_comp = detail::compose_with_inverse(g, phi_t, inv);
  auto u = detail::compose_with_inverse(g, gamma_t, inv);
  FieldState ufield{g, u, 0.0};
  FieldState ux_spectral = deriv(ufield, 1);
  // second route via the composition identity
  FieldState gt{g, gamma_t, 0.0};
  FieldState gtx = deriv(gt, 1);
  auto gtx_comp = detail::compose_with_inverse(g, gtx.values, inv);
  FieldState gx = gamma.gamma_x();
  auto gx_comp = detail::compose_with_inverse(g, gx.values, inv);
  double route_gap = 0.0, scale = 1.0;
  for (int j = 0; j < g.n; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    const double alt = gtx_comp[js] / gx_comp[js];
    route_gap = std::max(route_gap, std::abs(alt - ux_spectral.values[js]));
    scale = std::max(scale, std::abs(ux_spectral.values[js]));
  }
  if (route_gap > 1e-6 * scale)
    throw std::runtime_error("variation_velocity: the two forms of the velocity gradient differ");
  FieldState out = make_field(g);
  for (int j = 0; j < g.n; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    out.values[js] = phit_comp[js] - phi_comp[js] * ux_spectral.values[js];
  }
  return out;
}

/// d/de d_x[(gamma_t + e phi_t) o (gamma + e phi)^{-1}] at e = 0:
/// d_x(phi_t o g^{-1}) - d_x(gamma_t o g^{-1}) d_x(phi o g^{-1})
/// - (phi o g^{-1}) d_x^2(gamma_t o g^{-1}).
inline FieldState variation_velocity_gradient(const DiscreteDiffeo& gamma,
                                              const std::vector<double>& gamma_t,
                                              const std::vector<double>& phi,
                                              const std::vector<double>& phi_t) {
  const Grid1D& g = gamma.grid;
  DiscreteDiffeo inv = invert(gamma);
  auto phi_comp = detail::compose_with_inverse(g, phi, inv);
  auto phit_comp = detail::compose_with_inverse(g, phi_t, inv);
  auto u = detail::compose_with_inverse(g, gamma_t, inv);
  FieldState ufield{g, u, 0.0};
  FieldState ux = deriv(ufield, 1);
  FieldState uxx = deriv(ufield, 2);
  FieldState phit_field{g, phit_comp, 0.0};
  FieldState phit_x = deriv(phit_field, 1);
  FieldState phi_field{g, phi_comp, 0.0};
  FieldState phi_x = deriv(phi_field, 1);
  FieldState out = make_field(g);
  for (int j = 0; j < g.n; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    out.values[js] = phit_x.values[js] - ux.values[js] * phi_x.values[js] -
                     phi_comp[js] * uxx.values[js];
  }
  return out;
}

/// a(gamma) = (1/2) int_0^T int ((gamma_t o gamma^{-1} + c)^2
///                               + [d_x(gamma_t o gamma^{-1})]^2) dx dt,
/// trapezoid in t, spectral-exact in x.
inline double discrete_action(const DiffeoPath& path, const ActionOffset& offset) {
  path.validate();
  if (static_cast<int>(offset.c.size()) != path.grid.n)
    throw std::invalid_argument("discrete_action: offset sample count mismatch");
  const int m = path.steps();
  double total = 0.0;
  for (int i = 0; i <= m; ++i) {
    FieldState u = eulerian_velocity(path, i);
    FieldState ux = deriv(u, 1);
    FieldState integrand = make_field(path.grid);
    for (int j = 0; j < path.grid.n; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      const double a = u.values[js] + offset.c[js];
      integrand.values[js] = 0.5 * (a * a + ux.values[js] * ux.values[js]);
    }
    const double w = (i == 0 || i == m) ? 0.5 : 1.0;
    total += w * path.dt * integrate(integrand);
  }
  return total;
}

struct GateauxResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double eps_used = 0.0;
};

/// Directional derivative d/de a(gamma + e phi) at e = 0, by central
/// differences with Richardson extrapolation. On monotonicity loss at the
/// chosen eps, eps is halved up to 4 times.
inline GateauxResult gateaux_action(const DiffeoPath& path, const Perturbation& pert,
                                    const ActionOffset& offset, double eps = 1e-5) {
  path.validate();
  pert.validate(path);
  auto action_at = [&](double e) {
    DiffeoPath p;
    p.grid = path.grid;
    p.t0 = path.t0;
    p.dt = path.dt;
    p.slices.reserve(path.slices.size());
    for (std::size_t i = 0; i < path.slices.size(); ++i) {
      std::vector<double> d = path.slices[i].disp;
      for (std::size_t j = 0; j < d.size(); ++j) d[j] += e * pert.disp[i][j];
      p.slices.push_back(DiscreteDiffeo::from_displacement(path.grid, std::move(d)));
    }
    return discrete_action(p, offset);
  };
  for (int attempt = 0; attempt <= 4; ++attempt) {
    try {
      const double ap = action_at(eps);
      const double am = action_at(-eps);
      const double ap2 = action_at(2.0 * eps);
      const double am2 = action_at(-2.0 * eps);
      const double d1 = (ap - am) / (2.0 * eps);
      const double d2 = (ap2 - am2) / (4.0 * eps);
      GateauxResult r;
      r.value = (4.0 * d1 - d2) / 3.0;
      r.error_estimate = std::abs(d1 - d2) / 3.0 + 1e-15 * std::abs(ap) / eps;
      r.eps_used = eps;
      return r;
    } catch (const std::invalid_argument&) {
      eps *= 0.5;
    }
  }
  throw std::runtime_error("gateaux_action: perturbed path not monotone even at reduced eps");
}

/// Euler-Lagrange residual R[u] = u_t + 3 u u_x + 2 c u_x + c' u - u_txx
/// - 2 u_x u_xx - u u_xxx, per time slice, with 4th-order time stencils.
inline std::vector<FieldState> el_residual(const std::vector<FieldState>& u_series, double dt,
                                           const ActionOffset& offset) {
  if (u_series.size() < 5)
    throw std::invalid_argument("el_residual: need at least 5 time slices");
  const Grid1D& g = u_series.front().grid;
  if (static_cast<int>(offset.c.size()) != g.n)
    throw std::invalid_argument("el_residual: offset sample count mismatch");
  FieldState cfield{g, offset.c, 0.0};
  FieldState cprime = deriv(cfield, 1);
  const int m = static_cast<int>(u_series.size()) - 1;
  std::vector<FieldState> out;
  out.reserve(u_series.size());
  for (int i = 0; i <= m; ++i) {
    const auto st = detail::time_stencil(i, m);
    FieldState ut = make_field(g, u_series[static_cast<std::size_t>(i)].time);
    for (int k = 0; k < 5; ++k) {
      const auto& uv = u_series[static_cast<std::size_t>(i + st.base + k)].values;
      const double w = st.w[static_cast<std::size_t>(k)] / dt;
      for (std::size_t j = 0; j < ut.values.size(); ++j) ut.values[j] += w * uv[j];
    }
    const FieldState& u = u_series[static_cast<std::size_t>(i)];
    FieldState ux = deriv(u, 1);
    FieldState uxx = deriv(u, 2);
    FieldState uxxx = deriv(u, 3);
    FieldState utxx = deriv(ut, 2);
    FieldState r = make_field(g, u.time);
    for (int j = 0; j < g.n; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      r.values[js] = ut.values[js] + 3.0 * u.values[js] * ux.values[js] +
                     2.0 * offset.c[js] * ux.values[js] + cprime.values[js] * u.values[js] -
                     utxx.values[js] - 2.0 * ux.values[js] * uxx.values[js] -
                     u.values[js] * uxxx.values[js];
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct IdentityReport {
  double lhs = 0.0;       // Gateaux derivative of the action
  double rhs = 0.0;       // -int int (phi o gamma^{-1}) R[u] dx dt
  double gap = 0.0;
  double fd_error = 0.0;  // error estimate of the finite-difference lhs
};

/// The first-variation identity: the Gateaux derivative of the action equals
/// minus the pairing of the perturbation with the Euler-Lagrange residual.
inline IdentityReport identity_check(const DiffeoPath& path, const Perturbation& pert,
                                     const ActionOffset& offset) {
  GateauxResult lhs = gateaux_action(path, pert, offset);
  const int m = path.steps();
  std::vector<FieldState> u_series;
  u_series.reserve(path.slices.size());
  std::vector<DiscreteDiffeo> inverses;
  inverses.reserve(path.slices.size());
  for (int i = 0; i <= m; ++i) {
    inverses.push_back(invert(path.slices[static_cast<std::size_t>(i)]));
    FieldState vt = material_velocity(path, i);
    PeriodicField interp(path.grid, vt.values);
    FieldState u = make_field(path.grid, path.time_at(i));
    for (int j = 0; j < path.grid.n; ++j)
      u.values[static_cast<std::size_t>(j)] = interp(inverses.back().gamma_at(j));
    u_series.push_back(std::move(u));
  }
  std::vector<FieldState> R = el_residual(u_series, path.dt, offset);
  double rhs = 0.0;
  for (int i = 0; i <= m; ++i) {
    auto psi = detail::compose_with_inverse(path.grid, pert.disp[static_cast<std::size_t>(i)],
                                            inverses[static_cast<std::size_t>(i)]);
    FieldState integrand = make_field(path.grid);
    for (int j = 0; j < path.grid.n; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      integrand.values[js] = psi[js] * R[static_cast<std::size_t>(i)].values[js];
    }
    const double w = (i == 0 || i == m) ? 0.5 : 1.0;
    rhs -= w * path.dt * integrate(integrand);
  }
  IdentityReport rep;
  rep.lhs = lhs.value;
  rep.rhs = rhs;
  rep.gap = std::abs(lhs.value - rhs);
  rep.fd_error = lhs.error_estimate;
  return rep;
}

}  // namespace chlab
