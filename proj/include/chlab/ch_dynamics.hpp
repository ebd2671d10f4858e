#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "chlab/grid.hpp"
#include "chlab/spectral.hpp"

namespace chlab {

struct blow_up_error : std::runtime_error {
  explicit blow_up_error(double t)
      : std::runtime_error("blow-up: non-finite field at t = " + std::to_string(t)), time(t) {}
  double time;
};

/// Coefficient data for the classic equation (constant kappa) or the
/// generalized equation with a spatial coefficient F(x).
struct CHParams {
  std::vector<double> F;
  std::vector<double> dF;
  bool classic = true;
  double kappa = 0.0;
  // Fraction of the Nyquist band kept when filtering the momentum tendency;
  // <= 0 disables the filter.
  double dealias_fraction = 2.0 / 3.0;

  static CHParams constant(const Grid1D& g, double kappa) {
    CHParams p;
    p.classic = true;
    p.kappa = kappa;
    p.F.assign(static_cast<std::size_t>(g.n), kappa);
    p.dF.assign(static_cast<std::size_t>(g.n), 0.0);
    return p;
  }

  /// Spatial coefficient; dF is derived spectrally when not supplied and
  /// cross-checked against the spectral derivative when it is.
  static CHParams spatial(const Grid1D& g, std::vector<double> F,
                          std::optional<std::vector<double>> dF = std::nullopt) {
    if (static_cast<int>(F.size()) != g.n)
      throw std::invalid_argument("CHParams::spatial: F sample count mismatch");
    CHParams p;
    p.classic = false;
    p.kappa = 0.0;
    FieldState Ff{g, F, 0.0};
    require_finite(Ff, "CHParams::spatial F");
    FieldState dspec = deriv(Ff, 1);
    if (dF) {
      if (dF->size() != F.size())
        throw std::invalid_argument("CHParams::spatial: dF sample count mismatch");
      FieldState dsup{g, *dF, 0.0};
      if (max_abs_diff(dsup, dspec) > 1e-8)
        throw std::invalid_argument(
            "CHParams::spatial: supplied dF disagrees with spectral derivative of F");
      p.dF = std::move(*dF);
    } else {
      p.dF = std::move(dspec.values);
    }
    p.F = std::move(F);
    return p;
  }
};

struct DiagnosticRecord {
  double t = 0.0;
  double M0 = 0.0;        // integral of m
  double E = 0.0;         // (1/2) integral of u^2 + u_x^2
  double H3 = 0.0;        // (1/2) integral of u^3 + u u_x^2 + 2 kappa u^2
  bool has_H3 = false;    // H3 tracked for the classic equation only
  double min_slope = 0.0; // min_x u_x
  double max_abs_u = 0.0;
};

/// Generalized Camassa-Holm right-hand side in nonlocal momentum form:
/// m_t = -(u m_x + 2 u_x m + F' u + 2 F u_x), m = u - u_xx, u_t = (1-d_xx)^{-1} m_t.
inline FieldState gch_rhs(const FieldState& u, const CHParams& params) {
  require_finite(u, "gch_rhs input");
  if (static_cast<int>(params.F.size()) != u.grid.n)
    throw std::invalid_argument("gch_rhs: coefficient sample count mismatch");
  const std::size_t n = u.values.size();
  FieldState ux = deriv(u, 1);
  FieldState m = helmholtz_map(u);
  FieldState mx = deriv(m, 1);
  FieldState mt = make_field(u.grid, u.time);
  for (std::size_t j = 0; j < n; ++j) {
    mt.values[j] = -(u.values[j] * mx.values[j] + 2.0 * ux.values[j] * m.values[j] +
                     params.dF[j] * u.values[j] + 2.0 * params.F[j] * ux.values[j]);
  }
  if (params.dealias_fraction > 0.0) mt = low_pass(mt, params.dealias_fraction);
  FieldState ut = helmholtz_invert(mt);
  for (double v : ut.values)
    if (!std::isfinite(v)) throw blow_up_error(u.time);
  return ut;
}

/// Classic Camassa-Holm right-hand side, m_t = -(u m_x + 2 u_x m + 2 kappa u_x).
inline FieldState ch_rhs(const FieldState& u, const CHParams& params) {
  if (!params.classic) throw std::invalid_argument("ch_rhs: params must be classic (F == kappa)");
  require_finite(u, "ch_rhs input");
  const std::size_t n = u.values.size();
  FieldState ux = deriv(u, 1);
  FieldState m = helmholtz_map(u);
  FieldState mx = deriv(m, 1);
  FieldState mt = make_field(u.grid, u.time);
  for (std::size_t j = 0; j < n; ++j) {
    mt.values[j] = -(u.values[j] * mx.values[j] + 2.0 * ux.values[j] * m.values[j] +
                     2.0 * params.kappa * ux.values[j]);
  }
  if (params.dealias_fraction > 0.0) mt = low_pass(mt, params.dealias_fraction);
  FieldState ut = helmholtz_invert(mt);
  for (double v : ut.values)
    if (!std::isfinite(v)) throw blow_up_error(u.time);
  return ut;
}

inline FieldState equation_rhs(const FieldState& u, const CHParams& params) {
  return params.classic ? ch_rhs(u, params) : gch_rhs(u, params);
}

/// Linearizing u_t + 2 kappa u_x - u_txx = 0 gives phase speed 2 kappa / (1 + k^2).
inline double dispersion_speed(double kappa, double k) { return 2.0 * kappa / (1.0 + k * k); }

/// Advective stability bound dt <= C dx / max|u|.
inline bool stable_step(const FieldState& u, double dt, double C = 1.0) {
  const double umax = max_abs(u);
  if (umax == 0.0) return true;
  return dt <= C * u.grid.dx / umax;
}

inline FieldState step_rk4(const FieldState& u, double dt, const CHParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
  const std::size_t n = u.values.size();
  FieldState k1 = equation_rhs(u, params);
  FieldState s = u;
  for (std::size_t j = 0; j < n; ++j) s.values[j] = u.values[j] + 0.5 * dt * k1.values[j];
  s.time = u.time + 0.5 * dt;
  FieldState k2 = equation_rhs(s, params);
  for (std::size_t j = 0; j < n; ++j) s.values[j] = u.values[j] + 0.5 * dt * k2.values[j];
  FieldState k3 = equation_rhs(s, params);
  for (std::size_t j = 0; j < n; ++j) s.values[j] = u.values[j] + dt * k3.values[j];
  s.time = u.time + dt;
  FieldState k4 = equation_rhs(s, params);
  FieldState out = u;
  out.time = u.time + dt;
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = u.values[j] + dt / 6.0 *
                                      (k1.values[j] + 2.0 * k2.values[j] + 2.0 * k3.values[j] +
                                       k4.values[j]);
  }
  return out;
}

inline DiagnosticRecord diagnose(const FieldState& u, const CHParams& params) {
  DiagnosticRecord r;
  r.t = u.time;
  FieldState m = helmholtz_map(u);
  r.M0 = integrate(m);
  FieldState ux = deriv(u, 1);
  const std::size_t n = u.values.size();
  FieldState e = make_field(u.grid);
  for (std::size_t j = 0; j < n; ++j)
    e.values[j] = 0.5 * (u.values[j] * u.values[j] + ux.values[j] * ux.values[j]);
  r.E = integrate(e);
  if (params.classic) {
    FieldState h = make_field(u.grid);
    for (std::size_t j = 0; j < n; ++j) {
      const double uj = u.values[j];
      h.values[j] = 0.5 * (uj * uj * uj + uj * ux.values[j] * ux.values[j] +
                           2.0 * params.kappa * uj * uj);
    }
    r.H3 = integrate(h);
    r.has_H3 = true;
  }
  r.min_slope = *std::min_element(ux.values.begin(), ux.values.end());
  r.max_abs_u = max_abs(u);
  return r;
}

struct SimResult {
  std::vector<FieldState> trajectory;        // recorded every record_every steps
  std::vector<DiagnosticRecord> records;
  bool aborted = false;
  std::string abort_reason;
  std::vector<std::string> warnings;
};

/// Fixed-step RK4 integration with diagnostics recorded every record_every
/// steps. On blow-up the partial trajectory up to the last finite state is
/// returned with the abort reason set.
inline SimResult simulate(const FieldState& u0, const CHParams& params, double dt, double T,
                          int record_every, double stability_C = 1.0) {
  if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("simulate: dt and T must be positive");
  if (record_every < 1) throw std::invalid_argument("simulate: record_every must be positive");
  SimResult res;
  FieldState u = u0;
  if (!stable_step(u, dt, stability_C))
    res.warnings.push_back("stability bound dt <= C*dx/max|u| violated at t = 0");
  res.trajectory.push_back(u);
  res.records.push_back(diagnose(u, params));
  const long steps = std::lround(T / dt);
  bool warned_midrun = false;
  for (long s = 1; s <= steps; ++s) {
    try {
      u = step_rk4(u, dt, params);
    } catch (const std::exception& e) {
      // blow_up_error or a non-finite intermediate caught downstream
      res.aborted = true;
      res.abort_reason = e.what();
      return res;
    }
    if (s % record_every == 0 || s == steps) {
      res.trajectory.push_back(u);
      res.records.push_back(diagnose(u, params));
      if (!warned_midrun && !stable_step(u, dt, stability_C)) {
        res.warnings.push_back("stability bound dt <= C*dx/max|u| violated at t = " +
                               std::to_string(u.time));
        warned_midrun = true;
      }
    }
  }
  return res;
}

/// First record time with min_slope below the threshold, if any.
inline std::optional<double> detect_breaking(const std::vector<DiagnosticRecord>& records,
                                             double threshold) {
  for (const auto& r : records)
    if (r.min_slope < threshold) return r.t;
  return std::nullopt;
}

}  // namespace chlab
