#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chlab/grid.hpp"

namespace chlab {

struct collision_error : std::runtime_error {
  explicit collision_error(double t)
      : std::runtime_error("peakon collision guard tripped near t = " + std::to_string(t)),
        time(t) {}
  double time;
};

/// Line or periodic box, selecting the Green's function of 1 - d_xx.
struct PeakonDomain {
  bool periodic = false;
  double length = 0.0;

  static PeakonDomain line() { return PeakonDomain{false, 0.0}; }
  static PeakonDomain box(double L) {
    if (!(L > 0.0)) throw std::invalid_argument("PeakonDomain::box: L must be positive");
    return PeakonDomain{true, L};
  }
};

/// Green's function of 1 - d_xx: e^{-|x|}/2 on the line,
/// cosh(|x|_per - L/2) / (2 sinh(L/2)) on the box.
inline double green(double x, const PeakonDomain& dom) {
  if (!dom.periodic) return 0.5 * std::exp(-std::abs(x));
  const double L = dom.length;
  double r = std::fmod(x, L);
  if (r < 0.0) r += L;
  // cosh(r - L/2) / (2 sinh(L/2)) in overflow-safe form
  return (std::exp(-r) + std::exp(r - L)) / (2.0 * (1.0 - std::exp(-L)));
}

/// Derivative of the Green's function; 0 at x = 0 by symmetry.
inline double green_deriv(double x, const PeakonDomain& dom) {
  if (!dom.periodic) {
    if (x == 0.0) return 0.0;
    return -0.5 * (x > 0.0 ? 1.0 : -1.0) * std::exp(-std::abs(x));
  }
  const double L = dom.length;
  double r = std::fmod(x, L);
  if (r < 0.0) r += L;
  if (r == 0.0) return 0.0;
  return (-std::exp(-r) + std::exp(r - L)) / (2.0 * (1.0 - std::exp(-L)));
}

/// Positions and momenta of an N-peakon ensemble.
struct PeakonState {
  std::vector<double> q;
  std::vector<double> p;
  double t = 0.0;

  std::size_t size() const { return q.size(); }
};

inline double min_pair_distance(const PeakonState& s, const PeakonDomain& dom) {
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      double d = std::abs(s.q[i] - s.q[j]);
      if (dom.periodic) {
        d = std::fmod(d, dom.length);
        d = std::min(d, dom.length - d);
      }
      dmin = std::min(dmin, d);
    }
  }
  return dmin;
}

inline void check_peakon_state(const PeakonState& s, const PeakonDomain& dom,
                               double guard = 1e-8) {
  if (s.q.size() != s.p.size() || s.q.empty())
    throw std::invalid_argument("PeakonState: q and p must be non-empty and equal-sized");
  for (double v : s.q)
    if (!std::isfinite(v)) throw std::invalid_argument("PeakonState: non-finite position");
  for (double v : s.p)
    if (!std::isfinite(v)) throw std::invalid_argument("PeakonState: non-finite momentum");
  if (s.size() > 1 && min_pair_distance(s, dom) < guard) throw collision_error(s.t);
}

/// Sampled superposition u(x) = sum_i 2 p_i G(x - q_i); a single line peakon
/// with p_1 = c has peak value u(q_1) = c.
inline FieldState peakon_field(const PeakonState& s, const Grid1D& grid,
                               const PeakonDomain& dom) {
  if (dom.periodic && std::abs(dom.length - grid.length) > 1e-12 * grid.length)
    throw std::invalid_argument("peakon_field: grid length differs from box length");
  FieldState u = make_field(grid, s.t);
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.node(j);
    double v = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) v += 2.0 * s.p[i] * green(x - s.q[i], dom);
    u.values[static_cast<std::size_t>(j)] = v;
  }
  return u;
}

/// H = 2 sum_{ij} p_i p_j G(q_i - q_j), normalized to equal the field energy
/// (1/2)int(u^2 + u_x^2) of peakon_field; a single line peakon has H = p^2.
inline double peakon_hamiltonian(const PeakonState& s, const PeakonDomain& dom) {
  double H = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) H += s.p[i] * s.p[j] * green(s.q[i] - s.q[j], dom);
  return 2.0 * H;
}

/// Hamiltonian flow with the energy normalization above:
/// qdot_i = (1/2) dH/dp_i, pdot_i = -(1/2) dH/dq_i.
inline std::pair<std::vector<double>, std::vector<double>> peakon_rhs(const PeakonState& s,
                                                                      const PeakonDomain& dom) {
  check_peakon_state(s, dom);
  const std::size_t n = s.size();
  std::vector<double> dq(n, 0.0), dp(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double gsum = 0.0, gdsum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      gsum += s.p[j] * green(s.q[i] - s.q[j], dom);
      gdsum += s.p[j] * green_deriv(s.q[i] - s.q[j], dom);
    }
    dq[i] = 2.0 * gsum;
    dp[i] = -2.0 * s.p[i] * gdsum;
  }
  return {dq, dp};
}

inline PeakonState peakon_step_rk4(const PeakonState& s, const PeakonDomain& dom, double dt) {
  const std::size_t n = s.size();
  auto advance = [&](const PeakonState& base, const std::vector<double>& dq,
                     const std::vector<double>& dp, double h) {
    PeakonState out = base;
    for (std::size_t i = 0; i < n; ++i) {
      out.q[i] = s.q[i] + h * dq[i];
      out.p[i] = s.p[i] + h * dp[i];
    }
    out.t = s.t + h;
    return out;
  };
  auto [k1q, k1p] = peakon_rhs(s, dom);
  PeakonState s2 = advance(s, k1q, k1p, 0.5 * dt);
  auto [k2q, k2p] = peakon_rhs(s2, dom);
  PeakonState s3 = advance(s, k2q, k2p, 0.5 * dt);
  auto [k3q, k3p] = peakon_rhs(s3, dom);
  PeakonState s4 = advance(s, k3q, k3p, dt);
  auto [k4q, k4p] = peakon_rhs(s4, dom);
  PeakonState out = s;
  out.t = s.t + dt;
  for (std::size_t i = 0; i < n; ++i) {
    out.q[i] = s.q[i] + dt / 6.0 * (k1q[i] + 2.0 * k2q[i] + 2.0 * k3q[i] + k4q[i]);
    out.p[i] = s.p[i] + dt / 6.0 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
  }
  return out;
}

struct PeakonTrajectory {
  std::vector<PeakonState> states;
  std::vector<double> hamiltonian;
  bool aborted = false;
  double abort_time = 0.0;
  std::string abort_reason;
};

inline PeakonTrajectory simulate_peakons(const PeakonState& s0, const PeakonDomain& dom,
                                         double dt, double T, int record_every = 1) {
  if (!(dt > 0.0) || !(T > 0.0))
    throw std::invalid_argument("simulate_peakons: dt and T must be positive");
  if (record_every < 1)
    throw std::invalid_argument("simulate_peakons: record_every must be positive");
  PeakonTrajectory res;
  PeakonState s = s0;
  res.states.push_back(s);
  res.hamiltonian.push_back(peakon_hamiltonian(s, dom));
  const long steps = std::lround(T / dt);
  for (long k = 1; k <= steps; ++k) {
    try {
      s = peakon_step_rk4(s, dom, dt);
      check_peakon_state(s, dom);
    } catch (const collision_error& e) {
      res.aborted = true;
      res.abort_time = e.time;
      res.abort_reason = e.what();
      return res;
    } catch (const std::exception& e) {
      res.aborted = true;
      res.abort_time = s.t;
      res.abort_reason = e.what();
      return res;
    }
    if (k % record_every == 0 || k == steps) {
      res.states.push_back(s);
      res.hamiltonian.push_back(peakon_hamiltonian(s, dom));
    }
  }
  return res;
}

}  // namespace chlab
