#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "chlab/grid.hpp"
#include "chlab/interp.hpp"
#include "chlab/spectral.hpp"

namespace chlab {

/// Orientation-preserving circle map gamma(x) = x + d(x) with periodic
/// displacement d sampled on the grid; strictly monotone.
struct DiscreteDiffeo {
  Grid1D grid;
  std::vector<double> disp;
  MonotoneCircleMap map;

  static DiscreteDiffeo identity(const Grid1D& g) {
    return from_displacement(g, std::vector<double>(static_cast<std::size_t>(g.n), 0.0));
  }

  static DiscreteDiffeo from_displacement(const Grid1D& g, std::vector<double> d) {
    MonotoneCircleMap m(g, d);  // throws when not strictly increasing
    return DiscreteDiffeo{g, std::move(d), std::move(m)};
  }

  double eval(double x) const { return map(x); }

  double gamma_at(int j) const { return grid.node(j) + disp[static_cast<std::size_t>(j)]; }

  /// gamma_x = 1 + d' with d' taken spectrally (d is periodic and smooth).
  FieldState gamma_x() const {
    FieldState d{grid, disp, 0.0};
    FieldState gx = deriv(d, 1);
    for (double& v : gx.values) v += 1.0;
    return gx;
  }
};

/// (a o b)(x_j) = a(b(x_j)), stored back as a displacement.
inline DiscreteDiffeo compose(const DiscreteDiffeo& a, const DiscreteDiffeo& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("compose: grid mismatch");
  const Grid1D& g = a.grid;
  std::vector<double> d(static_cast<std::size_t>(g.n));
  for (int j = 0; j < g.n; ++j)
    d[static_cast<std::size_t>(j)] = a.eval(b.gamma_at(j)) - g.node(j);
  return DiscreteDiffeo::from_displacement(g, std::move(d));
}

/// Nodewise monotone root finding: invert(a)(x_j) solves a(y) = x_j.
inline DiscreteDiffeo invert(const DiscreteDiffeo& a) {
  const Grid1D& g = a.grid;
  std::vector<double> d(static_cast<std::size_t>(g.n));
  for (int j = 0; j < g.n; ++j)
    d[static_cast<std::size_t>(j)] = a.map.inverse(g.node(j)) - g.node(j);
  return DiscreteDiffeo::from_displacement(g, std::move(d));
}

namespace detail {

// 4th-order first-derivative stencils on a uniform time grid: weights[k] for
// sample offsets base+k, divided by dt by the caller.
struct TimeStencil {
  int base;  // offset of the first sample relative to the evaluation index
  std::array<double, 5> w;
};

inline TimeStencil time_stencil(int i, int m) {
  // m+1 samples, indices 0..m; requires m >= 4.
  if (i >= 2 && i <= m - 2)
    return {-2, {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0}};
  if (i == 0) return {0, {-25.0 / 12.0, 48.0 / 12.0, -36.0 / 12.0, 16.0 / 12.0, -3.0 / 12.0}};
  if (i == 1) return {-1, {-3.0 / 12.0, -10.0 / 12.0, 18.0 / 12.0, -6.0 / 12.0, 1.0 / 12.0}};
  if (i == m - 1) return {-3, {-1.0 / 12.0, 6.0 / 12.0, -18.0 / 12.0, 10.0 / 12.0, 3.0 / 12.0}};
  return {-4, {3.0 / 12.0, -16.0 / 12.0, 36.0 / 12.0, -48.0 / 12.0, 25.0 / 12.0}};
}

}  // namespace detail

/// Uniform-in-time path of diffeomorphisms, slices at t_i = t0 + i * dt.
struct DiffeoPath {
  Grid1D grid;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<DiscreteDiffeo> slices;

  int steps() const { return static_cast<int>(slices.size()) - 1; }
  double duration() const { return steps() * dt; }
  double time_at(int i) const { return t0 + i * dt; }

  void validate() const {
    if (slices.size() < 9) throw std::invalid_argument("DiffeoPath: need at least 9 slices");
    if (!(dt > 0.0)) throw std::invalid_argument("DiffeoPath: dt must be positive");
    for (const auto& s : slices)
      if (!(s.grid == grid)) throw std::invalid_argument("DiffeoPath: slice grid mismatch");
  }
};

/// Material velocity gamma_t at slice i, by 4th-order time stencils on the
/// displacement samples (one-sided at the endpoints).
inline FieldState material_velocity(const DiffeoPath& path, int i) {
  const int m = path.steps();
  if (i < 0 || i > m) throw std::out_of_range("material_velocity: slice index");
  const auto st = detail::time_stencil(i, m);
  FieldState vt = make_field(path.grid, path.time_at(i));
  for (int k = 0; k < 5; ++k) {
    const auto& d = path.slices[static_cast<std::size_t>(i + st.base + k)].disp;
    const double w = st.w[static_cast<std::size_t>(k)] / path.dt;
    for (std::size_t j = 0; j < vt.values.size(); ++j) vt.values[j] += w * d[j];
  }
  return vt;
}

/// Eulerian velocity u = gamma_t o gamma^{-1} sampled on the grid.
inline FieldState eulerian_velocity(const DiffeoPath& path, int i) {
  FieldState vt = material_velocity(path, i);
  const DiscreteDiffeo inv = invert(path.slices[static_cast<std::size_t>(i)]);
  PeriodicField interp(path.grid, vt.values);
  FieldState u = make_field(path.grid, path.time_at(i));
  for (int j = 0; j < path.grid.n; ++j)
    u.values[static_cast<std::size_t>(j)] = interp(inv.gamma_at(j));
  return u;
}

/// Path-shaped displacement perturbation phi(t, x) vanishing at both time
/// endpoints.
struct Perturbation {
  std::vector<std::vector<double>> disp;  // one displacement field per slice

  void validate(const DiffeoPath& path) const {
    if (disp.size() != path.slices.size())
      throw std::invalid_argument("Perturbation: slice count mismatch");
    for (const auto& d : disp)
      if (static_cast<int>(d.size()) != path.grid.n)
        throw std::invalid_argument("Perturbation: sample count mismatch");
    for (double v : disp.front())
      if (v != 0.0) throw std::invalid_argument("Perturbation: phi(0,.) must vanish");
    for (double v : disp.back())
      if (v != 0.0) throw std::invalid_argument("Perturbation: phi(T,.) must vanish");
  }

  /// phi_t at slice i by the same 4th-order stencils used for the path.
  std::vector<double> time_derivative(int i, double dt) const {
    const int m = static_cast<int>(disp.size()) - 1;
    const auto st = detail::time_stencil(i, m);
    std::vector<double> out(disp.front().size(), 0.0);
    for (int k = 0; k < 5; ++k) {
      const auto& d = disp[static_cast<std::size_t>(i + st.base + k)];
      const double w = st.w[static_cast<std::size_t>(k)] / dt;
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += w * d[j];
    }
    return out;
  }
};

}  // namespace chlab
