#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "chlab/variational.hpp"

namespace chlab {

/// Random smooth displacement d(x) = sum_{k=1..modes} a_k sin(k x + theta_k)
/// with sum k |a_k| <= margin, so x + d stays strictly monotone.
inline std::vector<double> random_smooth_displacement(const Grid1D& g, std::mt19937_64& rng,
                                                      double margin = 0.25, int modes = 3) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> amp(static_cast<std::size_t>(modes)), phase(static_cast<std::size_t>(modes));
  double weight = 0.0;
  for (int k = 1; k <= modes; ++k) {
    amp[static_cast<std::size_t>(k - 1)] = unit(rng);
    phase[static_cast<std::size_t>(k - 1)] = 2.0 * std::numbers::pi * unit(rng);
    weight += k * amp[static_cast<std::size_t>(k - 1)];
  }
  const double scale = margin / weight;
  std::vector<double> d(static_cast<std::size_t>(g.n), 0.0);
  for (int j = 0; j < g.n; ++j) {
    const double x = g.node(j) * 2.0 * std::numbers::pi / g.length;
    double v = 0.0;
    for (int k = 1; k <= modes; ++k)
      v += scale * amp[static_cast<std::size_t>(k - 1)] *
           std::sin(k * x + phase[static_cast<std::size_t>(k - 1)]);
    d[static_cast<std::size_t>(j)] = v;
  }
  return d;
}

/// Smooth random path gamma(t, x) = x + w0(t) d0(x) + w1(t) d1(x) over [0, T].
inline DiffeoPath random_smooth_path(const Grid1D& g, int m, double T, std::mt19937_64& rng,
                                     double margin = 0.22) {
  auto d0 = random_smooth_displacement(g, rng, 0.5 * margin);
  auto d1 = random_smooth_displacement(g, rng, 0.5 * margin);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r0 = 0.5 + unit(rng), r1 = 0.5 + unit(rng);
  DiffeoPath path;
  path.grid = g;
  path.t0 = 0.0;
  path.dt = T / m;
  path.slices.reserve(static_cast<std::size_t>(m + 1));
  for (int i = 0; i <= m; ++i) {
    const double t = path.dt * i;
    const double w0 = std::sin(r0 * std::numbers::pi * t / T);
    const double w1 = std::cos(r1 * std::numbers::pi * t / T);
    std::vector<double> d(static_cast<std::size_t>(g.n));
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = w0 * d0[j] + w1 * d1[j];
    path.slices.push_back(DiscreteDiffeo::from_displacement(g, std::move(d)));
  }
  return path;
}

/// Random perturbation windowed by sin^4(pi t / T): vanishes, with three time
/// derivatives, at both endpoints (exactly zero at the endpoint slices).
inline Perturbation random_perturbation(const DiffeoPath& path, std::mt19937_64& rng,
                                        double amplitude = 0.15) {
  const int m = path.steps();
  auto shape = random_smooth_displacement(path.grid, rng, amplitude, 2);
  Perturbation pert;
  pert.disp.reserve(path.slices.size());
  for (int i = 0; i <= m; ++i) {
    std::vector<double> d(shape.size(), 0.0);
    if (i != 0 && i != m) {
      const double s = std::sin(std::numbers::pi * i / static_cast<double>(m));
      const double w = s * s * s * s;
      for (std::size_t j = 0; j < d.size(); ++j) d[j] = w * shape[j];
    }
    pert.disp.push_back(std::move(d));
  }
  return pert;
}

struct IdentityTableRow {
  std::string offset_name;
  int n = 0;
  int m = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double fd_error = 0.0;
};

/// Runs identity_check for one offset at a ladder of time resolutions,
/// reusing the same random path shape (refined in t) and perturbation window.
inline std::vector<IdentityTableRow> identity_resolution_table(
    const Grid1D& g, const std::string& offset_name, const ActionOffset& offset,
    const std::vector<int>& ms, double T, std::uint64_t seed) {
  std::vector<IdentityTableRow> rows;
  for (int m : ms) {
    std::mt19937_64 rng(seed);  // same shapes at every resolution
    DiffeoPath path = random_smooth_path(g, m, T, rng);
    Perturbation pert = random_perturbation(path, rng);
    IdentityReport rep = identity_check(path, pert, offset);
    rows.push_back({offset_name, g.n, m, rep.lhs, rep.rhs, rep.gap, rep.fd_error});
  }
  return rows;
}

}  // namespace chlab
