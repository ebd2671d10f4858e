#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace chlab {

/// Uniform periodic grid on [0, L) with n samples, x_j = j * L / n.
struct Grid1D {
  double length = 2.0 * std::numbers::pi;
  int n = 256;
  double dx = length / n;

  static Grid1D make(double length, int n) {
    if (!(length > 0.0)) throw std::invalid_argument("Grid1D: length must be positive");
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("Grid1D: n must be even and >= 8");
    Grid1D g;
    g.length = length;
    g.n = n;
    g.dx = length / n;
    return g;
  }

  double node(int j) const { return j * dx; }

  std::vector<double> nodes() const {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = node(j);
    return x;
  }

  // k_j = 2*pi*j / L for j = 0 .. n/2
  double wavenumber(int j) const { return 2.0 * std::numbers::pi * j / length; }

  bool operator==(const Grid1D& o) const { return n == o.n && length == o.length; }
};

/// A real field sampled on a Grid1D at one time instant.
struct FieldState {
  Grid1D grid;
  std::vector<double> values;
  double time = 0.0;
};

inline FieldState make_field(const Grid1D& g, double t = 0.0) {
  return FieldState{g, std::vector<double>(static_cast<std::size_t>(g.n), 0.0), t};
}

template <class F>
FieldState sample_field(const Grid1D& g, F&& f, double t = 0.0) {
  FieldState u = make_field(g, t);
  for (int j = 0; j < g.n; ++j) u.values[static_cast<std::size_t>(j)] = f(g.node(j));
  return u;
}

inline void require_finite(const FieldState& f, const char* what) {
  for (std::size_t j = 0; j < f.values.size(); ++j) {
    if (!std::isfinite(f.values[j])) {
      throw std::invalid_argument(std::string(what) + ": non-finite value at index " +
                                  std::to_string(j));
    }
  }
}

inline double max_abs(const FieldState& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const FieldState& a, const FieldState& b) {
  if (a.values.size() != b.values.size())
    throw std::invalid_argument("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j)
    m = std::max(m, std::abs(a.values[j] - b.values[j]));
  return m;
}

}  // namespace chlab
