#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "chlab/grid.hpp"

namespace chlab {

namespace detail {

// 4th-order centered slopes of periodic samples on a uniform grid.
inline std::vector<double> centered_slopes(const Grid1D& g, const std::vector<double>& y) {
  const int n = g.n;
  std::vector<double> s(static_cast<std::size_t>(n));
  const double h = g.dx;
  auto at = [&](int j) { return y[static_cast<std::size_t>(((j % n) + n) % n)]; };
  for (int j = 0; j < n; ++j) {
    s[static_cast<std::size_t>(j)] =
        (8.0 * (at(j + 1) - at(j - 1)) - (at(j + 2) - at(j - 2))) / (12.0 * h);
  }
  return s;
}

inline double hermite(double y0, double y1, double m0, double m1, double h, double s) {
  // s in [0, 1]
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * m0 +
         (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * m1;
}

inline double hermite_deriv(double y0, double y1, double m0, double m1, double h, double s) {
  const double s2 = s * s;
  return ((6.0 * s2 - 6.0 * s) * y0 + (3.0 * s2 - 4.0 * s + 1.0) * h * m0 +
          (-6.0 * s2 + 6.0 * s) * y1 + (3.0 * s2 - 2.0 * s) * h * m1) /
         h;
}

}  // namespace detail

/// Cubic Hermite interpolant of a periodic field on a uniform grid, with
/// 4th-order finite-difference slopes.
class PeriodicField {
 public:
  PeriodicField(const Grid1D& g, std::vector<double> values)
      : grid_(g), y_(std::move(values)), m_(detail::centered_slopes(g, y_)) {
    if (static_cast<int>(y_.size()) != g.n)
      throw std::invalid_argument("PeriodicField: sample count mismatch");
  }

  double operator()(double x) const {
    const double L = grid_.length;
    double r = std::fmod(x, L);
    if (r < 0.0) r += L;
    const double pos = r / grid_.dx;
    int j = static_cast<int>(pos);
    if (j >= grid_.n) j = grid_.n - 1;
    const double s = pos - j;
    const int j1 = (j + 1) % grid_.n;
    return detail::hermite(y_[static_cast<std::size_t>(j)], y_[static_cast<std::size_t>(j1)],
                           m_[static_cast<std::size_t>(j)], m_[static_cast<std::size_t>(j1)],
                           grid_.dx, s);
  }

  double derivative(double x) const {
    const double L = grid_.length;
    double r = std::fmod(x, L);
    if (r < 0.0) r += L;
    const double pos = r / grid_.dx;
    int j = static_cast<int>(pos);
    if (j >= grid_.n) j = grid_.n - 1;
    const double s = pos - j;
    const int j1 = (j + 1) % grid_.n;
    return detail::hermite_deriv(y_[static_cast<std::size_t>(j)], y_[static_cast<std::size_t>(j1)],
                                 m_[static_cast<std::size_t>(j)], m_[static_cast<std::size_t>(j1)],
                                 grid_.dx, s);
  }

 private:
  Grid1D grid_;
  std::vector<double> y_;
  std::vector<double> m_;
};

/// Monotone interpolant of a circle map gamma with gamma(x + L) = gamma(x) + L,
/// stored through its periodic displacement d(x) = gamma(x) - x. Slopes are
/// Fritsch-Carlson limited so the interpolant stays strictly increasing.
class MonotoneCircleMap {
 public:
  MonotoneCircleMap(const Grid1D& g, const std::vector<double>& displacement)
      : grid_(g), d_(displacement) {
    if (static_cast<int>(d_.size()) != g.n)
      throw std::invalid_argument("MonotoneCircleMap: sample count mismatch");
    const int n = g.n;
    // node values of gamma and secant slopes
    std::vector<double> gamma(static_cast<std::size_t>(n + 1));
    for (int j = 0; j < n; ++j) gamma[static_cast<std::size_t>(j)] = g.node(j) + d_[static_cast<std::size_t>(j)];
    gamma[static_cast<std::size_t>(n)] = g.length + d_[0];
    for (int j = 0; j < n; ++j) {
      if (!(gamma[static_cast<std::size_t>(j + 1)] > gamma[static_cast<std::size_t>(j)]))
        throw std::invalid_argument("MonotoneCircleMap: samples are not strictly increasing");
    }
    m_ = detail::centered_slopes(g, d_);
    for (double& s : m_) s += 1.0;  // slopes of gamma = 1 + d'
    // Fritsch-Carlson limiter against the secants
    for (int j = 0; j < n; ++j) {
      const double delta =
          (gamma[static_cast<std::size_t>(j + 1)] - gamma[static_cast<std::size_t>(j)]) / g.dx;
      const int j1 = (j + 1) % n;
      double& a = m_[static_cast<std::size_t>(j)];
      double& b = m_[static_cast<std::size_t>(j1)];
      if (a < 0.0) a = 0.0;
      if (b < 0.0) b = 0.0;
      const double r2 = (a * a + b * b) / (delta * delta);
      if (r2 > 9.0) {
        const double scale = 3.0 / std::sqrt(r2);
        a *= scale;
        b *= scale;
      }
    }
    y_ = std::move(gamma);
  }

  double operator()(double x) const {
    const double L = grid_.length;
    const double w = std::floor(x / L);
    const double r = x - w * L;
    const double pos = r / grid_.dx;
    int j = static_cast<int>(pos);
    if (j >= grid_.n) j = grid_.n - 1;
    const double s = pos - j;
    const double val = detail::hermite(y_[static_cast<std::size_t>(j)],
                                       y_[static_cast<std::size_t>(j + 1)],
                                       m_[static_cast<std::size_t>(j)],
                                       m_[static_cast<std::size_t>((j + 1) % grid_.n)], grid_.dx, s);
    return val + w * L;
  }

  double derivative(double x) const {
    const double L = grid_.length;
    double r = std::fmod(x, L);
    if (r < 0.0) r += L;
    const double pos = r / grid_.dx;
    int j = static_cast<int>(pos);
    if (j >= grid_.n) j = grid_.n - 1;
    const double s = pos - j;
    return detail::hermite_deriv(y_[static_cast<std::size_t>(j)],
                                 y_[static_cast<std::size_t>(j + 1)],
                                 m_[static_cast<std::size_t>(j)],
                                 m_[static_cast<std::size_t>((j + 1) % grid_.n)], grid_.dx, s);
  }

  /// Solves gamma(y) = x by bracketed Newton iteration; residual <= 1e-12.
  double inverse(double x) const {
    const double L = grid_.length;
    double dmin = d_[0], dmax = d_[0];
    for (double v : d_) {
      dmin = std::min(dmin, v);
      dmax = std::max(dmax, v);
    }
    double lo = x - dmax, hi = x - dmin;
    // the interpolant can overshoot the node extrema of d; widen until the
    // bracket straddles the root
    while ((*this)(lo)-x > 0.0) lo -= grid_.dx;
    while ((*this)(hi)-x < 0.0) hi += grid_.dx;
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = (*this)(y)-x;
      if (std::abs(f) <= 1e-13 * std::max(1.0, std::abs(x))) return y;
      if (f > 0.0)
        hi = y;
      else
        lo = y;
      const double slope = derivative(y);
      double next = slope > 0.0 ? y - f / slope : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      y = next;
    }
    return y;
  }

 private:
  Grid1D grid_;
  std::vector<double> d_;
  std::vector<double> y_;  // gamma at nodes, plus wrap value at index n
  std::vector<double> m_;  // limited slopes of gamma at nodes
};

}  // namespace chlab
