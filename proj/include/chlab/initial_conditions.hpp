#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "chlab/grid.hpp"
#include "chlab/peakon.hpp"
#include "chlab/spectral.hpp"

namespace chlab {

inline FieldState ic_constant(const Grid1D& g, double value) {
  return sample_field(g, [=](double) { return value; });
}

inline FieldState ic_gaussian(const Grid1D& g, double amplitude, double center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("ic_gaussian: width must be positive");
  return sample_field(g, [=](double x) {
    // nearest periodic image
    double d = x - center;
    d -= g.length * std::round(d / g.length);
    return amplitude * std::exp(-0.5 * d * d / (width * width));
  });
}

inline FieldState ic_sine(const Grid1D& g, double amplitude, int mode, double phase = 0.0) {
  if (mode < 1) throw std::invalid_argument("ic_sine: mode must be >= 1");
  const double k = 2.0 * std::numbers::pi * mode / g.length;
  return sample_field(g, [=](double x) { return amplitude * std::sin(k * x + phase); });
}

/// Two peakons mollified by a Gaussian of width mollify_dx grid cells
/// (>= 4 cells keeps the peaks spectrally representable).
inline FieldState ic_peakon_pair(const Grid1D& g, double p1, double q1, double p2, double q2,
                                 double mollify_dx = 4.0) {
  if (mollify_dx < 4.0)
    throw std::invalid_argument("ic_peakon_pair: mollification width must be >= 4 grid cells");
  PeakonState s{{q1, q2}, {p1, p2}, 0.0};
  FieldState u = peakon_field(s, g, PeakonDomain::box(g.length));
  return mollify_gaussian(u, mollify_dx * g.dx);
}

}  // namespace chlab
