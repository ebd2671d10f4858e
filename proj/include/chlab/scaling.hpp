#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "chlab/grid.hpp"
#include "chlab/spectral.hpp"

namespace chlab {

enum class Regime { irrotational, shear, arbitrary };

/// Dimensional water-wave constants (SI units).
struct PhysicalParams {
  double g = 9.81;        // gravity, m/s^2
  double h0 = 1.0;        // mean depth, m
  double a = 0.1;         // wave amplitude, m
  double lambda = 10.0;   // wavelength, m
  double omega0 = 0.0;    // constant vorticity, 1/s
  double c0 = 0.0;        // integration constant, dimensionless
  double rho = 1000.0;    // density, kg/m^3
  double p0 = 101325.0;   // atmospheric pressure, Pa

  void validate() const {
    if (!(g > 0.0 && h0 > 0.0 && a > 0.0 && lambda > 0.0 && rho > 0.0))
      throw std::invalid_argument("PhysicalParams: g, h0, a, lambda, rho must be positive");
  }
};

struct ScaleParams {
  double eps = 0.0;    // a / h0
  double delta = 0.0;  // h0 / lambda
};

inline ScaleParams scale_params(const PhysicalParams& p) {
  p.validate();
  return ScaleParams{p.a / p.h0, p.h0 / p.lambda};
}

/// Which variable set a flow sample lives in. A record never mixes phases.
enum class Phase { dimensional, nondimensional, eps_scaled, long_wave };

struct FlowSample {
  double x = 0.0;
  double z = 0.0;
  double t = 0.0;
  double u = 0.0;
  double v = 0.0;
  double eta = 0.0;
  double pressure = 0.0;
  Phase phase = Phase::dimensional;
};

/// Nondimensionalization: x/lambda, z/h0, eta/a, t sqrt(g h0)/lambda,
/// u/sqrt(g h0), v lambda/(h0 sqrt(g h0)); pressure measured against the
/// hydrostatic profile p0 + rho g h0 (1 - z) in units of rho g h0.
inline FlowSample nondim_map(const PhysicalParams& p, const FlowSample& s) {
  p.validate();
  if (s.phase != Phase::dimensional)
    throw std::invalid_argument("nondim_map: sample must be dimensional");
  const double c = std::sqrt(p.g * p.h0);
  FlowSample out;
  out.x = s.x / p.lambda;
  out.z = s.z / p.h0;
  out.t = s.t * c / p.lambda;
  out.eta = s.eta / p.a;
  out.u = s.u / c;
  out.v = s.v * p.lambda / (p.h0 * c);
  out.pressure = (s.pressure - p.p0 - p.rho * p.g * p.h0 * (1.0 - out.z)) / (p.rho * p.g * p.h0);
  out.phase = Phase::nondimensional;
  return out;
}

inline FlowSample redim_map(const PhysicalParams& p, const FlowSample& s) {
  p.validate();
  if (s.phase != Phase::nondimensional)
    throw std::invalid_argument("redim_map: sample must be nondimensional");
  const double c = std::sqrt(p.g * p.h0);
  FlowSample out;
  out.x = s.x * p.lambda;
  out.z = s.z * p.h0;
  out.t = s.t * p.lambda / c;
  out.eta = s.eta * p.a;
  out.u = s.u * c;
  out.v = s.v * p.h0 * c / p.lambda;
  out.pressure = p.p0 + p.rho * p.g * p.h0 * (1.0 - s.z) + p.rho * p.g * p.h0 * s.pressure;
  out.phase = Phase::dimensional;
  return out;
}

/// Amplitude scaling p -> eps p, (u, v) -> eps (u, v): the scaled variables
/// are the stored ones divided by eps.
inline FlowSample eps_scale(const FlowSample& s, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps_scale: eps must be positive");
  if (s.phase != Phase::nondimensional)
    throw std::invalid_argument("eps_scale: sample must be nondimensional");
  FlowSample out = s;
  out.u = s.u / eps;
  out.v = s.v / eps;
  out.pressure = s.pressure / eps;
  out.phase = Phase::eps_scaled;
  return out;
}

inline FlowSample eps_unscale(const FlowSample& s, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps_unscale: eps must be positive");
  if (s.phase != Phase::eps_scaled)
    throw std::invalid_argument("eps_unscale: sample must be eps_scaled");
  FlowSample out = s;
  out.u = s.u * eps;
  out.v = s.v * eps;
  out.pressure = s.pressure * eps;
  out.phase = Phase::nondimensional;
  return out;
}

/// Removes delta from the system: x and t shrink by delta/sqrt(eps), v grows
/// by sqrt(eps)/delta; afterwards eps stands where delta^2 stood.
inline FlowSample delta_removal(const FlowSample& s, double eps, double delta) {
  if (!(eps > 0.0 && delta > 0.0))
    throw std::invalid_argument("delta_removal: eps and delta must be positive");
  if (s.phase != Phase::eps_scaled)
    throw std::invalid_argument("delta_removal: sample must be eps_scaled");
  const double r = std::sqrt(eps) / delta;
  FlowSample out = s;
  out.x = s.x / r;
  out.t = s.t / r;
  out.v = s.v * r;
  out.phase = Phase::long_wave;
  return out;
}

inline FlowSample delta_restore(const FlowSample& s, double eps, double delta) {
  if (!(eps > 0.0 && delta > 0.0))
    throw std::invalid_argument("delta_restore: eps and delta must be positive");
  if (s.phase != Phase::long_wave)
    throw std::invalid_argument("delta_restore: sample must be long_wave");
  const double r = std::sqrt(eps) / delta;
  FlowSample out = s;
  out.x = s.x * r;
  out.t = s.t * r;
  out.v = s.v / r;
  out.phase = Phase::eps_scaled;
  return out;
}

/// kappa of the resulting Camassa-Holm equation: c0 for irrotational flow,
/// omega0 sqrt(g h0)/g + c0 for linear shear. The arbitrary regime has a
/// spatial coefficient F(x) instead of a scalar.
inline double compute_kappa(Regime regime, const PhysicalParams& p) {
  p.validate();
  switch (regime) {
    case Regime::irrotational:
      return p.c0;
    case Regime::shear:
      return p.omega0 * std::sqrt(p.g * p.h0) / p.g + p.c0;
    case Regime::arbitrary:
      throw std::invalid_argument(
          "compute_kappa: arbitrary regime yields a spatial coefficient, not a scalar kappa");
  }
  throw std::invalid_argument("compute_kappa: unknown regime");
}

/// Right-moving surface profile f and its derivatives, eta(x,t) = f(x - t).
struct WaveProfile {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
};

inline WaveProfile sine_profile(double amplitude, double k = 1.0) {
  return WaveProfile{
      [=](double s) { return amplitude * std::sin(k * s); },
      [=](double s) { return amplitude * k * std::cos(k * s); },
      [=](double s) { return -amplitude * k * k * std::sin(k * s); },
  };
}

/// Gaussian bump, periodically negligible tails assumed on the working box.
inline WaveProfile gaussian_profile(double amplitude, double center, double width) {
  return WaveProfile{
      [=](double s) { return amplitude * std::exp(-0.5 * (s - center) * (s - center) / (width * width)); },
      [=](double s) {
        const double d = (s - center) / (width * width);
        return -amplitude * d * std::exp(-0.5 * (s - center) * (s - center) / (width * width));
      },
      [=](double s) {
        const double r = (s - center);
        const double w2 = width * width;
        return amplitude * (r * r / (w2 * w2) - 1.0 / w2) *
               std::exp(-0.5 * r * r / w2);
      },
  };
}

/// Background coefficient surfaces for the arbitrary regime: F(x,z) and its
/// x-derivative.
struct CoefficientField {
  std::function<double(double, double)> F;
  std::function<double(double, double)> Fx;
};

namespace detail {

// 32-node Gauss-Legendre rule on [0, 1].
inline constexpr std::array<std::array<double, 2>, 32> kGauss32 = {{
    {1.36806907525921506e-03, 3.50930500473464919e-03},
    {7.19424422736580915e-03, 8.13719736545298264e-03},
    {1.76188722062468051e-02, 1.26960326546312133e-02},
    {3.25469620311301666e-02, 1.71369314565108129e-02},
    {5.18394221169738989e-02, 2.14179490111132131e-02},
    {7.53161931337150148e-02, 2.54990296311881220e-02},
    {1.02758102016028807e-01, 2.93420467392678519e-02},
    {1.33908940629855144e-01, 3.29111113881808762e-02},
    {1.68477866534892384e-01, 3.61728970544242245e-02},
    {2.06142121379618848e-01, 3.90969478935351555e-02},
    {2.46550045533885320e-01, 4.16559621134734229e-02},
    {2.89324361934682361e-01, 4.38260465022019541e-02},
    {3.34065698858936166e-01, 4.55869393478819315e-02},
    {3.80356318873931454e-01, 4.69221995404022832e-02},
    {4.27764019208601742e-01, 4.78193600396374166e-02},
    {4.75846167156130817e-01, 4.82700442573639060e-02},
    {5.24153832843869183e-01, 4.82700442573639060e-02},
    {5.72235980791398258e-01, 4.78193600396374166e-02},
    {6.19643681126068491e-01, 4.69221995404022832e-02},
    {6.65934301141063889e-01, 4.55869393478819315e-02},
    {7.10675638065317639e-01, 4.38260465022019541e-02},
    {7.53449954466114624e-01, 4.16559621134734229e-02},
    {7.93857878620381152e-01, 3.90969478935351555e-02},
    {8.31522133465107616e-01, 3.61728970544242245e-02},
    {8.66091059370144856e-01, 3.29111113881808762e-02},
    {8.97241897983971137e-01, 2.93420467392678519e-02},
    {9.24683806866285041e-01, 2.54990296311881220e-02},
    {9.48160577883026101e-01, 2.14179490111132131e-02},
    {9.67453037968869833e-01, 1.71369314565108129e-02},
    {9.82381127793753195e-01, 1.26960326546312133e-02},
    {9.92805755772634191e-01, 8.13719736545298264e-03},
    {9.98631930924740785e-01, 3.50930500473464919e-03},
}};

template <class F>
double gauss32(F&& f, double lo, double hi) {
  const double span = hi - lo;
  double s = 0.0;
  for (const auto& nw : kGauss32) s += nw[1] * f(lo + span * nw[0]);
  return s * span;
}

}  // namespace detail

/// G(x,z) = int_0^z F_x(x, s) ds in the G(x,0) = 0 gauge.
inline double coefficient_stream(const CoefficientField& c, double x, double z) {
  if (z == 0.0) return 0.0;
  return detail::gauss32([&](double s) { return c.Fx(x, s); }, 0.0, z);
}

struct LinearSample {
  double eta = 0.0;
  double u = 0.0;
  double v = 0.0;
};

/// Linearized background-flow solution at (x, z, t): eta = f(x - t) with
/// u, v per regime. The arbitrary regime requires the closure G(x,1) = G(x,0).
inline LinearSample linear_solution(Regime regime, const WaveProfile& prof, double x, double z,
                                    double t, const PhysicalParams& p,
                                    const CoefficientField* coeffs = nullptr) {
  if (z < 0.0 || z > 1.0) throw std::invalid_argument("linear_solution: z must be in [0, 1]");
  LinearSample s;
  const double xi = x - t;
  s.eta = prof.f(xi);
  const double eta_x = prof.df(xi);
  switch (regime) {
    case Regime::irrotational:
      s.u = s.eta + p.c0;
      s.v = -z * eta_x;
      break;
    case Regime::shear:
      s.u = s.eta + p.omega0 * std::sqrt(p.g * p.h0) / p.g * z + p.c0;
      s.v = -z * eta_x;
      break;
    case Regime::arbitrary: {
      if (coeffs == nullptr)
        throw std::invalid_argument("linear_solution: arbitrary regime needs coefficients");
      const double closure = coefficient_stream(*coeffs, x, 1.0);
      if (std::abs(closure) > 1e-8)
        throw std::invalid_argument(
            "linear_solution: coefficient F incompatible with the bottom/surface kinematics "
            "(G(x,1) != G(x,0))");
      s.u = s.eta + coeffs->F(x, z);
      s.v = -z * eta_x - coefficient_stream(*coeffs, x, z);
      break;
    }
  }
  return s;
}

/// The fields entering the linear system, as closed-form functions.
struct LinearFields {
  std::function<double(double, double)> eta;            // (x, t)
  std::function<double(double, double)> eta_t;          // (x, t)
  std::function<double(double, double, double)> u;      // (x, z, t)
  std::function<double(double, double, double)> u_t;    // (x, z, t)
  std::function<double(double, double, double)> v;      // (x, z, t)
  std::function<double(double, double, double)> v_z;    // (x, z, t); optional, FD fallback
  std::function<double(double, double, double)> p;      // (x, z, t), = eta for all z
};

inline LinearFields make_linear_fields(Regime regime, const WaveProfile& prof,
                                       const PhysicalParams& params,
                                       const CoefficientField* coeffs = nullptr) {
  LinearFields lf;
  lf.eta = [prof](double x, double t) { return prof.f(x - t); };
  lf.eta_t = [prof](double x, double t) { return -prof.df(x - t); };
  lf.u = [=](double x, double z, double t) {
    return linear_solution(regime, prof, x, z, t, params, coeffs).u;
  };
  lf.u_t = [prof](double x, double /*z*/, double t) { return -prof.df(x - t); };
  lf.v = [=](double x, double z, double t) {
    return linear_solution(regime, prof, x, z, t, params, coeffs).v;
  };
  lf.v_z = [=](double x, double z, double t) {
    double vz = -prof.df(x - t);
    if (regime == Regime::arbitrary) vz -= coeffs->Fx(x, z);
    return vz;
  };
  lf.p = [prof](double x, double /*z*/, double t) { return prof.f(x - t); };
  return lf;
}

/// Max-abs residuals of the linearized governing system.
struct ResidualReport {
  double euler_x = 0.0;            // u_t + p_x
  double euler_z = 0.0;            // p_z
  double mass = 0.0;               // u_x + v_z
  double surface_kinematic = 0.0;  // v - eta_t on z = 1
  double surface_dynamic = 0.0;    // p - eta on z = 1
  double bottom = 0.0;             // v on z = 0

  double max() const {
    return std::max({euler_x, euler_z, mass, surface_kinematic, surface_dynamic, bottom});
  }
};

/// Residuals evaluated on an x-grid (spectral x-derivatives) at the given z
/// and t samples; z-derivatives by central differences.
inline ResidualReport verify_linear_system(const LinearFields& lf, const Grid1D& xgrid,
                                           std::span<const double> zs,
                                           std::span<const double> ts) {
  ResidualReport rep;
  const double hz = 1e-4;
  for (double t : ts) {
    FieldState eta = sample_field(xgrid, [&](double x) { return lf.eta(x, t); }, t);
    FieldState eta_x = deriv(eta, 1);
    for (double z : zs) {
      FieldState u = sample_field(xgrid, [&](double x) { return lf.u(x, z, t); }, t);
      FieldState u_x = deriv(u, 1);
      FieldState px = sample_field(xgrid, [&](double x) { return lf.p(x, z, t); }, t);
      FieldState p_x = deriv(px, 1);
      for (int j = 0; j < xgrid.n; ++j) {
        const double x = xgrid.node(j);
        const std::size_t js = static_cast<std::size_t>(j);
        rep.euler_x = std::max(rep.euler_x, std::abs(lf.u_t(x, z, t) + p_x.values[js]));
        const double zlo = std::max(0.0, z - hz), zhi = std::min(1.0, z + hz);
        const double p_z = (lf.p(x, zhi, t) - lf.p(x, zlo, t)) / (zhi - zlo);
        rep.euler_z = std::max(rep.euler_z, std::abs(p_z));
        const double v_z = lf.v_z ? lf.v_z(x, z, t)
                                  : (lf.v(x, zhi, t) - lf.v(x, zlo, t)) / (zhi - zlo);
        rep.mass = std::max(rep.mass, std::abs(u_x.values[js] + v_z));
      }
    }
    for (int j = 0; j < xgrid.n; ++j) {
      const double x = xgrid.node(j);
      rep.surface_kinematic =
          std::max(rep.surface_kinematic, std::abs(lf.v(x, 1.0, t) - lf.eta_t(x, t)));
      rep.surface_dynamic =
          std::max(rep.surface_dynamic, std::abs(lf.p(x, 1.0, t) - lf.eta(x, t)));
      rep.bottom = std::max(rep.bottom, std::abs(lf.v(x, 0.0, t)));
    }
  }
  return rep;
}

}  // namespace chlab
