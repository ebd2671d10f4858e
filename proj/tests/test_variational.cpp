#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "chlab/ch_dynamics.hpp"
#include "chlab/diffeo.hpp"
#include "chlab/grid.hpp"
#include "chlab/initial_conditions.hpp"
#include "chlab/spectral.hpp"
#include "chlab/variational.hpp"
#include "chlab/variational_suite.hpp"

using namespace chlab;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sampled(const Grid1D& g, double (*f)(double)) {
  std::vector<double> d(static_cast<std::size_t>(g.n));
  for (int j = 0; j < g.n; ++j) d[static_cast<std::size_t>(j)] = f(g.node(j));
  return d;
}

double max_node_gap(const DiscreteDiffeo& a, const DiscreteDiffeo& b) {
  double m = 0.0;
  for (int j = 0; j < a.grid.n; ++j) m = std::max(m, std::abs(a.gamma_at(j) - b.gamma_at(j)));
  return m;
}

std::vector<double> random_field(const Grid1D& g, std::mt19937_64& rng, double amplitude,
                                 int modes = 3) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> d(static_cast<std::size_t>(g.n), 0.0);
  for (int k = 1; k <= modes; ++k) {
    const double a = amplitude * unit(rng) / k;
    const double b = amplitude * unit(rng) / k;
    for (int j = 0; j < g.n; ++j) {
      const double kx = 2.0 * kPi * k * g.node(j) / g.length;
      d[static_cast<std::size_t>(j)] += a * std::sin(kx) + b * std::cos(kx);
    }
  }
  return d;
}

DiffeoPath rigid_rotation_path(const Grid1D& g, double speed, int m, double T) {
  DiffeoPath path;
  path.grid = g;
  path.t0 = 0.0;
  path.dt = T / m;
  for (int i = 0; i <= m; ++i) {
    std::vector<double> d(static_cast<std::size_t>(g.n), speed * path.dt * i);
    path.slices.push_back(DiscreteDiffeo::from_displacement(g, std::move(d)));
  }
  return path;
}

}  // namespace

TEST_CASE("compose with the identity and with the inverse") {
  Grid1D g = Grid1D::make(2.0 * kPi, 256);
  auto d = sampled(g, [](double x) { return 0.08 * std::sin(x) + 0.015 * std::sin(2.0 * x + 1.0); });
  DiscreteDiffeo a = DiscreteDiffeo::from_displacement(g, d);
  DiscreteDiffeo id = DiscreteDiffeo::identity(g);
  CHECK(max_node_gap(compose(id, a), a) < 1e-13);
  CHECK(max_node_gap(compose(a, id), a) < 1e-12);
  CHECK(max_node_gap(compose(a, invert(a)), id) < 1e-9);
  CHECK(max_node_gap(compose(invert(a), a), id) < 1e-9);
}

TEST_CASE("invert is an involution and handles shifts exactly") {
  Grid1D g = Grid1D::make(2.0 * kPi, 256);
  DiscreteDiffeo id = DiscreteDiffeo::identity(g);
  CHECK(max_node_gap(invert(id), id) < 1e-13);
  DiscreteDiffeo shift =
      DiscreteDiffeo::from_displacement(g, std::vector<double>(static_cast<std::size_t>(g.n), 0.7));
  DiscreteDiffeo ishift = invert(shift);
  for (int j = 0; j < g.n; ++j)
    CHECK(std::abs(ishift.gamma_at(j) - (g.node(j) - 0.7)) < 1e-12);
  auto d = sampled(g, [](double x) { return 0.08 * std::sin(x) + 0.015 * std::sin(2.0 * x + 1.0); });
  DiscreteDiffeo a = DiscreteDiffeo::from_displacement(g, d);
  CHECK(max_node_gap(invert(invert(a)), a) < 1e-9);
}

TEST_CASE("compose is associative within interpolation tolerance") {
  Grid1D g = Grid1D::make(2.0 * kPi, 256);
  auto da = sampled(g, [](double x) { return 0.12 * std::sin(x); });
  auto db = sampled(g, [](double x) { return 0.10 * std::cos(x) + 0.04 * std::sin(2.0 * x); });
  auto dc = sampled(g, [](double x) { return -0.08 * std::sin(x + 0.3); });
  DiscreteDiffeo a = DiscreteDiffeo::from_displacement(g, da);
  DiscreteDiffeo b = DiscreteDiffeo::from_displacement(g, db);
  DiscreteDiffeo c = DiscreteDiffeo::from_displacement(g, dc);
  CHECK(max_node_gap(compose(compose(a, b), c), compose(a, compose(b, c))) < 1e-8);
}

TEST_CASE("non-monotone displacements are rejected") {
  Grid1D g = Grid1D::make(2.0 * kPi, 64);
  auto d = sampled(g, [](double x) { return 1.5 * std::sin(x); });
  CHECK_THROWS_AS(DiscreteDiffeo::from_displacement(g, d), std::invalid_argument);
}

TEST_CASE("eulerian velocity of static and rigid paths") {
  Grid1D g = Grid1D::make(2.0 * kPi, 128);
  DiffeoPath still;
  still.grid = g;
  still.dt = 0.1;
  for (int i = 0; i <= 12; ++i) still.slices.push_back(DiscreteDiffeo::identity(g));
  CHECK(max_abs(eulerian_velocity(still, 6)) < 1e-13);
  DiffeoPath rot = rigid_rotation_path(g, 0.8, 16, 1.6);
  for (int i : {0, 1, 8, 15, 16}) {
    FieldState u = eulerian_velocity(rot, i);
    for (double v : u.values) CHECK(std::abs(v - 0.8) < 1e-10);
  }
}

TEST_CASE("eulerian velocity recovers a manufactured characteristics flow") {
  // gamma(t, x) = x + a(t) sin x solves the characteristics of
  // u(t, x) = a'(t) sin(gamma^{-1}(t, x))
  Grid1D g = Grid1D::make(2.0 * kPi, 128);
  const int m = 48;
  const double T = 1.0;
  auto amp = [](double t) { return 0.2 * std::sin(t); };
  auto damp = [](double t) { return 0.2 * std::cos(t); };
  DiffeoPath path;
  path.grid = g;
  path.dt = T / m;
  for (int i = 0; i <= m; ++i) {
    const double a = amp(path.dt * i);
    std::vector<double> d(static_cast<std::size_t>(g.n));
    for (int j = 0; j < g.n; ++j) d[static_cast<std::size_t>(j)] = a * std::sin(g.node(j));
    path.slices.push_back(DiscreteDiffeo::from_displacement(g, std::move(d)));
  }
  for (int i : {0, 5, 24, 48}) {
    const double t = path.dt * i;
    const double a = amp(t);
    FieldState u = eulerian_velocity(path, i);
    double gap = 0.0;
    for (int j = 0; j < g.n; ++j) {
      const double x = g.node(j);
      double y = x;  // Newton for y + a sin y = x
      for (int it = 0; it < 60; ++it) y -= (y + a * std::sin(y) - x) / (1.0 + a * std::cos(y));
      gap = std::max(gap, std::abs(u.values[static_cast<std::size_t>(j)] - damp(t) * std::sin(y)));
    }
    CHECK(gap < 1e-6);
  }
}

TEST_CASE("variation_inverse special cases") {
  Grid1D g = Grid1D::make(2.0 * kPi, 256);
  DiscreteDiffeo id = DiscreteDiffeo::identity(g);
  auto phi = sampled(g, [](double x) { return 0.3 * std::sin(x) + 0.1 * std::cos(2.0 * x); });
  FieldState v = variation_inverse(id, phi);
  for (int j = 0; j < g.n; ++j)
    CHECK(std::abs(v.values[static_cast<std::size_t>(j)] + phi[static_cast<std::size_t>(j)]) <
          1e-10);
  auto d = sampled(g, [](double x) { return 0.15 * std::sin(x); });
  DiscreteDiffeo a = DiscreteDiffeo::from_displacement(g, d);
  CHECK(max_abs(variation_inverse(a, std::vector<double>(static_cast<std::size_t>(g.n), 0.0))) <
        1e-13);
}

TEST_CASE("variation_inverse matches the epsilon finite-difference oracle") {
  Grid1D g = Grid1D::make(2.0 * kPi, 256);
  std::mt19937_64 rng(101);
  const double eps = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    auto d = random_smooth_displacement(g, rng, 0.25);
    auto phi = random_field(g, rng, 0.3);
    DiscreteDiffeo gamma = DiscreteDiffeo::from_displacement(g, d);
    FieldState v = variation_inverse(gamma, phi);
    std::vector<double> dp = d, dm = d;
    for (int j = 0; j < g.n; ++j) {
      dp[static_cast<std::size_t>(j)] += eps * phi[static_cast<std::size_t>(j)];
      dm[static_cast<std::size_t>(j)] -= eps * phi[static_cast<std::size_t>(j)];
    }
    DiscreteDiffeo ip = invert(DiscreteDiffeo::from_displacement(g, dp));
    DiscreteDiffeo im = invert(DiscreteDiffeo::from_displacement(g, dm));
    double gap = 0.0;
    for (int j = 0; j < g.n; ++j) {
      const double fd = (ip.gamma_at(j) - im.gamma_at(j)) / (2.0 * eps);
      gap = std::max(gap, std::abs(v.values[static_cast<std::size_t>(j)] - fd));
    }
    CHECK(gap < 1e-5);
  }
}

TEST_CASE("variation_velocity special cases") {
  Grid1D g = Grid1D::make(2.0 * kPi, 256);
  DiscreteDiffeo id = DiscreteDiffeo::identity(g);
  std::vector<double> zero(static_cast<std::size_t>(g.n), 0.0);
  auto phi = sampled(g, [](double x) { return 0.3 * std::sin(x); });
  auto phi_t = sampled(g, [](double x) { return 0.2 * std::cos(x) + 0.05 * std::sin(3.0 * x); });
  FieldState v = variation_velocity(id, zero, phi, phi_t);
  for (int j = 0; j < g.n; ++j)
    CHECK(std::abs(v.values[static_cast<std::size_t>(j)] - phi_t[static_cast<std::size_t>(j)]) <
          1e-10);
  // rigid rotation with a frozen perturbation: both terms vanish
  auto d = sampled(g, [](double x) { return 0.1 * std::sin(x); });
  DiscreteDiffeo gamma = DiscreteDiffeo::from_displacement(g, d);
  std::vector<double> rigid(static_cast<std::size_t>(g.n), 0.9);
  CHECK(max_abs(variation_velocity(gamma, rigid, phi, zero)) < 1e-9);
}

TEST_CASE("variation_velocity matches the epsilon finite-difference oracle") {
  Grid1D g = Grid1D::make(2.0 * kPi, 256);
  std::mt19937_64 rng(103);
  const double eps = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    auto d = random_smooth_displacement(g, rng, 0.25);
    auto gamma_t = random_field(g, rng, 0.5);
    auto phi = random_field(g, rng, 0.3);
    auto phi_t = random_field(g, rng, 0.3);
    DiscreteDiffeo gamma = DiscreteDiffeo::from_displacement(g, d);
    FieldState v = variation_velocity(gamma, gamma_t, phi, phi_t);
    auto eulerian = [&](double e) {
      std::vector<double> de = d, gte = gamma_t;
      for (int j = 0; j < g.n; ++j) {
        de[static_cast<std::size_t>(j)] += e * phi[static_cast<std::size_t>(j)];
        gte[static_cast<std::size_t>(j)] += e * phi_t[static_cast<std::size_t>(j)];
      }
      DiscreteDiffeo inv = invert(DiscreteDiffeo::from_displacement(g, de));
      PeriodicField interp(g, gte);
      std::vector<double> out(static_cast<std::size_t>(g.n));
      for (int j = 0; j < g.n; ++j) out[static_cast<std::size_t>(j)] = interp(inv.gamma_at(j));
      return out;
    };
    auto up = eulerian(eps);
    auto um = eulerian(-eps);
    double gap = 0.0;
    for (int j = 0; j < g.n; ++j) {
      const double fd =
          (up[static_cast<std::size_t>(j)] - um[static_cast<std::size_t>(j)]) / (2.0 * eps);
      gap = std::max(gap, std::abs(v.values[static_cast<std::size_t>(j)] - fd));
    }
    CHECK(gap < 1e-5);
  }
}

TEST_CASE("variation_velocity_gradient: oracle and commutation") {
  Grid1D g = Grid1D::make(2.0 * kPi, 256);
  std::mt19937_64 rng(107);
  const double eps = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    auto d = random_smooth_displacement(g, rng, 0.25);
    auto gamma_t = random_field(g, rng, 0.5);
    auto phi = random_field(g, rng, 0.3);
    auto phi_t = random_field(g, rng, 0.3);
    DiscreteDiffeo gamma = DiscreteDiffeo::from_displacement(g, d);
    FieldState w = variation_velocity_gradient(gamma, gamma_t, phi, phi_t);
    // commutation with the x-derivative of the velocity variation
    FieldState v = variation_velocity(gamma, gamma_t, phi, phi_t);
    CHECK(max_abs_diff(deriv(v, 1), w) < 1e-7);
    // finite differences of the perturbed velocity gradient
    auto eulerian_x = [&](double e) {
      std::vector<double> de = d, gte = gamma_t;
      for (int j = 0; j < g.n; ++j) {
        de[static_cast<std::size_t>(j)] += e * phi[static_cast<std::size_t>(j)];
        gte[static_cast<std::size_t>(j)] += e * phi_t[static_cast<std::size_t>(j)];
      }
      DiscreteDiffeo inv = invert(DiscreteDiffeo::from_displacement(g, de));
      PeriodicField interp(g, gte);
      FieldState u = make_field(g);
      for (int j = 0; j < g.n; ++j)
        u.values[static_cast<std::size_t>(j)] = interp(inv.gamma_at(j));
      return deriv(u, 1);
    };
    FieldState up = eulerian_x(eps);
    FieldState um = eulerian_x(-eps);
    double gap = 0.0;
    for (int j = 0; j < g.n; ++j) {
      const double fd = (up.values[static_cast<std::size_t>(j)] -
                         um.values[static_cast<std::size_t>(j)]) /
                        (2.0 * eps);
      gap = std::max(gap, std::abs(w.values[static_cast<std::size_t>(j)] - fd));
    }
    CHECK(gap < 1e-4);
  }
}

TEST_CASE("discrete_action closed forms") {
  Grid1D g = Grid1D::make(2.0 * kPi, 128);
  const double T = 1.6, c = 0.8, c0 = 0.5;
  DiffeoPath still;
  still.grid = g;
  still.dt = T / 16;
  for (int i = 0; i <= 16; ++i) still.slices.push_back(DiscreteDiffeo::identity(g));
  CHECK(std::abs(discrete_action(still, ActionOffset::zero(g))) < 1e-12);
  DiffeoPath rot = rigid_rotation_path(g, c, 16, T);
  const double L = g.length;
  CHECK(discrete_action(rot, ActionOffset::zero(g)) ==
        Catch::Approx(0.5 * T * L * c * c).epsilon(1e-9));
  CHECK(discrete_action(rot, ActionOffset::constant(g, c0)) ==
        Catch::Approx(0.5 * T * L * (c + c0) * (c + c0)).epsilon(1e-9));
}

TEST_CASE("gateaux_action of the zero perturbation vanishes") {
  Grid1D g = Grid1D::make(2.0 * kPi, 128);
  std::mt19937_64 rng(211);
  DiffeoPath path = random_smooth_path(g, 16, 1.0, rng);
  Perturbation zero;
  zero.disp.assign(path.slices.size(), std::vector<double>(static_cast<std::size_t>(g.n), 0.0));
  GateauxResult r = gateaux_action(path, zero, ActionOffset::zero(g));
  CHECK(std::abs(r.value) < 1e-10);
}

TEST_CASE("the action and velocity are right-invariant") {
  Grid1D g = Grid1D::make(2.0 * kPi, 512);
  std::mt19937_64 rng(223);
  const int m = 16;
  DiffeoPath path = random_smooth_path(g, m, 1.0, rng, 0.18);
  ActionOffset offset = ActionOffset::constant(g, 0.4);
  const double a0 = discrete_action(path, offset);
  for (int trial = 0; trial < 5; ++trial) {
    auto dpsi = random_smooth_displacement(g, rng, 0.12, 2);
    DiscreteDiffeo psi = DiscreteDiffeo::from_displacement(g, dpsi);
    DiffeoPath moved;
    moved.grid = g;
    moved.t0 = path.t0;
    moved.dt = path.dt;
    for (const auto& s : path.slices) moved.slices.push_back(compose(s, psi));
    CHECK(std::abs(discrete_action(moved, offset) - a0) < 1e-8 * std::max(1.0, std::abs(a0)));
    FieldState u0 = eulerian_velocity(path, m / 2);
    FieldState u1 = eulerian_velocity(moved, m / 2);
    CHECK(max_abs_diff(u0, u1) < 1e-8);
  }
}

TEST_CASE("el_residual closed forms") {
  Grid1D g = Grid1D::make(2.0 * kPi, 128);
  const double c = 0.7;
  std::vector<FieldState> series;
  for (int i = 0; i <= 8; ++i) {
    FieldState u = ic_constant(g, c);
    u.time = 0.01 * i;
    series.push_back(u);
  }
  // constant state against a constant offset: residual is identically zero
  auto R0 = el_residual(series, 0.01, ActionOffset::constant(g, 0.3));
  for (const auto& r : R0) CHECK(max_abs(r) < 1e-11);
  // constant state against F = sin x: residual is c F'(x) = c cos x
  auto cF = sample_field(g, [](double x) { return std::sin(x); }).values;
  auto R1 = el_residual(series, 0.01, ActionOffset::samples(g, cF));
  for (const auto& r : R1) {
    double gap = 0.0;
    for (int j = 0; j < g.n; ++j)
      gap = std::max(gap, std::abs(r.values[static_cast<std::size_t>(j)] -
                                   c * std::cos(g.node(j))));
    CHECK(gap < 1e-11);
  }
  CHECK_THROWS_AS(el_residual({series[0], series[1]}, 0.01, ActionOffset::zero(g)),
                  std::invalid_argument);
}

TEST_CASE("el_residual is small along a simulated trajectory") {
  Grid1D g = Grid1D::make(2.0 * kPi, 128);
  const double kappa = 0.3, dt = 5e-3;
  CHParams params = CHParams::constant(g, kappa);
  FieldState u0 = ic_sine(g, 0.1, 1);
  SimResult res = simulate(u0, params, dt, 0.1, 1);
  REQUIRE_FALSE(res.aborted);
  auto R = el_residual(res.trajectory, dt, ActionOffset::constant(g, kappa));
  for (const auto& r : R) CHECK(max_abs(r) < 1e-5);
}

TEST_CASE("identity_check is trivial on a static path") {
  Grid1D g = Grid1D::make(2.0 * kPi, 128);
  const int m = 16;
  DiffeoPath still;
  still.grid = g;
  still.dt = 0.05;
  for (int i = 0; i <= m; ++i) still.slices.push_back(DiscreteDiffeo::identity(g));
  std::mt19937_64 rng(307);
  Perturbation pert = random_perturbation(still, rng);
  IdentityReport rep = identity_check(still, pert, ActionOffset::zero(g));
  CHECK(std::abs(rep.lhs) < 1e-9);
  CHECK(std::abs(rep.rhs) < 1e-12);
}

TEST_CASE("the first-variation identity holds and converges at 4th order") {
  Grid1D g = Grid1D::make(2.0 * kPi, 128);
  auto rows = identity_resolution_table(g, "constant", ActionOffset::constant(g, 0.7),
                                        {16, 32, 64}, 1.0, 424242);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].gap < 1e-4);
  // at least 4th-order decrease per doubling, with slack for prefactors
  CHECK(rows[1].gap < rows[0].gap / 8.0);
  CHECK(rows[2].gap < rows[1].gap / 8.0);
}

TEST_CASE("a path of characteristics of a CH solution is a critical point") {
  // u = const solves the classic equation; its flow is a rigid rotation
  Grid1D g = Grid1D::make(2.0 * kPi, 128);
  const double c = 0.6, kappa = 0.25;
  DiffeoPath rot = rigid_rotation_path(g, c, 32, 1.0);
  std::mt19937_64 rng(311);
  Perturbation pert = random_perturbation(rot, rng);
  GateauxResult r = gateaux_action(rot, pert, ActionOffset::constant(g, kappa));
  CHECK(std::abs(r.value) < 1e-6);
}

TEST_CASE("perturbations with nonzero endpoints are rejected") {
  Grid1D g = Grid1D::make(2.0 * kPi, 128);
  DiffeoPath rot = rigid_rotation_path(g, 0.5, 16, 1.0);
  Perturbation bad;
  bad.disp.assign(rot.slices.size(), std::vector<double>(static_cast<std::size_t>(g.n), 0.0));
  bad.disp.back()[3] = 1e-3;
  CHECK_THROWS_AS(bad.validate(rot), std::invalid_argument);
  CHECK_THROWS_AS(gateaux_action(rot, bad, ActionOffset::zero(g)), std::invalid_argument);
}
