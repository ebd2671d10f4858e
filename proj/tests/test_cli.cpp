#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "chlab/config.hpp"
#include "chlab/csv.hpp"

using namespace chlab;

TEST_CASE("fmt_double round trips and is shortest") {
  CHECK(fmt_double(0.1) == "0.1");
  CHECK(fmt_double(1.0) == "1");
  CHECK(fmt_double(-2.5e-7) == "-2.5e-07");
  CHECK(std::stod(fmt_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("parse_config applies defaults") {
  auto r = parse_config(R"({"command": "simulate"})");
  REQUIRE(r.ok());
  const RunConfig& c = *r.config;
  CHECK(c.command == Command::simulate);
  CHECK(c.grid.n == 256);
  CHECK(c.grid.length == 40.0);
  CHECK(c.dt == 1e-3);
  CHECK(c.T == 1.0);
  CHECK(c.record_every == 100);
  CHECK(c.breaking_threshold == -10.0);
  CHECK_FALSE(c.equation.use_F);
  CHECK(c.equation.kappa == 0.0);
  CHECK(c.initial.name == "gaussian");
}

TEST_CASE("parse_config rejects invalid JSON and non-object roots") {
  CHECK_FALSE(parse_config("not json").ok());
  CHECK_FALSE(parse_config("[1, 2]").ok());
  CHECK_FALSE(parse_config(R"("simulate")").ok());
}

TEST_CASE("parse_config requires a known command") {
  auto r = parse_config(R"({"command": "simulte"})");
  REQUIRE_FALSE(r.ok());
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].find("command") != std::string::npos);
}

TEST_CASE("parse_config rejects unknown keys at every level") {
  auto top = parse_config(R"({"command": "simulate", "grd": {}})");
  REQUIRE_FALSE(top.ok());
  CHECK(top.errors[0].find("unknown key \"grd\"") != std::string::npos);

  auto nested = parse_config(R"({"command": "simulate", "grid": {"n": 64, "lngth": 10}})");
  REQUIRE_FALSE(nested.ok());
  CHECK(nested.errors[0].find("config.grid") != std::string::npos);
  CHECK(nested.errors[0].find("lngth") != std::string::npos);
}

TEST_CASE("parse_config collects every error, not just the first") {
  auto r = parse_config(R"({
    "command": "simulate",
    "grid": {"n": 63, "length": -1},
    "dt": -0.5,
    "record_every": 0
  })");
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors.size() >= 4);
}

TEST_CASE("kappa and F are exclusive coefficient settings") {
  auto r = parse_config(R"({
    "command": "simulate",
    "equation": {"kappa": 0.5, "F": {"offset": 0.5}}
  })");
  REQUIRE_FALSE(r.ok());
  bool found = false;
  for (const auto& e : r.errors)
    if (e.find("exclusive") != std::string::npos) found = true;
  CHECK(found);

  auto kappa_only = parse_config(R"({"command": "simulate", "equation": {"kappa": 0.5}})");
  REQUIRE(kappa_only.ok());
  CHECK_FALSE(kappa_only.config->equation.use_F);
  CHECK(kappa_only.config->equation.kappa == 0.5);

  auto f_only = parse_config(
      R"({"command": "simulate", "equation": {"F": {"offset": 0.2, "amplitude": 0.1, "mode": 2}}})");
  REQUIRE(f_only.ok());
  CHECK(f_only.config->equation.use_F);
  CHECK(f_only.config->equation.F.amplitude == 0.1);
  CHECK(f_only.config->equation.F.mode == 2);
}

TEST_CASE("peakon command requires a peakon block with matched q and p") {
  CHECK_FALSE(parse_config(R"({"command": "peakon"})").ok());
  CHECK_FALSE(
      parse_config(R"({"command": "peakon", "peakon": {"q": [0, 5], "p": [1]}})").ok());
  auto ok = parse_config(
      R"({"command": "peakon", "peakon": {"q": [0, 5], "p": [2, 1], "domain": "box", "length": 60}})");
  REQUIRE(ok.ok());
  CHECK(ok.config->peakon->periodic);
  CHECK(ok.config->peakon->length == 60.0);
  CHECK_FALSE(
      parse_config(R"({"command": "peakon", "peakon": {"q": [0], "p": [1], "domain": "disc"}})")
          .ok());
}

TEST_CASE("wrong types are reported with their path") {
  auto r = parse_config(R"({"command": "simulate", "dt": "fast"})");
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors[0].find("config.dt") != std::string::npos);
}

TEST_CASE("physical block validates regime and positivity") {
  CHECK(parse_config(R"({"command": "scale", "physical": {"regime": "shear", "omega0": 2.0}})")
            .ok());
  CHECK_FALSE(
      parse_config(R"({"command": "scale", "physical": {"regime": "rotational"}})").ok());
  CHECK_FALSE(parse_config(R"({"command": "scale", "physical": {"h0": -1}})").ok());
}

TEST_CASE("sweep expands the cartesian list into child configs") {
  auto r = parse_config(R"({
    "command": "sweep",
    "grid": {"n": 64},
    "sweep": {"command": "simulate", "parameter": "equation.kappa",
              "values": [0, 0.25, 0.5]}
  })");
  REQUIRE(r.ok());
  auto children = expand_sweep(*r.config);
  REQUIRE(children.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& child = children[i];
    CHECK(child["command"] == "simulate");
    CHECK_FALSE(child.contains("sweep"));
    CHECK(child["grid"]["n"] == 64);
    CHECK(child["equation"]["kappa"].get<double>() == 0.25 * static_cast<double>(i));
    auto reparsed = parse_config(child.dump());
    REQUIRE(reparsed.ok());
    CHECK(reparsed.config->equation.kappa == 0.25 * static_cast<double>(i));
  }
}

TEST_CASE("sweep over a top-level scalar works too") {
  auto r = parse_config(R"({
    "command": "sweep",
    "sweep": {"command": "simulate", "parameter": "dt", "values": [0.001, 0.0005]}
  })");
  REQUIRE(r.ok());
  auto children = expand_sweep(*r.config);
  REQUIRE(children.size() == 2);
  CHECK(children[1]["dt"].get<double>() == 0.0005);
}

TEST_CASE("sweep block is validated") {
  CHECK_FALSE(parse_config(R"({"command": "sweep"})").ok());
  CHECK_FALSE(parse_config(R"({
    "command": "sweep",
    "sweep": {"command": "sweep", "parameter": "dt", "values": [0.001]}
  })").ok());
  CHECK_FALSE(parse_config(R"({
    "command": "sweep",
    "sweep": {"command": "simulate", "parameter": "dt", "values": []}
  })").ok());
}

TEST_CASE("build helpers honor the configured equation and initial data") {
  auto r = parse_config(R"({
    "command": "simulate",
    "grid": {"n": 64, "length": 10},
    "equation": {"F": {"offset": 0.3, "amplitude": 0.2, "mode": 1, "phase": 0.5}},
    "initial": {"name": "sine", "amplitude": 0.1, "mode": 2}
  })");
  REQUIRE(r.ok());
  const auto g = Grid1D::make(10.0, 64);
  const CHParams params = build_equation(*r.config, g);
  CHECK_FALSE(params.classic);
  const double k = 2.0 * std::numbers::pi / 10.0;
  for (int j = 0; j < g.n; j += 7) {
    const double expected = 0.3 + 0.2 * std::sin(k * g.node(j) + 0.5);
    CHECK(params.F[static_cast<std::size_t>(j)] == Catch::Approx(expected).margin(1e-14));
  }
  const FieldState u0 = build_initial(*r.config, g);
  CHECK(u0.values[0] == Catch::Approx(0.0).margin(1e-14));
}
