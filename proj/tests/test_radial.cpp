#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lef/errors.hpp"
#include "lef/radial.hpp"

using namespace lef;

TEST_CASE("ball solution: Nehari identity, endpoint, positivity") {
  const auto w = solve_ball(3.0, 1.0);
  const auto e = radial_energy(w, 3.0);
  CHECK(e.nehari_residual() < 1e-6);
  CHECK(std::abs(w.u.back()) < 1e-10);
  for (std::size_t k = 0; k + 1 < w.size(); ++k) CHECK(w.u[k] > 0.0);
  CHECK(ode_residual(w, 3.0) < 1e-8);
}

TEST_CASE("ball similarity scaling") {
  const auto w1 = solve_ball(3.0, 1.0);
  const auto w2 = solve_ball(3.0, 2.0);
  CHECK(w2.u.front() == doctest::Approx(w1.u.front() / 2.0).epsilon(1e-12));
  CHECK(w2.value_at(1.0) == doctest::Approx(w1.value_at(0.5) / 2.0).epsilon(1e-9));
}

TEST_CASE("ball amplitude at large p approaches sqrt(e)") {
  // Independent check of the limit: a fresh solve at p = 400 is closer still.
  const double a100 = solve_ball(100.0, 1.0).max_value();
  CHECK(std::abs(a100 - std::sqrt(std::exp(1.0))) / std::sqrt(std::exp(1.0)) < 0.05);
  const double a400 = solve_ball(400.0, 1.0).max_value();
  CHECK(std::abs(a400 - std::sqrt(std::exp(1.0))) < std::abs(a100 - std::sqrt(std::exp(1.0))));
}

TEST_CASE("ball rejects bad input") {
  CHECK_THROWS_AS(solve_ball(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_ball(3.0, -1.0), std::invalid_argument);
}

TEST_CASE("annulus solution") {
  const auto u = solve_annulus(3.0, 0.1, 1.0);
  const auto e = radial_energy(u, 3.0);
  CHECK(e.nehari_residual() < 1e-6);
  CHECK(std::abs(u.u.front()) < 1e-10 * u.max_value());
  CHECK(std::abs(u.u.back()) < 1e-10 * u.max_value());
  for (std::size_t k = 1; k + 1 < u.size(); ++k) CHECK(u.u[k] > 0.0);
  const double rstar = u.argmax();
  CHECK(rstar > 0.1);
  CHECK(rstar < 1.0);
  CHECK(std::abs(u.derivative_at(rstar)) < 1e-3 * u.max_value() / (1.0 - 0.1));
  CHECK(ode_residual(u, 3.0) < 1e-8);
}

TEST_CASE("thin annulus at p = 5") {
  const double a = std::exp(-5.0 * 0.2);
  const auto u = solve_annulus(5.0, a, 0.5);
  CHECK(u.r_in == doctest::Approx(a));
  CHECK(radial_energy(u, 5.0).nehari_residual() < 1e-6);
}

TEST_CASE("scaled ball solution") {
  const double p = 20.0, alpha = 0.2;
  const auto w = solve_ball(p, 1.0);
  const auto same = build_ball_solution_scaled(p, 0.0);
  CHECK(same.u == w.u);
  const auto u2 = build_ball_solution_scaled(p, alpha);
  const double direct = radial_energy(u2, p).grad_norm_sq;
  const double ident = std::exp(4.0 * alpha * p / (p - 1.0)) * radial_energy(w, p).grad_norm_sq;
  CHECK(std::abs(direct - ident) / ident < 1e-10);
  CHECK(scaled_ball_energy(radial_energy(w, p), alpha).grad_norm_sq == doctest::Approx(direct).epsilon(1e-10));
  CHECK_THROWS_AS(build_ball_solution_scaled(200.0, 4.0), std::invalid_argument);
}

TEST_CASE("omega test function") {
  const auto w = omega_test_function(10.0, 1.0, 1.0);
  CHECK(w.u.front() == 0.0);
  CHECK(w.u.back() == 0.0);
  CHECK(w.max_value() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w.argmax() == doctest::Approx(std::exp(-5.0)).epsilon(1e-12));
  const double g = radial_energy(w, 10.0).grad_norm_sq;
  CHECK(std::abs(g - 8.0 * std::numbers::pi / 10.0) / (8.0 * std::numbers::pi / 10.0) < 1e-6);
  CHECK_THROWS_AS(omega_test_function(10.0, 1.0, std::exp(-11.0)), std::invalid_argument);
}

TEST_CASE("simpson is exact for quadratics on nonuniform grids") {
  std::vector<double> x{0.0, 0.1, 0.35, 0.4, 0.8, 1.0}, y;
  for (double t : x) y.push_back(t * t - 2 * t + 1);
  CHECK(simpson(x, y) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("nodal radial solution") {
  const auto u = solve_ball_nodal(8.0, 1.0, 2);
  int changes = 0;
  for (std::size_t k = 1; k < u.size(); ++k)
    if (u.u[k] * u.u[k - 1] < 0.0) ++changes;
  CHECK(changes == 1);
  CHECK(radial_energy(u, 8.0).nehari_residual() < 1e-6);
}
