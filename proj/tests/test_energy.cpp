#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lef/energy.hpp"
#include "lef/radial.hpp"

using namespace lef;

namespace {
GridPtr disk_grid(int n_r = 64, int n_theta = 32) { return Grid::polar(DomainSpec::disk(1.0), n_r, n_theta); }

ScalarField smooth_random(const GridPtr& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  const double a = c(rng), b = c(rng), d = c(rng), e = c(rng);
  return sample_field(grid, [=](Point x) {
    const double r2 = x.x * x.x + x.y * x.y;
    return (1.0 - r2) * (a + b * x.x + d * x.y + e * x.x * x.y + 0.3 * std::sin(5.0 * a * x.x));
  });
}
}  // namespace

TEST_CASE("field energy basics") {
  auto grid = disk_grid();
  const auto zero = field_energy(ScalarField(grid), 3.0);
  CHECK(zero.grad_norm_sq == 0.0);
  CHECK(zero.lp1_norm_pow == 0.0);
  CHECK(zero.energy == 0.0);

  std::mt19937_64 rng(11);
  const auto v = smooth_random(grid, rng);
  const auto e1 = field_energy(v, 3.0);
  const auto e2 = field_energy(2.0 * v, 3.0);
  CHECK(e2.grad_norm_sq == doctest::Approx(4.0 * e1.grad_norm_sq).epsilon(1e-14));

  // E(tv) from the homogeneous parts of E(v).
  for (double t : {0.3, -1.7, 2.5}) {
    const double p = 5.0;
    const auto base = field_energy(v, p);
    const double expect = t * t * base.grad_norm_sq / 2.0 - std::pow(std::abs(t), p + 1) * base.lp1_norm_pow / (p + 1);
    CHECK(field_energy(t * v, p).energy == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("sampled ball solution matches the 1D energy") {
  const double p = 3.0;
  const auto w = solve_ball(p, 1.0);
  const auto ref = radial_energy(w, p);
  double prev_err = 1.0;
  for (int n : {64, 128, 256}) {
    auto grid = Grid::polar(DomainSpec::disk(1.0), n, 64);
    const auto e = field_energy(to_field(w, grid), p);
    const double err = std::abs(e.energy - ref.energy) / ref.energy;
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 0.01);
}

TEST_CASE("Nehari projection") {
  auto grid = disk_grid();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pd(2.0, 12.0);
  for (int k = 0; k < 100; ++k) {
    const double p = pd(rng);
    const auto v = smooth_random(grid, rng);
    const auto [u, t] = nehari_project(v, p);
    CHECK(field_energy(u, p).nehari_residual() < 1e-10);
    // Idempotent, and the image of a ray does not depend on the point on it.
    CHECK(nehari_project(u, p).second == doctest::Approx(1.0).epsilon(1e-10));
    const auto [u2, t2] = nehari_project(2.0 * v, p);
    CHECK(2.0 * t2 == doctest::Approx(t).epsilon(1e-12));
    double diff = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) diff = std::max(diff, std::abs(u[i] - u2[i]));
    CHECK(diff <= 1e-12 * u.sup_norm());
  }
  CHECK_THROWS_AS(nehari_project(ScalarField(grid), 3.0), std::invalid_argument);
}

TEST_CASE("energy of two disjoint pieces") {
  const double p = 6.0;
  auto grid = disk_grid(96, 32);
  // Inner bump on r < 0.4, outer ring on 0.5 < r < 1: a full ring of zero nodes separates them.
  auto inner = sample_field(grid, [](Point x) {
    const double r = norm(x);
    return r < 0.4 ? std::cos(r * 3.14159265358979 / 0.8) : 0.0;
  });
  auto outer = sample_field(grid, [](Point x) {
    const double r = norm(x);
    return r > 0.5 && r < 1.0 ? -std::sin((r - 0.5) * 3.14159265358979 / 0.5) * (1.0 + 0.2 * x.x) : 0.0;
  });
  const auto u1 = nehari_project(inner, p).first;
  const auto u2 = nehari_project(outer, p).first;

  const auto unit = combined_energy(u1, u2, 1.0, 1.0, p);
  CHECK(unit.on_nehari);
  CHECK(unit.interaction == 0.0);
  CHECK(unit.report.energy == doctest::Approx(unit.sum_of_parts).epsilon(1e-12));

  const auto only2 = combined_energy(u1, u2, 0.0, 0.7, p);
  CHECK(only2.report.energy == doctest::Approx(field_energy(0.7 * u2, p).energy).epsilon(1e-12));

  int violations = 0;
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      const double t1 = -2.0 + 0.1 * i, t2 = -2.0 + 0.1 * j;
      const auto c = combined_energy(u1, u2, t1, t2, p);
      // Independent evaluation of the bound from the scalar profile t^2/2 - |t|^{p+1}/(p+1).
      const auto e1 = field_energy(u1, p), e2 = field_energy(u2, p);
      const double direct = (t1 * t1 / 2.0 - std::pow(std::abs(t1), p + 1) / (p + 1)) * e1.grad_norm_sq +
                            (t2 * t2 / 2.0 - std::pow(std::abs(t2), p + 1) / (p + 1)) * e2.grad_norm_sq;
      CHECK(c.report.energy == doctest::Approx(direct).epsilon(1e-9));
      if (!c.bound_holds || c.report.energy > e1.energy + e2.energy + 1e-8 * (e1.energy + e2.energy)) ++violations;
    }
  CHECK(violations == 0);

  CHECK_THROWS_AS(combined_energy(u1, u1, 1.0, 1.0, p), std::invalid_argument);
}

TEST_CASE("minimizer of f") {
  const auto opt = minimize_f();
  const double f_fifth = 5.0 * std::exp(-0.6) + std::exp(0.8);
  CHECK(f_alpha(0.2) == doctest::Approx(f_fifth).epsilon(1e-14));
  CHECK(f_fifth == doctest::Approx(4.96960).epsilon(2e-6));
  CHECK(std::abs(opt.derivative) < 1e-8);
  CHECK(opt.f_value <= f_fifth);
  CHECK(f_fifth <= 4.97);
  CHECK(opt.alpha_bar > 0.1);
  CHECK(opt.alpha_bar < 0.3);

  double best = INFINITY, arg = 0.0;
  for (double a = 0.01; a < 1.0; a += 1e-5) {
    const double f = std::exp(2.0 * a - 1.0) / a + std::exp(4.0 * a);
    if (f < best) best = f, arg = a;
  }
  CHECK(opt.f_value <= best + 1e-12);
  CHECK(std::abs(opt.alpha_bar - arg) < 2e-5);

  CHECK(f_alpha(1e-6) > 1e4);
  CHECK(f_alpha(5.0) > 1e8);
}

TEST_CASE("upper bound report across p") {
  const auto r200 = upper_bound_report(200.0);
  CHECK(r200.sum <= kBoundFactor * kFourPiE * 1.05);
  CHECK(r200.annulus_scaled_energy >= kFourPiE * 0.95);
  CHECK(r200.ball_scaled_energy >= kFourPiE * 0.95);
  CHECK(r200.target == doctest::Approx(4.97 * 4.0 * std::numbers::pi * std::exp(1.0)).epsilon(1e-14));
  CHECK(r200.target == doctest::Approx(169.77).epsilon(1e-4));
  // The sum approaches its large-p value 4 pi e f(alpha).
  const auto r50 = upper_bound_report(50.0);
  CHECK(std::abs(r200.sum - r200.limit) < std::abs(r50.sum - r50.limit));
  CHECK(r200.limit == doctest::Approx(kFourPiE * minimize_f().f_value).epsilon(1e-12));
}

TEST_CASE("elliptic residual of an exact discrete solution is zero") {
  auto grid = disk_grid(32, 16);
  CHECK(elliptic_residual(ScalarField(grid), 3.0) == 0.0);
}
