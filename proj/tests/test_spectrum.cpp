#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lef/energy.hpp"
#include "lef/radial.hpp"
#include "lef/spectrum.hpp"

using namespace lef;

namespace {
// First positive zero of J_nu by bisection on a sign change.
double bessel_zero(double nu, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((std::cyl_bessel_j(nu, lo) > 0.0) == (std::cyl_bessel_j(nu, mid) > 0.0)) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

ScalarField disk_ground_state(const GridPtr& grid, double p) {
  const auto w = solve_ball(p, 1.0);
  const auto nr = newton_polish(to_field(w, grid), p);
  REQUIRE(nr.converged);
  return nr.field;
}
}  // namespace

TEST_CASE("Dirichlet Laplacian on the disk") {
  const double j0 = bessel_zero(0.0, 2.0, 3.0);
  const double j1 = bessel_zero(1.0, 3.0, 4.5);
  CHECK(j0 == doctest::Approx(2.4048).epsilon(1e-4));
  CHECK(j1 == doctest::Approx(3.8317).epsilon(1e-4));

  auto grid = Grid::polar(DomainSpec::disk(1.0), 64, 32);
  const auto op = assemble_linearized(ScalarField(grid), 3.0);
  for (double v : op.potential) CHECK(v == 0.0);
  const auto pairs = lowest_eigenpairs(op, 4);
  CHECK(pairs.values[0] == doctest::Approx(j0 * j0).epsilon(0.01));
  // The first odd mode is doubly degenerate on the full disk.
  CHECK(pairs.values[1] == doctest::Approx(j1 * j1).epsilon(0.01));
  CHECK(pairs.values[2] == doctest::Approx(j1 * j1).epsilon(0.01));
  for (double r : pairs.residuals) CHECK(r < 1e-8);

  const auto g = SymmetryGroup::dihedral(4, 0.0);
  const auto half = half_domain_mu(ScalarField(grid), 3.0, g, 4, pairs.values);
  CHECK(half.mu == doctest::Approx(j1 * j1).epsilon(0.01));
  CHECK(half.odd_extension_residual < 1e-6);
  CHECK(half.full_spectrum_gap < 1e-6);
}

TEST_CASE("Dirichlet Laplacian on the unit square") {
  auto grid = Grid::cartesian(DomainSpec::square(0.5), 64);
  const auto pairs = lowest_eigenpairs(assemble_linearized(ScalarField(grid), 3.0), 1);
  CHECK(pairs.values[0] == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi).epsilon(0.01));
}

TEST_CASE("symmetric form and variational bound") {
  auto grid = Grid::polar(DomainSpec::disk(1.0), 32, 16);
  const auto u = sample_field(grid, [](Point x) { return (1.0 - x.x * x.x - x.y * x.y) * (2.0 + x.x); });
  const auto op = assemble_linearized(u, 5.0);
  for (double v : op.potential) CHECK(v >= 0.0);
  const SparseMatrix a = op.symmetric_form();
  const SparseMatrix at = a.transpose();
  CHECK((a - at).norm() == 0.0);

  const double l1 = lowest_eigenpairs(op, 1).values[0];
  for (int m = 0; m < 3; ++m) {
    const auto test = sample_field(grid, [m](Point x) { return (1.0 - norm(x)) * std::cos(m * x.x + x.y); });
    CHECK(l1 <= op.rayleigh_quotient(test.values()) + 1e-12);
  }

  // A pointwise larger |u| lowers every eigenvalue.
  const auto bigger = lowest_eigenpairs(assemble_linearized(1.2 * u, 5.0), 3);
  const auto base = lowest_eigenpairs(op, 3);
  for (int k = 0; k < 3; ++k) CHECK(bigger.values[k] < base.values[k]);
}

TEST_CASE("positive ground state has Morse index one") {
  const double p = 3.0;
  auto grid = Grid::polar(DomainSpec::disk(1.0), 64, 16);
  const auto u = disk_ground_state(grid, p);
  const auto g = SymmetryGroup::cyclic(4);
  const auto rep = morse_index(u, p, &g);
  CHECK(rep.morse_index == 1);
  REQUIRE(rep.symmetric_morse_index.has_value());
  CHECK(*rep.symmetric_morse_index == 1);
  CHECK(rep.inertia_consistent);
  CHECK(rep.eigenvalues[0] < 0.0);
  CHECK(rep.eigenvalues[1] > 0.0);

  const auto op = assemble_linearized(u, p);
  CHECK(eigenvalues_below(op, 0.0) == 1);
  CHECK(eigenvalues_below(op, rep.eigenvalues[2] + 1e-6 * std::abs(rep.eigenvalues[2])) == 3);
}

TEST_CASE("morse index requires a steady state") {
  auto grid = Grid::polar(DomainSpec::disk(1.0), 32, 16);
  const auto v = sample_field(grid, [](Point x) { return 1.0 - norm(x); });
  CHECK_THROWS_AS(morse_index(v, 3.0), std::invalid_argument);
}

TEST_CASE("count_negative threshold") {
  CHECK(count_negative({-10.0, -1e-6, -1e-8, 3.0}) == 2);
  CHECK(count_negative({1.0, 2.0}) == 0);
}
