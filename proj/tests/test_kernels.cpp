#include <doctest.h>

#include <cmath>
#include <random>

#include "lef/field.hpp"
#include "lef/implicit_solver.hpp"
#include "lef/kernels.hpp"

using namespace lef;

namespace {
std::vector<double> random_values(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}
}  // namespace

TEST_CASE("parallel kernels match the serial reference") {
  for (auto grid : {Grid::polar(DomainSpec::disk(1.0), 40, 64), Grid::cartesian(DomainSpec::squircle(1.0), 64)}) {
    const auto u = random_values(grid->size(), 3);
    const auto w = random_values(grid->size(), 4);
    std::vector<double> a(u.size()), b(u.size());
    kernels::stiffness_apply(*grid, u, a);
    kernels::serial::stiffness_apply(*grid, u, b);
    CHECK(a == b);
    const double df = kernels::dirichlet_form(*grid, u);
    CHECK(df == doctest::Approx(kernels::serial::dirichlet_form(*grid, u)).epsilon(1e-12));
    CHECK(df > 0.0);
    for (double q : {2.0, 4.0, 9.0, 6.5})
      CHECK(kernels::power_integral(*grid, u, q) ==
            doctest::Approx(kernels::serial::power_integral(*grid, u, q)).epsilon(1e-12));
    CHECK(kernels::weighted_dot(*grid, u, w) ==
          doctest::Approx(kernels::serial::weighted_dot(*grid, u, w)).epsilon(1e-12));
    kernels::imex_rhs(*grid, u, 8.0, 1e-3, a);
    kernels::serial::imex_rhs(*grid, u, 8.0, 1e-3, b);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
    CHECK(kernels::sup_norm(u) == kernels::serial::sup_norm(u));
  }
}

TEST_CASE("stiffness matrix is symmetric with zero-sum rows away from the boundary") {
  auto grid = Grid::polar(DomainSpec::annulus(0.3, 1.0), 12, 24);
  const auto& rp = grid->row_ptr();
  for (std::size_t i = 0; i < grid->size(); ++i) {
    double s = grid->diag()[i];
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      const std::size_t j = grid->col()[k];
      s -= grid->coupling()[k];
      bool found = false;
      for (std::size_t l = rp[j]; l < rp[j + 1]; ++l)
        if (grid->col()[l] == i) {
          CHECK(grid->coupling()[l] == grid->coupling()[k]);
          found = true;
        }
      CHECK(found);
    }
    if (!grid->next_to_boundary(i)) CHECK(std::abs(s) < 1e-12);
  }
}

TEST_CASE("reductions are independent of the thread count") {
  auto grid = Grid::cartesian(DomainSpec::disk(1.0), 200);
  const auto u = random_values(grid->size(), 7);
  const double a = kernels::dirichlet_form(*grid, u);
  const double b = kernels::dirichlet_form(*grid, u);
  CHECK(a == b);
}

TEST_CASE("implicit solvers agree") {
  auto grid = Grid::polar(DomainSpec::disk(1.0), 24, 32);
  const auto rhs = random_values(grid->size(), 11);
  const double dt = 0.01;
  std::vector<double> x_fft(rhs.size(), 0.0), x_cg(rhs.size(), 0.0), check(rhs.size());
  PolarFFTSolver(grid).solve(dt, rhs, x_fft);
  CGSolver(grid).solve(dt, rhs, x_cg);
  for (std::size_t i = 0; i < rhs.size(); ++i) CHECK(x_fft[i] == doctest::Approx(x_cg[i]).epsilon(1e-9));
  kernels::stiffness_apply(*grid, x_fft, check);
  double worst = 0.0;
  for (std::size_t i = 0; i < rhs.size(); ++i)
    worst = std::max(worst, std::abs(grid->mass()[i] * x_fft[i] + dt * check[i] - rhs[i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("FFT solve commutes exactly with negation") {
  auto grid = Grid::polar(DomainSpec::disk(1.0), 16, 32);
  auto rhs = random_values(grid->size(), 5);
  std::vector<double> neg(rhs.size()), a(rhs.size()), b(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) neg[i] = -rhs[i];
  PolarFFTSolver s(grid);
  s.solve(0.1, rhs, a);
  s.solve(0.1, neg, b);
  for (std::size_t i = 0; i < rhs.size(); ++i) CHECK(a[i] == -b[i]);
}

TEST_CASE("AbsPower integer path") {
  kernels::AbsPower p7(7.0), half(0.5);
  CHECK(p7(1.3) == doctest::Approx(std::pow(1.3, 7)).epsilon(1e-15));
  CHECK(p7(0.0) == 0.0);
  CHECK(half(4.0) == doctest::Approx(2.0));
  CHECK(kernels::AbsPower(0.0)(0.0) == 1.0);
}
