#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lef/energy.hpp"
#include "lef/flow.hpp"
#include "lef/nodal.hpp"
#include "lef/radial.hpp"
#include "lef/spectrum.hpp"

using namespace lef;

namespace {
GridPtr small_disk() { return Grid::polar(DomainSpec::disk(1.0), 48, 16); }

ScalarField bump(const GridPtr& g) {
  return sample_field(g, [](Point x) {
    const double r2 = x.x * x.x + x.y * x.y;
    return r2 < 1.0 ? (1.0 - r2) * (1.0 - r2) : 0.0;
  });
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

ScalarField first_mode(const GridPtr& g, double* lambda = nullptr) {
  const auto pairs = lowest_eigenpairs(assemble_linearized(ScalarField(g), 3.0), 1);
  ScalarField phi(g, pairs.vectors[0]);
  if (phi[0] < 0.0) phi *= -1.0;
  phi *= 1.0 / phi.sup_norm();
  if (lambda) *lambda = pairs.values[0];
  return phi;
}
}  // namespace

TEST_CASE("zero is an equilibrium") {
  auto g = small_disk();
  const auto z = step(ScalarField(g), 5.0, 1e-3);
  CHECK(z.is_zero());
}

TEST_CASE("heat step damps the first mode exactly") {
  auto g = small_disk();
  double lambda = 0.0;
  const auto phi = first_mode(g, &lambda);
  CHECK(first_dirichlet_eigenvalue(g) == doctest::Approx(lambda).epsilon(1e-8));
  for (double dt : {1e-3, 0.1}) {
    const auto out = heat_step(phi, dt);
    const double factor = 1.0 / (1.0 + dt * lambda);
    CHECK(max_abs_diff(out, factor * phi) < 1e-8);
  }
}

TEST_CASE("discrete steady state is a fixed point of the step") {
  const double p = 3.0;
  auto g = small_disk();
  const auto nr = newton_polish(to_field(solve_ball(p, 1.0), g), p);
  REQUIRE(nr.converged);
  const auto next = step(nr.field, p, 1e-3);
  CHECK(max_abs_diff(next, nr.field) < 1e-8 * nr.field.sup_norm());

  FlowConfig cfg;
  const auto tr = evolve(nr.field, p, cfg);
  CHECK(tr.outcome == Outcome::ConvergedSteady);
  CHECK(tr.steps <= static_cast<std::size_t>(cfg.residual_every));
}

TEST_CASE("small and large data") {
  const double p = 3.0;
  auto g = small_disk();
  const auto small = evolve(0.01 * first_mode(g), p);
  CHECK(small.outcome == Outcome::DecayToZero);
  CHECK(small.energy_violations == 0);

  const auto big = 10.0 * bump(g);
  CHECK(field_energy(big, p).energy < 0.0);
  const auto tr = evolve(big, p);
  CHECK(tr.outcome == Outcome::Blowup);
  CHECK(tr.blowup_sign == 1);

  FlowConfig no_exit;
  no_exit.early_exit = false;
  const auto tr2 = evolve(big, p, no_exit);
  CHECK(tr2.outcome == Outcome::Blowup);
  CHECK(tr2.energy_violations == 0);
}

TEST_CASE("flow is odd and serial and parallel paths agree") {
  const double p = 5.0;
  auto g = small_disk();
  const auto v0 = sample_field(g, [](Point x) { return (1.0 - norm(x)) * (1.5 + std::sin(3.0 * x.x) * x.y); });
  FlowConfig cfg;
  cfg.t_max = 0.05;
  cfg.early_exit = false;
  const auto a = evolve(v0, p, cfg);
  const auto b = evolve(-v0, p, cfg);
  REQUIRE(a.steps == b.steps);
  CHECK(max_abs_diff(a.final_field, -b.final_field) == 0.0);

  cfg.serial = true;
  const auto s = evolve(v0, p, cfg);
  REQUIRE(s.steps == a.steps);
  CHECK(max_abs_diff(s.final_field, a.final_field) < 1e-9 * a.final_field.sup_norm());
}

TEST_CASE("projected flow stays symmetric") {
  const double p = 5.0;
  auto g = small_disk();
  const auto grp = SymmetryGroup::cyclic(4);
  SymmetryProjector proj(*g, grp);
  const auto v0 = proj(sample_field(g, [](Point x) { return (1.0 - norm(x)) * (1.0 + 0.5 * x.x * x.x); }));
  FlowConfig cfg;
  cfg.group = grp;
  cfg.project_every = 10;
  cfg.t_max = 0.2;
  const auto tr = evolve(v0, p, cfg);
  CHECK(symmetry_defect(tr.final_field, grp) < 1e-8 * std::max(tr.final_field.sup_norm(), 1e-300));
}

TEST_CASE("threshold is invariant under rescaling the direction") {
  const double p = 3.0;
  auto g = Grid::polar(DomainSpec::disk(1.0), 32, 8);
  ThresholdConfig cfg;
  cfg.polish = false;
  cfg.flow.t_max = 5.0;
  const auto d = bump(g);
  const auto r1 = threshold_bisect(d, p, cfg);
  const auto r2 = threshold_bisect(2.0 * d, p, cfg);
  REQUIRE(r1.ok);
  REQUIRE(r2.ok);
  CHECK(r1.bisection_width < 1e-3);
  CHECK(std::abs(2.0 * r2.lambda_star - r1.lambda_star) <= r1.bisection_width * r1.lambda_star);
  CHECK(r1.lambda_lo < r1.lambda_star);
  CHECK(r1.lambda_star < r1.lambda_hi);
}

TEST_CASE("ray scan endpoints are one-signed") {
  const double p = 5.0;
  auto g = Grid::polar(DomainSpec::disk(1.0), 64, 8);
  const double a = std::exp(-0.2 * p);
  const auto u1 = to_field(solve_annulus(p, a, 1.0), g);
  const auto u2 = to_field(solve_ball(p, a), g, -1.0);
  RayScanConfig cfg;
  cfg.refine_steps = 0;
  cfg.scan_rel_width = 1e-2;
  cfg.threshold.rel_width = 1e-2;
  cfg.threshold.flow.t_max = 5.0;
  const auto scan = ray_scan(u1, u2, p, {0.0, std::numbers::pi / 2}, cfg);
  REQUIRE(scan.rays.size() >= 2);
  for (const auto& ray : scan.rays) {
    CHECK(ray.result.ok);
    CHECK_FALSE(ray.sign_changing);
  }
  CHECK_FALSE(scan.best.has_value());
}

TEST_CASE("restart needs three domains") {
  const double p = 5.0;
  auto g = Grid::polar(DomainSpec::disk(1.0), 96, 8);
  const double a = std::exp(-0.2 * p);
  const auto two = to_field(solve_annulus(p, a, 1.0), g) + to_field(solve_ball(p, a), g, -1.0);
  const auto d2 = decompose(two);
  REQUIRE(d2.count() == 2);
  CHECK_THROWS_WITH_AS(restart_from_nodal_pair(two, d2, p, {}), doctest::Contains("nothing to restart"),
                       std::invalid_argument);

  const auto three = to_field(solve_ball_nodal(p, 1.0, 3), g);
  const auto d3 = decompose(three);
  REQUIRE(d3.count() == 3);
  const auto r = restart_from_nodal_pair(three, d3, p, {});
  CHECK(d3.adjacent(r.domain_a, r.domain_b));
  CHECK(d3.domain(r.domain_a).sign * d3.domain(r.domain_b).sign == -1);
  CHECK(field_energy(r.u1, p).nehari_residual() < 1e-10);
  CHECK(field_energy(r.u2, p).nehari_residual() < 1e-10);
  CHECK(r.scan.rays.empty());
}
