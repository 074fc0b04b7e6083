#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lef/energy.hpp"
#include "lef/nodal.hpp"
#include "lef/radial.hpp"

using namespace lef;

namespace {
constexpr double kPi = std::numbers::pi;

GridPtr disk(int n_r = 64, int n_theta = 16) { return Grid::polar(DomainSpec::disk(1.0), n_r, n_theta); }

ScalarField composite(const GridPtr& g, double p) {
  const double a = std::exp(-0.2 * p);
  return to_field(solve_annulus(p, a, 1.0), g) + to_field(solve_ball(p, a), g, -1.0);
}
}  // namespace

TEST_CASE("positive ball solution is one domain") {
  auto g = disk();
  const auto u = to_field(solve_ball(3.0, 1.0), g);
  const auto d = decompose(u);
  REQUIRE(d.count() == 1);
  CHECK(d.domain(1).sign == 1);
  CHECK(d.domain(1).contains_origin);
  CHECK_FALSE(touches_boundary(d, 1));
  CHECK_FALSE(d.nodal_line_touches_boundary());
  CHECK(contains_origin(d) == 1);

  const auto per = per_domain_energy(u, d, 3.0);
  REQUIRE(per.size() == 1);
  const auto full = field_energy(u, 3.0);
  CHECK(per[0].energy == doctest::Approx(full.energy).epsilon(1e-12));
}

TEST_CASE("zero field has no domains") {
  CHECK(decompose(ScalarField(disk())).count() == 0);
}

TEST_CASE("annulus plus negative core") {
  const double p = 5.0;
  auto g = disk(128, 16);
  const auto v = composite(g, p);
  const auto d = decompose(v);
  REQUIRE(d.count() == 2);
  CHECK(d.positive_count() == 1);
  CHECK(d.negative_count() == 1);
  const auto origin = contains_origin(d);
  REQUIRE(origin.has_value());
  CHECK(d.domain(*origin).sign == -1);
  CHECK_FALSE(d.nodal_line_touches_boundary());
  for (const auto& dom : d.domains) CHECK_FALSE(dom.touches_boundary);

  // Supports are disjoint up to the zero band, so the gradient terms nearly add up.
  const auto per = per_domain_energy(v, d, p);
  const double sum = per[0].grad_norm_sq + per[1].grad_norm_sq;
  CHECK(sum == doctest::Approx(field_energy(v, p).grad_norm_sq).epsilon(0.02));

  for (const auto& s : domain_symmetry_check(d, SymmetryGroup::dihedral(4)))
    CHECK(s.symmetric);

  // Halving tau keeps the count of a well-resolved field.
  CHECK(decompose(v, 0.5e-3 * v.sup_norm()).count() == 2);
}

TEST_CASE("checkerboard on the unit square") {
  auto g = Grid::cartesian(DomainSpec::square(0.5), 64);
  const auto v = sample_field(g, [](Point x) { return std::sin(2 * kPi * x.x) * std::sin(2 * kPi * x.y); });
  const auto d = decompose(v);
  REQUIRE(d.count() == 4);
  CHECK(d.positive_count() == 2);
  CHECK(d.negative_count() == 2);
  // The central cross of the zero band touches all four; opposite-sign neighbours share an edge band.
  int opposite = 0;
  for (const auto& [a, b] : d.adjacency) opposite += d.domain(a).sign != d.domain(b).sign;
  CHECK(opposite == 4);
  CHECK(d.nodal_line_touches_boundary());
  CHECK_FALSE(contains_origin(d).has_value());
}

TEST_CASE("odd mode nodal line reaches the boundary") {
  auto g = disk(64, 32);
  const auto v = sample_field(g, [](Point x) {
    const double r = norm(x);
    return r * (1.0 - r) * std::sin(std::atan2(x.y, x.x));
  });
  const auto d = decompose(v);
  REQUIRE(d.count() == 2);
  CHECK(d.nodal_line_touches_boundary());
  CHECK(touches_boundary(d, 1));
  CHECK(touches_boundary(d, 2));
  CHECK_FALSE(contains_origin(d).has_value());
}

TEST_CASE("symmetry of domain indicators") {
  auto g = disk(32, 16);
  const auto grp = SymmetryGroup::cyclic(4);
  const auto half = sample_field(g, [](Point x) { return x.y > 0.0 ? 1.0 - norm(x) : -(1.0 - norm(x)) * 0.5; });
  const auto checks = domain_symmetry_check(decompose(half), grp);
  REQUIRE_FALSE(checks.empty());
  for (const auto& c : checks) {
    CHECK_FALSE(c.symmetric);
    CHECK(c.mismatch_fraction > 0.0);
  }
  // 16 angles do not carry a rotation by 2 pi / 3.
  CHECK_THROWS(domain_symmetry_check(decompose(half), SymmetryGroup::cyclic(3)));
}

TEST_CASE("h + 1 domains for a symmetric field with separated positive petals") {
  auto g = disk(64, 32);
  const int h = 4;
  // Negative core ring and h positive petals near the boundary, separated by a zero band.
  const auto v = sample_field(g, [h](Point x) {
    const double r = norm(x), th = std::atan2(x.y, x.x);
    if (r < 0.5) return -std::cos(r * kPi);
    const double petal = std::cos(h * th);
    return petal > 0.3 ? (r - 0.5) * (1.0 - r) * petal : 0.0;
  });
  const auto d = decompose(v);
  CHECK(d.count() >= h + 1);
}

TEST_CASE("origin query on an annulus is rejected") {
  auto g = Grid::polar(DomainSpec::annulus(0.3, 1.0), 16, 16);
  const auto v = sample_field(g, [](Point x) { return (norm(x) - 0.3) * (1.0 - norm(x)); });
  CHECK_THROWS_AS(contains_origin(decompose(v)), std::invalid_argument);
}
