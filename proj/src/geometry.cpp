#include "lef/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lef/errors.hpp"

namespace lef {

namespace {
constexpr double kPi = std::numbers::pi;
}

double norm(Point p) { return std::hypot(p.x, p.y); }
double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

SymmetryGroup::SymmetryGroup(GroupKind kind, int order_h, double axis_angle)
    : kind_(kind), order_h_(order_h), axis_angle_(axis_angle) {
  if (order_h < 1) throw std::invalid_argument("symmetry group order must be >= 1");
}

void SymmetryGroup::check_index(int index) const {
  if (index < 0 || index >= size())
    throw std::out_of_range("group element index " + std::to_string(index) + " out of range");
}

double SymmetryGroup::element_angle(int index) const {
  check_index(index);
  if (!is_reflection(index)) return 2.0 * kPi * index / order_h_;
  return axis_angle_ + kPi * (index - order_h_) / order_h_;
}

Point SymmetryGroup::apply(int index, Point x) const {
  const double a = element_angle(index);
  if (!is_reflection(index)) {
    const double c = std::cos(a), s = std::sin(a);
    return {c * x.x - s * x.y, s * x.x + c * x.y};
  }
  const double c = std::cos(2.0 * a), s = std::sin(2.0 * a);
  return {c * x.x + s * x.y, s * x.x - c * x.y};
}

Point SymmetryGroup::apply_inverse(int index, Point x) const {
  if (is_reflection(index)) return apply(index, x);
  const double a = -element_angle(index);
  const double c = std::cos(a), s = std::sin(a);
  return {c * x.x - s * x.y, s * x.x + c * x.y};
}

std::string SymmetryGroup::name() const {
  return (kind_ == GroupKind::cyclic ? "C" : "D") + std::to_string(order_h_);
}

int orbit_cardinality(const SymmetryGroup& group, Point x, double tol) {
  std::vector<Point> images;
  images.reserve(group.size());
  for (int k = 0; k < group.size(); ++k) {
    const Point y = group.apply(k, x);
    bool seen = false;
    for (const Point& z : images) {
      if (distance(y, z) <= tol) {
        seen = true;
        break;
      }
    }
    if (!seen) images.push_back(y);
  }
  return static_cast<int>(images.size());
}

DomainSpec::DomainSpec(ShapeKind shape, std::string name, std::function<double(Point)> level,
                       double inner, double outer, double extent, bool contains_origin)
    : shape_(shape),
      name_(std::move(name)),
      level_(std::move(level)),
      inner_(inner),
      outer_(outer),
      extent_(extent),
      contains_origin_(contains_origin) {}

DomainSpec DomainSpec::disk(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk radius must be positive");
  DomainSpec d{ShapeKind::disk, "disk", [radius](Point x) { return norm(x) - radius; },
               0.0, radius, radius, true};
  d.parameters_ = {radius};
  return d;
}

DomainSpec DomainSpec::annulus(double inner, double outer) {
  if (!(inner > 0.0) || !(outer > inner))
    throw std::invalid_argument("annulus requires 0 < inner < outer");
  DomainSpec d{ShapeKind::annulus, "annulus",
               [inner, outer](Point x) {
                 const double r = norm(x);
                 return std::max(inner - r, r - outer);
               },
               inner, outer, outer, false};
  d.parameters_ = {inner, outer};
  return d;
}

DomainSpec DomainSpec::mask(std::string name, std::function<double(Point)> level, double extent,
                            bool contains_origin) {
  if (!(extent > 0.0)) throw std::invalid_argument("mask extent must be positive");
  return {ShapeKind::mask, std::move(name), std::move(level), 0.0, extent, extent, contains_origin};
}

DomainSpec DomainSpec::squircle(double radius) {
  DomainSpec d = mask("squircle",
                      [radius](Point x) {
                        const double x2 = x.x * x.x, y2 = x.y * x.y;
                        return std::sqrt(std::sqrt(x2 * x2 + y2 * y2)) - radius;
                      },
                      radius);
  d.parameters_ = {radius};
  return d;
}

DomainSpec DomainSpec::square(double half_width) {
  DomainSpec d = mask("square",
                      [half_width](Point x) { return std::max(std::abs(x.x), std::abs(x.y)) - half_width; },
                      half_width);
  d.parameters_ = {half_width};
  return d;
}

DomainSpec DomainSpec::ellipse(double semi_x, double semi_y) {
  DomainSpec d = mask("ellipse",
                      [semi_x, semi_y](Point x) {
                        return std::hypot(x.x / semi_x, x.y / semi_y) - 1.0;
                      },
                      std::max(semi_x, semi_y));
  d.parameters_ = {semi_x, semi_y};
  return d;
}

Point DomainSpec::boundary_point(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  if (shape_ != ShapeKind::mask) return {outer_ * c, outer_ * s};
  // Star-shaped masks: bisect on the outermost sign change along the ray.
  double lo = 0.0, hi = 2.0 * extent_;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * extent_; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (level_({mid * c, mid * s}) <= 0.0) lo = mid;
    else hi = mid;
  }
  return {lo * c, lo * s};
}

bool check_admissible(const SymmetryGroup& group, const DomainSpec& domain, int samples) {
  if (samples < 1) throw std::invalid_argument("check_admissible needs at least one sample");
  if (group.order() < 4) return false;

  const double extent = domain.extent();
  const double level_tol = 1e-9 * extent;
  std::vector<Point> points;
  const int k = std::max(2, static_cast<int>(std::ceil(std::sqrt(double(samples)))));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      points.push_back({-extent + 2.0 * extent * i / (k - 1), -extent + 2.0 * extent * j / (k - 1)});
  const int n_boundary = std::min(samples, 256);
  for (int m = 0; m < n_boundary; ++m) {
    // Golden-angle sequence avoids aligning with the group's own angles.
    const double theta = m * kPi * (3.0 - std::sqrt(5.0));
    points.push_back(domain.boundary_point(theta));
  }

  for (const Point& x : points) {
    const double lx = domain.level(x);
    if (lx <= level_tol && norm(x) > 1e-12) {
      if (orbit_cardinality(group, x) < 4) return false;
    }
    for (int g = 1; g < group.size(); ++g) {
      const double ly = domain.level(group.apply(g, x));
      if (std::abs(lx) <= level_tol) {
        if (std::abs(ly) > 1e3 * level_tol) return false;
      } else if (std::abs(ly) > level_tol && (lx < 0.0) != (ly < 0.0)) {
        return false;
      }
    }
  }
  return true;
}

void require_admissible(const SymmetryGroup& group, const DomainSpec& domain, int samples) {
  if (group.order() < 4)
    throw AdmissibilityError("group " + group.name() +
                             " has orbits of size < 4; order h >= 4 is required");
  if (!check_admissible(group, domain, samples))
    throw AdmissibilityError("domain '" + domain.name() + "' is not invariant under " +
                             group.name());
}

bool convex_in_direction(const DomainSpec& domain, double angle, int chords) {
  const double e = domain.extent();
  const Point d{std::cos(angle), std::sin(angle)};
  const Point n{-d.y, d.x};
  const int samples_per_chord = 801;
  for (int c = 1; c < chords - 1; ++c) {
    const double offset = -e + 2.0 * e * c / (chords - 1);
    int transitions = 0;
    bool prev = false;
    for (int s = 0; s < samples_per_chord; ++s) {
      const double t = -1.5 * e + 3.0 * e * s / (samples_per_chord - 1);
      const bool in = domain.contains({offset * n.x + t * d.x, offset * n.y + t * d.y});
      if (s > 0 && in != prev) ++transitions;
      prev = in;
    }
    if (transitions > 2) return false;
  }
  return true;
}

}  // namespace lef
