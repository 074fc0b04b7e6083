#pragma once

#include <functional>
#include <string>
#include <vector>

namespace lef {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double norm(Point p);
double distance(Point a, Point b);

enum class GroupKind { cyclic, dihedral };

/// Finite orthogonal group C_h (h rotations) or D_h (h rotations and h
/// reflections) acting on the plane.
///
/// Elements are indexed 0..size()-1. Index k < h is the rotation by 2*pi*k/h.
/// Index h + k (dihedral only) is the reflection about the line through the
/// origin at angle axis_angle + pi*k/h, i.e. the rotation g^k composed with the
/// base reflection.
class SymmetryGroup {
 public:
  SymmetryGroup(GroupKind kind, int order_h, double axis_angle = 0.0);

  static SymmetryGroup cyclic(int order_h) { return {GroupKind::cyclic, order_h}; }
  static SymmetryGroup dihedral(int order_h, double axis_angle = 0.0) {
    return {GroupKind::dihedral, order_h, axis_angle};
  }

  GroupKind kind() const { return kind_; }
  int order() const { return order_h_; }
  double axis_angle() const { return axis_angle_; }
  int size() const { return kind_ == GroupKind::cyclic ? order_h_ : 2 * order_h_; }
  bool is_reflection(int index) const { return index >= order_h_; }

  /// Rotation angle for rotations, axis angle for reflections.
  double element_angle(int index) const;
  /// Index of the reflection about the configured axis; -1 for cyclic groups.
  int base_reflection() const { return kind_ == GroupKind::dihedral ? order_h_ : -1; }

  Point apply(int index, Point x) const;
  Point apply_inverse(int index, Point x) const;

  std::string name() const;

 private:
  void check_index(int index) const;

  GroupKind kind_;
  int order_h_;
  double axis_angle_;
};

/// Number of distinct points in {g x : g in G}.
int orbit_cardinality(const SymmetryGroup& group, Point x, double tol = 1e-12);

enum class ShapeKind { disk, annulus, mask };

/// A bounded planar domain described by a level-set function (negative
/// inside, zero on the boundary).
class DomainSpec {
 public:
  static DomainSpec disk(double radius);
  static DomainSpec annulus(double inner, double outer);
  /// Generic level-set domain contained in the square [-extent, extent]^2.
  static DomainSpec mask(std::string name, std::function<double(Point)> level, double extent,
                         bool contains_origin = true);
  /// |x|^4 + |y|^4 < R^4, the D_4-symmetric "squircle".
  static DomainSpec squircle(double radius);
  static DomainSpec square(double half_width);
  static DomainSpec ellipse(double semi_x, double semi_y);

  ShapeKind shape() const { return shape_; }
  const std::string& name() const { return name_; }
  double inner_radius() const { return inner_; }
  double outer_radius() const { return outer_; }
  double extent() const { return extent_; }
  bool contains_origin() const { return contains_origin_; }
  /// Factory arguments (radius, inner/outer, half width, semi axes); empty for
  /// generic masks.
  const std::vector<double>& parameters() const { return parameters_; }

  double level(Point x) const { return level_(x); }
  bool contains(Point x, double tol = 0.0) const { return level_(x) < -tol; }
  bool contains_closed(Point x, double tol = 0.0) const { return level_(x) <= tol; }

  /// Boundary point on the ray from the origin at angle theta (outer boundary).
  Point boundary_point(double theta) const;

 private:
  DomainSpec(ShapeKind shape, std::string name, std::function<double(Point)> level, double inner,
             double outer, double extent, bool contains_origin);

  ShapeKind shape_;
  std::string name_;
  std::function<double(Point)> level_;
  double inner_ = 0.0;
  double outer_ = 0.0;
  double extent_ = 0.0;
  bool contains_origin_ = true;
  std::vector<double> parameters_;
};

/// True iff every sampled non-origin point of the closed domain has orbit size
/// at least 4 and the domain mask is invariant under every group element at
/// all samples. Groups with order below 4 are never admissible.
bool check_admissible(const SymmetryGroup& group, const DomainSpec& domain, int samples);

/// Throws AdmissibilityError when check_admissible fails.
void require_admissible(const SymmetryGroup& group, const DomainSpec& domain, int samples = 4096);

/// Sampled test of convexity along direction (cos angle, sin angle): every
/// sampled chord parallel to that direction meets the domain in one interval.
bool convex_in_direction(const DomainSpec& domain, double angle, int chords = 257);

}  // namespace lef
