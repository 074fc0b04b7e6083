#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lef/grid.hpp"

namespace lef {

/// Values at the interior nodes of a grid; the Dirichlet boundary trace is
/// identically zero and not stored.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double time = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values, double time = 0.0);

  const GridPtr& grid() const { return grid_; }
  const Grid& grid_ref() const { return *grid_; }
  std::size_t size() const { return values_.size(); }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double sup_norm() const;
  bool is_zero() const;

  ScalarField& operator*=(double s);
  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  friend ScalarField operator*(double s, ScalarField v) { return v *= s; }
  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  ScalarField operator-() const { return -1.0 * *this; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
  double time_ = 0.0;
};

/// Evaluates f at every interior node.
ScalarField sample_field(const GridPtr& grid, const std::function<double(Point)>& f);

/// The action v -> v o g^{-1} of group element `index`: an exact node
/// permutation on conforming grids, bilinear resampling otherwise.
ScalarField apply_group_element(const SymmetryGroup& group, int index, const ScalarField& v);

/// max over group elements of ||g.v - v||_inf (absolute).
double symmetry_defect(const ScalarField& v, const SymmetryGroup& group);

/// Orthogonal projection onto G-symmetric fields (group average).
class SymmetryProjector {
 public:
  SymmetryProjector(const Grid& grid, const SymmetryGroup& group);

  void apply(std::span<double> values) const;
  ScalarField operator()(const ScalarField& v) const;
  const SymmetryGroup& group() const { return group_; }
  const std::vector<std::vector<std::size_t>>& permutations() const { return perms_; }

 private:
  SymmetryGroup group_;
  std::vector<std::vector<std::size_t>> perms_;
};

/// Point action of a group element.
inline Point apply_group_element(const SymmetryGroup& group, int index, Point x) {
  return group.apply(index, x);
}

}  // namespace lef
