#include "lef/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lef {

ScalarField::ScalarField(GridPtr grid, double time)
    : grid_(std::move(grid)), values_(grid_ ? grid_->size() : 0, 0.0), time_(time) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values, double time)
    : grid_(std::move(grid)), values_(std::move(values)), time_(time) {
  if (!grid_ || values_.size() != grid_->size())
    throw std::invalid_argument("field size does not match grid");
}

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  if (other.size() != size()) throw std::invalid_argument("field size mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  if (other.size() != size()) throw std::invalid_argument("field size mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField sample_field(const GridPtr& grid, const std::function<double(Point)>& f) {
  ScalarField v(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) v[i] = f(grid->node(i));
  return v;
}

ScalarField apply_group_element(const SymmetryGroup& group, int index, const ScalarField& v) {
  const Grid& grid = v.grid_ref();
  ScalarField out(v.grid(), v.time());
  if (auto perm = grid.permutation(group, index)) {
    for (std::size_t n = 0; n < grid.size(); ++n) out[n] = v[(*perm)[n]];
    return out;
  }
  for (std::size_t n = 0; n < grid.size(); ++n)
    out[n] = grid.interpolate(v.values(), group.apply_inverse(index, grid.node(n)));
  return out;
}

double symmetry_defect(const ScalarField& v, const SymmetryGroup& group) {
  double defect = 0.0;
  for (int g = 1; g < group.size(); ++g) {
    const ScalarField w = apply_group_element(group, g, v);
    for (std::size_t n = 0; n < v.size(); ++n) defect = std::max(defect, std::abs(w[n] - v[n]));
  }
  return defect;
}

SymmetryProjector::SymmetryProjector(const Grid& grid, const SymmetryGroup& group) : group_(group) {
  for (int g = 0; g < group.size(); ++g) {
    auto perm = grid.permutation(group, g);
    if (!perm)
      throw std::invalid_argument("grid does not conform to group " + group.name() +
                                  "; symmetry projection needs an exact node permutation");
    perms_.push_back(std::move(*perm));
  }
}

void SymmetryProjector::apply(std::span<double> values) const {
  std::vector<double> acc(values.size(), 0.0);
  for (const auto& perm : perms_)
    for (std::size_t n = 0; n < values.size(); ++n) acc[n] += values[perm[n]];
  const double w = 1.0 / static_cast<double>(perms_.size());
  for (std::size_t n = 0; n < values.size(); ++n) values[n] = acc[n] * w;
}

ScalarField SymmetryProjector::operator()(const ScalarField& v) const {
  ScalarField out = v;
  apply(out.span());
  return out;
}

}  // namespace lef
