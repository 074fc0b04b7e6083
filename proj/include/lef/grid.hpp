#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "lef/geometry.hpp"

namespace lef {

enum class GridKind { polar, cartesian };

/// Coefficients of the finite-volume discretization on a polar grid, one entry
/// per ring. Used by the FFT-based implicit solver.
struct PolarCoefficients {
  std::vector<double> mass;          ///< cell area per node of ring i
  std::vector<double> radial_face;   ///< coupling between rings i and i+1 (size n_r - 1)
  std::vector<double> angular;       ///< coupling between angular neighbours on ring i
  std::vector<double> boundary;      ///< Dirichlet face contribution to the diagonal of ring i
};

/// Discretization of a domain: interior nodes carrying unknowns (boundary
/// values are implicitly zero), their quadrature weights, and the stiffness
/// matrix of the discrete Dirichlet form in CSR layout.
///
/// Polar grids (disk or annulus) are cell-centred finite volumes: ring radii
/// r_i = r_in + (i + 1/2) dr and angles theta_j = j dtheta. Node index is
/// i * n_theta + j. Cartesian grids are the interior points of a square lattice
/// with the 5-point stencil; lattice nodes outside the mask act as zero
/// Dirichlet values.
///
/// Grids are immutable after construction and shared through shared_ptr.
class Grid {
 public:
  static std::shared_ptr<const Grid> polar(const DomainSpec& domain, int n_r, int n_theta);
  /// Lattice over [-extent, extent]^2 with n_cells intervals per axis.
  static std::shared_ptr<const Grid> cartesian(const DomainSpec& domain, int n_cells);

  GridKind kind() const { return kind_; }
  const DomainSpec& domain() const { return domain_; }
  std::size_t size() const { return nodes_.size(); }
  Point node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<double>& mass() const { return mass_; }

  // Stiffness matrix K: (K u)_i = diag_i u_i - sum_k coupling_k u_{col_k}.
  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col() const { return col_; }
  const std::vector<double>& coupling() const { return coupling_; }
  const std::vector<double>& diag() const { return diag_; }

  /// Node-adjacency used for nodal flood fill (same pattern as the stencil).
  template <class F>
  void for_each_neighbor(std::size_t i, F&& f) const {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) f(col_[k]);
  }
  /// True when node i couples to a Dirichlet boundary value.
  bool next_to_boundary(std::size_t i) const { return boundary_adjacent_[i] != 0; }
  /// Points where the Dirichlet condition is imposed.
  const std::vector<Point>& boundary_nodes() const { return boundary_points_; }
  /// Nodes closest to the origin (ring 0 on polar grids, the origin node or its
  /// four neighbours on cartesian grids). Empty when the origin is outside.
  const std::vector<std::size_t>& origin_nodes() const { return origin_nodes_; }

  /// Typical cell size, used for tolerances.
  double spacing() const { return spacing_; }

  // Polar layout.
  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  double dr() const { return dr_; }
  double dtheta() const { return dtheta_; }
  double ring_radius(int i) const { return r_in_ + (i + 0.5) * dr_; }
  const PolarCoefficients& polar_coefficients() const { return polar_; }

  // Cartesian layout.
  int n_cells() const { return n_cells_; }
  double lattice_origin() const { return lattice_origin_; }

  /// Interior node exactly at x (within 1e-9 cells), if any.
  std::optional<std::size_t> locate(Point x) const;

  /// Node permutation realizing the action of group element `index` on fields:
  /// (g.v)[n] = v[perm[n]] with perm[n] the node at g^{-1}(x_n). Empty when the
  /// grid does not conform to the element.
  std::optional<std::vector<std::size_t>> permutation(const SymmetryGroup& group, int index) const;
  bool conforms_to(const SymmetryGroup& group) const;

  /// Bilinear interpolation of nodal values at an arbitrary point; zero
  /// outside the domain.
  double interpolate(const std::vector<double>& values, Point x) const;

 private:
  Grid(GridKind kind, DomainSpec domain) : kind_(kind), domain_(std::move(domain)) {}
  void finalize_csr(std::vector<std::vector<std::pair<std::size_t, double>>>& rows);

  GridKind kind_;
  DomainSpec domain_;
  std::vector<Point> nodes_;
  std::vector<double> mass_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_;
  std::vector<double> coupling_;
  std::vector<double> diag_;
  std::vector<char> boundary_adjacent_;
  std::vector<Point> boundary_points_;
  std::vector<std::size_t> origin_nodes_;
  double spacing_ = 0.0;

  int n_r_ = 0, n_theta_ = 0;
  double r_in_ = 0.0, r_out_ = 0.0, dr_ = 0.0, dtheta_ = 0.0;
  PolarCoefficients polar_;

  int n_cells_ = 0;
  double lattice_origin_ = 0.0;
  std::vector<long> lattice_to_node_;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace lef
