#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lef/energy.hpp"
#include "lef/field.hpp"

namespace lef {

struct NodalDomain {
  int id = 0;
  int sign = 0;
  std::size_t node_count = 0;
  bool touches_boundary = false;
  bool contains_origin = false;
};

/// Connected component of the zero band {|v| <= tau}.
struct ZeroBandComponent {
  std::size_t node_count = 0;
  std::vector<int> adjacent_domains;
  bool adjacent_positive = false;
  bool adjacent_negative = false;
  bool touches_boundary = false;
  /// Separates domains of both signs, i.e. carries a piece of the nodal line.
  bool is_nodal_line() const { return adjacent_positive && adjacent_negative; }
};

/// Nodal domains of a grid field: maximal stencil-connected components of
/// {v > tau} and {v < -tau}.
struct NodalDecomposition {
  GridPtr grid;
  double tau = 0.0;
  std::vector<int> labels;       ///< 0 = zero band, k >= 1 = domain id
  std::vector<int> band_labels;  ///< zero band component id (>= 1), 0 on domains
  std::vector<NodalDomain> domains;          ///< domains[k-1] has id k
  std::vector<ZeroBandComponent> bands;      ///< bands[k-1] has id k
  /// Pairs (a, b), a < b, of domains sharing a stencil edge or a zero band component.
  std::vector<std::pair<int, int>> adjacency;

  int count() const { return static_cast<int>(domains.size()); }
  int positive_count() const;
  int negative_count() const;
  const NodalDomain& domain(int id) const { return domains.at(static_cast<std::size_t>(id - 1)); }
  bool adjacent(int a, int b) const;
  /// Whole-field check: some nodal-line band component or sign-change edge
  /// reaches a node next to the boundary. The Dirichlet collar alone does not count.
  bool nodal_line_touches_boundary() const;
};

/// Flood fill with threshold tau (default 1e-3 ||v||_inf). The zero field has
/// zero domains.
NodalDecomposition decompose(const ScalarField& v, std::optional<double> tau = std::nullopt);

/// True iff a zero band component adjacent to this domain and to the boundary
/// is a nodal line, or the domain has a sign-change edge next to the boundary.
bool touches_boundary(const NodalDecomposition& d, int domain_id);

/// Domain containing the origin nodes; nullopt when they fall in the zero band
/// or in several domains. Throws std::invalid_argument for domains without the origin.
std::optional<int> contains_origin(const NodalDecomposition& d);

struct DomainSymmetry {
  int id = 0;
  bool symmetric = false;
  double mismatch_fraction = 0.0;
};

/// Invariance of each domain's indicator under every group element (node
/// permutations; the grid must conform to the group).
std::vector<DomainSymmetry> domain_symmetry_check(const NodalDecomposition& d, const SymmetryGroup& g);

/// v restricted to one domain (zero elsewhere, including the zero band).
ScalarField restrict_to_domain(const ScalarField& v, const NodalDecomposition& d, int domain_id);

/// field_energy of v chi_D for every domain, in id order.
std::vector<EnergyReport> per_domain_energy(const ScalarField& v, const NodalDecomposition& d, double p);

}  // namespace lef
