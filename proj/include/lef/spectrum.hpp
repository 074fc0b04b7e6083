#pragma once

#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "lef/field.hpp"

namespace lef {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// The grid's stiffness matrix K as an Eigen sparse matrix.
SparseMatrix stiffness_matrix(const Grid& grid);

/// L = -Delta_h - p|u|^{p-1} in the weak form K - M V with V = p|u|^{p-1}.
/// Eigenproblems are solved in the symmetric form
/// A = M^{-1/2} K M^{-1/2} - V, whose eigenvectors are M^{1/2} phi.
struct LinearizedOperator {
  GridPtr grid;
  SparseMatrix stiffness;
  std::vector<double> potential;  ///< V_i = p |u_i|^{p-1} >= 0

  /// A as an explicit sparse matrix (exactly symmetric).
  SparseMatrix symmetric_form() const;
  /// (phi^T K phi - sum m V phi^2) / sum m phi^2.
  double rayleigh_quotient(const std::vector<double>& phi) const;
};

LinearizedOperator assemble_linearized(const ScalarField& u, double p);

struct EigenOptions {
  double tol = 1e-8;       ///< relative residual ||A x - l x|| / (||x|| max(1, |l|))
  int block_size = 4;
  int max_basis = 0;       ///< 0: chosen from k and the dimension
  int max_restarts = 30;
};

struct Eigenpairs {
  std::vector<double> values;                ///< ascending
  std::vector<std::vector<double>> vectors;  ///< nodal values phi, M-normalized
  std::vector<double> residuals;
};

/// k lowest eigenpairs of the operator by block shift-invert Krylov iteration
/// with full reorthogonalization. An optional projector restricts the
/// iteration to G-symmetric fields. Throws SolverError with the achieved
/// residuals when the tolerance is not met.
Eigenpairs lowest_eigenpairs(const LinearizedOperator& op, int k,
                             const SymmetryProjector* projector = nullptr,
                             const EigenOptions& opt = {});

/// Same, on the principal submatrix of the nodes in `subset` (Dirichlet
/// conditions on the removed nodes). Returned vectors live on the subset.
Eigenpairs lowest_eigenpairs_on(const LinearizedOperator& op, const std::vector<std::size_t>& subset,
                                int k, const EigenOptions& opt = {});

/// Number of values below -1e-8 |values[0]|.
int count_negative(const std::vector<double>& ascending_values);

struct HalfDomainResult {
  double mu = 0.0;
  double odd_extension_residual = 0.0;  ///< relative eigen-residual of the odd extension in the full operator
  double full_spectrum_gap = 0.0;       ///< |mu - nearest full eigenvalue| / max(1, |mu|)
  std::size_t half_nodes = 0;
  std::vector<double> odd_extension;    ///< nodal values on the full grid
};

/// First eigenvalue of L on the side {x . n < 0} of the reflection axis of
/// group element `reflection`, with Dirichlet conditions on the axis.
/// `full_values` (ascending eigenvalues of the full operator) is used for the
/// spectrum match. Throws std::invalid_argument if u is not symmetric about the axis.
HalfDomainResult half_domain_mu(const ScalarField& u, double p, const SymmetryGroup& group,
                                int reflection, const std::vector<double>& full_values = {});

struct SpectrumReport {
  std::vector<double> eigenvalues;
  std::vector<double> residuals;
  int morse_index = 0;
  std::optional<std::vector<double>> symmetric_eigenvalues;
  std::optional<int> symmetric_morse_index;
  std::optional<HalfDomainResult> half_domain;
  double elliptic_residual = 0.0;
  /// The listed eigenvalues reproduce the inertia counts.
  bool inertia_consistent = true;
};

/// Number of eigenvalues of L below `shift` from the inertia of an LDL^T
/// factorization; with a group, counted on G-symmetric fields only.
int eigenvalues_below(const LinearizedOperator& op, double shift, const SymmetryGroup* group = nullptr);

struct MorseOptions {
  int initial_k = 8;  ///< eigenpairs listed at least
  /// Residual tolerance of the listed eigenpairs. Near-zero eigenvalues of fine
  /// polar grids sit at a round-off floor of about eps ||A||.
  double listing_tol = 1e-6;
  double residual_precondition = 1e-6;
  bool half_domain = true;  ///< when the group has reflections
};

/// Morse index of a steady state (elliptic residual below 1e-6, otherwise
/// std::invalid_argument): eigenvalues below -1e-8 |lambda_1|. With a group, also the index restricted to
/// G-symmetric fields and, for dihedral groups, the half-domain eigenvalue.
SpectrumReport morse_index(const ScalarField& u, double p, const SymmetryGroup* group = nullptr,
                           const MorseOptions& opt = {});

struct NewtonResult {
  ScalarField field;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Newton iteration on K u - M |u|^{p-1} u = 0 with backtracking on the
/// elliptic residual; symmetrizes every iterate when a projector is given.
NewtonResult newton_polish(const ScalarField& u, double p, double tol = 1e-10, int max_iter = 40,
                           const SymmetryProjector* projector = nullptr);

}  // namespace lef
