#pragma once

#include <utility>

#include "lef/field.hpp"

namespace lef {

/// Energy quantities of a field or profile for exponent p:
/// E_p = grad/2 - lp1/(p+1).
struct EnergyReport {
  double grad_norm_sq = 0.0;  ///< ||grad u||_2^2
  double lp1_norm_pow = 0.0;  ///< ||u||_{p+1}^{p+1}
  double energy = 0.0;
  double scaled_energy = 0.0;  ///< p * E_p
  double exponent_p = 0.0;

  static EnergyReport from_norms(double grad_norm_sq, double lp1_norm_pow, double p);
  /// |grad - lp1| / grad, zero for the zero field.
  double nehari_residual() const;
};

inline constexpr double kFourPiE = 4.0 * 3.141592653589793 * 2.718281828459045;
inline constexpr double kEightPiE = 2.0 * kFourPiE;
/// Numerical constant of the upper bound on the sum of the two building blocks.
inline constexpr double kBoundFactor = 4.97;

/// f(a) = e^{2a-1}/a + e^{4a}.
double f_alpha(double alpha);
double f_alpha_derivative(double alpha);

struct AlphaOptimum {
  double alpha_bar = 0.0;
  double f_value = 0.0;
  double derivative = 0.0;  ///< f'(alpha_bar), kept for the optimality check
};

/// Golden-section bracket on (1e-3, 2) followed by Newton on f' until
/// |f'| < 1e-8.
AlphaOptimum minimize_f();

/// Energy of a grid field: gradient term from the discrete Dirichlet form u^T K u,
/// power term from nodal quadrature.
EnergyReport field_energy(const ScalarField& v, double p);

/// Scales v onto the Nehari manifold; returns (t* v, t*). Throws
/// std::invalid_argument for the zero field.
std::pair<ScalarField, double> nehari_project(const ScalarField& v, double p);

struct CombinedEnergy {
  EnergyReport report;        ///< energy of t1 u1 + t2 u2
  double sum_of_parts = 0.0;  ///< E(u1) + E(u2)
  /// t1 t2 u1^T K u2: the stencil couples supports that touch at neighbouring
  /// nodes. Zero when the supports are separated by at least one node.
  double interaction = 0.0;
  bool on_nehari = false;   ///< both parts on the Nehari manifold (1e-8)
  bool bound_holds = true;  ///< E(t1 u1 + t2 u2) <= E(u1) + E(u2), checked when on_nehari
};

/// Energy of t1 u1 + t2 u2 for fields with disjoint nodal supports. Throws
/// std::invalid_argument when some node is nonzero in both.
CombinedEnergy combined_energy(const ScalarField& u1, const ScalarField& u2, double t1, double t2,
                               double p);

/// ||M^{-1} K u - |u|^{p-1} u||_M / ||u||_M, the relative elliptic residual.
double elliptic_residual(const ScalarField& u, double p);

struct UpperBoundReport {
  double p = 0.0;
  double alpha = 0.0;
  double annulus_scaled_energy = 0.0;  ///< pE_p of the annulus solution
  double ball_scaled_energy = 0.0;     ///< pE_p of the concentrated ball solution
  double sum = 0.0;
  double target = kBoundFactor * kFourPiE;
  double limit = 0.0;  ///< 4 pi e f(alpha), the large-p value of the sum
};

/// Sum of pE_p over the two radial building blocks on the unit disk: the
/// annulus e^{-alpha p} < r < 1 and the ball r < e^{-alpha p}. Without alpha the
/// minimizer of f is used.
UpperBoundReport upper_bound_report(double p);
UpperBoundReport upper_bound_report(double p, double alpha);

}  // namespace lef
