#pragma once

#include <cmath>
#include <span>

#include "lef/grid.hpp"

/// Data-parallel grid kernels. The functions in lef::kernels use OpenMP; the
/// ones in lef::kernels::serial are straightforward loops kept as the
/// reference implementation for tests and benchmarks.
///
/// Reductions are summed in fixed-size blocks and the block partials are
/// combined in order, so results do not depend on the thread count.
namespace lef::kernels {

/// a -> a^q for a >= 0, with an exact repeated-squaring path for integer q.
class AbsPower {
 public:
  explicit AbsPower(double q);
  double operator()(double a) const {
    if (integer_) {
      double result = 1.0, base = a;
      for (unsigned e = exponent_; e != 0; e >>= 1) {
        if (e & 1u) result *= base;
        base *= base;
      }
      return result;
    }
    return std::pow(a, q_);
  }

 private:
  double q_;
  bool integer_ = false;
  unsigned exponent_ = 0;
};

/// out = K u (stiffness matrix of the discrete Dirichlet form).
void stiffness_apply(const Grid& grid, std::span<const double> u, std::span<double> out);
/// u^T K u.
double dirichlet_form(const Grid& grid, std::span<const double> u);
/// sum_i m_i |u_i|^q.
double power_integral(const Grid& grid, std::span<const double> u, double q);
/// sum_i m_i a_i b_i.
double weighted_dot(const Grid& grid, std::span<const double> a, std::span<const double> b);
/// out_i = |u_i|^{p-1} u_i.
void nonlinearity(std::span<const double> u, double p, std::span<double> out);
/// out_i = m_i (u_i + dt |u_i|^{p-1} u_i): right-hand side of the IMEX step.
void imex_rhs(const Grid& grid, std::span<const double> u, double p, double dt,
              std::span<double> out);
/// sum_i a_i b_i.
double dot(std::span<const double> a, std::span<const double> b);
double sup_norm(std::span<const double> u);
/// ||M^{-1} (K u) - f(u)||_M^2 split as returned pair: (residual^2, ||u||_M^2)
/// where f(u) = |u|^{p-1}u; reuses a K u product supplied by the caller.
struct ResidualParts {
  double residual_sq;
  double norm_sq;
};
ResidualParts elliptic_residual_parts(const Grid& grid, std::span<const double> u,
                                      std::span<const double> ku, double p);

namespace serial {
void stiffness_apply(const Grid& grid, std::span<const double> u, std::span<double> out);
double dirichlet_form(const Grid& grid, std::span<const double> u);
double power_integral(const Grid& grid, std::span<const double> u, double q);
double weighted_dot(const Grid& grid, std::span<const double> a, std::span<const double> b);
void nonlinearity(std::span<const double> u, double p, std::span<double> out);
void imex_rhs(const Grid& grid, std::span<const double> u, double p, double dt,
              std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
double sup_norm(std::span<const double> u);
ResidualParts elliptic_residual_parts(const Grid& grid, std::span<const double> u,
                                      std::span<const double> ku, double p);
}  // namespace serial

}  // namespace lef::kernels
