#pragma once

#include <vector>

#include "lef/energy.hpp"
#include "lef/field.hpp"

namespace lef {

/// Sampled radial function on [r_in, r_out] with its derivative.
struct RadialProfile {
  std::vector<double> r;
  std::vector<double> u;
  std::vector<double> du;
  double r_in = 0.0;
  double r_out = 0.0;
  double p = 0.0;

  std::size_t size() const { return r.size(); }
  /// Cubic Hermite interpolation; zero outside [r_in, r_out].
  double value_at(double radius) const;
  double derivative_at(double radius) const;
  double max_value() const;
  /// Radius of the sample with the largest value.
  double argmax() const;
};

struct RadialOptions {
  int samples = 4096;
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
};

/// Positive solution of u'' + u'/r + |u|^{p-1}u = 0 on [0, R], u'(0) = 0,
/// u(R) = 0. Throws std::invalid_argument for p <= 1 or R <= 0 and
/// SolverError when no zero is found.
RadialProfile solve_ball(double p, double radius, const RadialOptions& opt = {});

/// Radial solution on the ball with `domains` nodal annuli (1 = positive
/// solution); u(0) > 0.
RadialProfile solve_ball_nodal(double p, double radius, int domains, const RadialOptions& opt = {});

/// Positive solution on the annulus a < r < b by shooting on the initial slope.
RadialProfile solve_annulus(double p, double a, double b, const RadialOptions& opt = {});

/// e^{2 alpha p/(p-1)} w_p(r e^{alpha p}) on [0, e^{-alpha p}], w_p the positive
/// solution on the unit ball. Rejects alpha p > 600.
RadialProfile build_ball_solution_scaled(double p, double alpha, const RadialOptions& opt = {});
RadialProfile rescale_ball(const RadialProfile& unit_ball, double alpha);

/// Piecewise-logarithmic test function on e^{-alpha p} < r < b, peak value 1
/// at b^{1/2} e^{-alpha p/2}. The break radius appears twice in the samples,
/// with the left and right derivatives.
RadialProfile omega_test_function(double p, double alpha, double b, int samples = 4097);

/// 2 pi-weighted Simpson quadrature of u'^2 r and |u|^{p+1} r, split at
/// repeated radii.
EnergyReport radial_energy(const RadialProfile& profile, double p);

/// Energy of e^{2 alpha p/(p-1)} w(r e^{alpha p}) from the energy of w by the
/// scaling identity (no pointwise evaluation, usable for any alpha p).
EnergyReport scaled_ball_energy(const EnergyReport& unit_ball, double alpha);

/// Largest defect, relative to max |u|, when each sample is re-integrated to
/// the next one with the profile's ODE.
double ode_residual(const RadialProfile& profile, double p);

/// Composite Simpson rule on an increasing, possibly nonuniform grid.
double simpson(const std::vector<double>& x, const std::vector<double>& y);

/// Samples sign * profile(|x|) on a grid.
ScalarField to_field(const RadialProfile& profile, const GridPtr& grid, double sign = 1.0);

}  // namespace lef
