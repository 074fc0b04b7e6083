#include "lef/energy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lef/kernels.hpp"
#include "lef/radial.hpp"

namespace lef {

EnergyReport EnergyReport::from_norms(double grad, double lp1, double p) {
  EnergyReport r;
  r.grad_norm_sq = grad;
  r.lp1_norm_pow = lp1;
  r.exponent_p = p;
  r.energy = grad / 2.0 - lp1 / (p + 1.0);
  r.scaled_energy = p * r.energy;
  return r;
}

double EnergyReport::nehari_residual() const {
  if (grad_norm_sq == 0.0) return 0.0;
  return std::abs(grad_norm_sq - lp1_norm_pow) / grad_norm_sq;
}

double f_alpha(double a) { return std::exp(2.0 * a - 1.0) / a + std::exp(4.0 * a); }

double f_alpha_derivative(double a) {
  return std::exp(2.0 * a - 1.0) * (2.0 / a - 1.0 / (a * a)) + 4.0 * std::exp(4.0 * a);
}

namespace {
double f_alpha_second(double a) {
  return std::exp(2.0 * a - 1.0) * (4.0 / a - 4.0 / (a * a) + 2.0 / (a * a * a)) +
         16.0 * std::exp(4.0 * a);
}
}  // namespace

AlphaOptimum minimize_f() {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 1e-3, b = 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f_alpha(c), fd = f_alpha(d);
  while (b - a > 1e-9) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f_alpha(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f_alpha(d);
    }
  }
  // Golden section alone stalls near |f'| ~ sqrt(eps); finish with Newton on f'.
  double x = 0.5 * (a + b);
  for (int it = 0; it < 50 && std::abs(f_alpha_derivative(x)) >= 1e-12; ++it)
    x -= f_alpha_derivative(x) / f_alpha_second(x);
  return {x, f_alpha(x), f_alpha_derivative(x)};
}

EnergyReport field_energy(const ScalarField& v, double p) {
  const Grid& g = v.grid_ref();
  return EnergyReport::from_norms(kernels::dirichlet_form(g, v.span()),
                                  kernels::power_integral(g, v.span(), p + 1.0), p);
}

std::pair<ScalarField, double> nehari_project(const ScalarField& v, double p) {
  const EnergyReport e = field_energy(v, p);
  if (v.is_zero() || e.lp1_norm_pow == 0.0)
    throw std::invalid_argument("cannot project the zero field onto the Nehari manifold");
  const double t = std::pow(e.grad_norm_sq / e.lp1_norm_pow, 1.0 / (p - 1.0));
  return {t * v, t};
}

CombinedEnergy combined_energy(const ScalarField& u1, const ScalarField& u2, double t1, double t2,
                               double p) {
  if (u1.grid() != u2.grid()) throw std::invalid_argument("combined_energy: fields on different grids");
  for (std::size_t i = 0; i < u1.size(); ++i)
    if (u1[i] != 0.0 && u2[i] != 0.0)
      throw std::invalid_argument("combined_energy: supports overlap at node " + std::to_string(i));
  CombinedEnergy out;
  out.report = field_energy(t1 * u1 + t2 * u2, p);
  const EnergyReport e1 = field_energy(u1, p), e2 = field_energy(u2, p);
  out.sum_of_parts = e1.energy + e2.energy;
  std::vector<double> ku2(u2.size());
  kernels::stiffness_apply(u2.grid_ref(), u2.span(), ku2);
  out.interaction = t1 * t2 * kernels::dot(u1.span(), ku2);
  out.on_nehari = e1.nehari_residual() < 1e-8 && e2.nehari_residual() < 1e-8;
  if (out.on_nehari)
    out.bound_holds = out.report.energy <= out.sum_of_parts + 1e-8 * std::abs(out.sum_of_parts);
  return out;
}

double elliptic_residual(const ScalarField& u, double p) {
  const Grid& g = u.grid_ref();
  std::vector<double> ku(u.size());
  kernels::stiffness_apply(g, u.span(), ku);
  const auto parts = kernels::elliptic_residual_parts(g, u.span(), ku, p);
  if (parts.norm_sq == 0.0) return 0.0;
  return std::sqrt(parts.residual_sq / parts.norm_sq);
}

UpperBoundReport upper_bound_report(double p, double alpha) {
  if (!(p > 1.0)) throw std::invalid_argument("exponent p must be > 1");
  UpperBoundReport rep;
  rep.p = p;
  rep.alpha = alpha;
  const double a = std::exp(-alpha * p);
  rep.annulus_scaled_energy = radial_energy(solve_annulus(p, a, 1.0), p).scaled_energy;
  const EnergyReport w = radial_energy(solve_ball(p, 1.0), p);
  rep.ball_scaled_energy = scaled_ball_energy(w, alpha).scaled_energy;
  rep.sum = rep.annulus_scaled_energy + rep.ball_scaled_energy;
  rep.limit = kFourPiE * f_alpha(alpha);
  return rep;
}

UpperBoundReport upper_bound_report(double p) { return upper_bound_report(p, minimize_f().alpha_bar); }

}  // namespace lef
