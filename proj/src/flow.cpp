#include "lef/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "lef/energy.hpp"
#include "lef/errors.hpp"
#include "lef/kernels.hpp"
#include "lef/spectrum.hpp"

namespace lef {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::DecayToZero: return "DecayToZero";
    case Outcome::Blowup: return "Blowup";
    case Outcome::ConvergedSteady: return "ConvergedSteady";
    case Outcome::MaxTimeReached: return "MaxTimeReached";
  }
  return "unknown";
}

namespace {

// Kernel table so that one code path serves both the parallel and the serial run.
struct Ops {
  void (*stiffness_apply)(const Grid&, std::span<const double>, std::span<double>);
  double (*dirichlet_form)(const Grid&, std::span<const double>);
  double (*power_integral)(const Grid&, std::span<const double>, double);
  double (*weighted_dot)(const Grid&, std::span<const double>, std::span<const double>);
  void (*imex_rhs)(const Grid&, std::span<const double>, double, double, std::span<double>);
  double (*sup_norm)(std::span<const double>);
  kernels::ResidualParts (*residual_parts)(const Grid&, std::span<const double>, std::span<const double>, double);
};

const Ops& ops(bool serial) {
  static const Ops par{kernels::stiffness_apply, kernels::dirichlet_form, kernels::power_integral,
                       kernels::weighted_dot, kernels::imex_rhs, kernels::sup_norm,
                       kernels::elliptic_residual_parts};
  static const Ops ser{kernels::serial::stiffness_apply, kernels::serial::dirichlet_form,
                       kernels::serial::power_integral, kernels::serial::weighted_dot,
                       kernels::serial::imex_rhs, kernels::serial::sup_norm,
                       kernels::serial::elliptic_residual_parts};
  return serial ? ser : par;
}

bool is_sign_changing(std::span<const double> v, double sup) {
  const double tau = 1e-3 * sup;
  bool pos = false, neg = false;
  for (double x : v) {
    pos = pos || x > tau;
    neg = neg || x < -tau;
  }
  return pos && neg;
}

int sign_of_extremum(std::span<const double> v) {
  double best = 0.0;
  int sign = 0;
  for (double x : v) {
    if (!std::isfinite(x)) return x > 0 ? 1 : (x < 0 ? -1 : sign);
    if (std::abs(x) > best) {
      best = std::abs(x);
      sign = x > 0 ? 1 : -1;
    }
  }
  return sign;
}

}  // namespace

FlowStepper::FlowStepper(GridPtr grid, bool serial) : grid_(std::move(grid)), serial_(serial) {
  if (serial_) solver_ = std::make_unique<CGSolver>(grid_, 1e-12, 20000, true);
  else solver_ = make_implicit_solver(grid_);
  rhs_.resize(grid_->size());
}

void FlowStepper::step(std::span<const double> v, double p, double dt, std::span<double> out) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  ops(serial_).imex_rhs(*grid_, v, p, dt, rhs_);
  if (out.data() != v.data()) std::copy(v.begin(), v.end(), out.begin());
  solver_->solve(dt, rhs_, out);
}

ScalarField step(const ScalarField& v, double p, double dt) {
  FlowStepper st(v.grid());
  ScalarField out(v.grid(), v.time() + dt);
  st.step(v.span(), p, dt, out.span());
  return out;
}

ScalarField heat_step(const ScalarField& v, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("heat_step: dt must be positive");
  auto solver = make_implicit_solver(v.grid());
  const auto& m = v.grid_ref().mass();
  std::vector<double> rhs(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) rhs[i] = m[i] * v[i];
  ScalarField out = v;
  out.set_time(v.time() + dt);
  solver->solve(dt, rhs, out.span());
  return out;
}

double stable_dt(double sup, double p, const FlowConfig& cfg) {
  const double rate = p * std::pow(sup, p - 1.0);
  return rate > 0.0 ? std::min(cfg.dt_max, cfg.c_stab / rate) : cfg.dt_max;
}

double first_dirichlet_eigenvalue(const GridPtr& grid) {
  static std::mutex mu;
  static std::map<const Grid*, std::pair<std::weak_ptr<const Grid>, double>> cache;
  {
    std::lock_guard lock(mu);
    auto it = cache.find(grid.get());
    if (it != cache.end() && it->second.first.lock() == grid) return it->second.second;
  }
  const auto op = assemble_linearized(ScalarField(grid), 2.0);
  const double l1 = lowest_eigenpairs(op, 1).values.front();
  std::lock_guard lock(mu);
  cache[grid.get()] = {grid, l1};
  return l1;
}

Trajectory evolve(const ScalarField& v0, double p, const FlowConfig& cfg) {
  if (!(p > 1.0)) throw std::invalid_argument("evolve: p must exceed 1");
  if (!v0.grid()) throw std::invalid_argument("evolve: field has no grid");
  if (!(cfg.decay_factor < cfg.blowup_factor)) throw std::invalid_argument("evolve: decay threshold must be below blow-up threshold");
  if (cfg.residual_every < 1 || cfg.record_every < 1) throw std::invalid_argument("evolve: sampling periods must be positive");

  const GridPtr& grid = v0.grid();
  const Grid& g = *grid;
  const Ops& op = ops(cfg.serial);
  const std::size_t n = g.size();
  Trajectory tr;

  const double sup0 = op.sup_norm(v0.span());
  tr.decay_threshold = cfg.decay_factor * sup0;
  tr.blowup_threshold = cfg.blowup_factor * sup0;

  std::optional<SymmetryProjector> projector;
  if (cfg.group && cfg.project_every > 0) projector.emplace(g, *cfg.group);
  double lambda1 = 0.0;
  if (cfg.early_exit) lambda1 = cfg.lambda1 ? *cfg.lambda1 : first_dirichlet_eigenvalue(grid);

  std::vector<double> v = v0.values(), next(n), ku(n), diff(n);
  auto energy_of = [&](std::span<const double> u) {
    return 0.5 * op.dirichlet_form(g, u) - op.power_integral(g, u, p + 1.0) / (p + 1.0);
  };
  auto residual_of = [&](std::span<const double> u) {
    op.stiffness_apply(g, u, ku);
    const auto parts = op.residual_parts(g, u, ku, p);
    return parts.norm_sq > 0.0 ? std::sqrt(parts.residual_sq / parts.norm_sq) : 0.0;
  };
  auto track_residual = [&](double res, double sup) {
    if (!cfg.keep_snapshots) return;
    if (tr.min_residual < 0.0 || res < tr.min_residual) {
      tr.min_residual = res;
      tr.min_residual_field = ScalarField(grid, v, 0.0);
    }
    if (is_sign_changing(v, sup) &&
        (tr.min_residual_sign_changing_value < 0.0 || res < tr.min_residual_sign_changing_value)) {
      tr.min_residual_sign_changing_value = res;
      tr.min_residual_sign_changing = ScalarField(grid, v, 0.0);
    }
  };
  auto nodal_count = [&](std::span<const double> u) {
    return cfg.record_nodal_count ? decompose(ScalarField(grid, {u.begin(), u.end()})).count() : -1;
  };

  double t = v0.time();
  double energy = energy_of(v);
  double sup = sup0;
  double residual = sup0 > 0.0 ? residual_of(v) : 0.0;
  tr.samples.push_back({t, 0.0, energy, sup, residual, 0.0, 0.0, nodal_count(v)});
  if (sup0 > 0.0) track_residual(residual, sup);

  auto finish = [&](Outcome o, std::string why) {
    tr.outcome = o;
    tr.reason = std::move(why);
    tr.final_field = ScalarField(grid, v, t);
    if (o == Outcome::Blowup) tr.blowup_sign = sign_of_extremum(v);
    if (tr.samples.back().t != t) {
      const double res = std::isfinite(sup) ? residual_of(v) : -1.0;
      tr.samples.push_back({t, 0.0, energy, sup, res, 0.0, 0.0, -1});
    }
    tr.final_residual = tr.samples.back().residual;
    return tr;
  };

  if (sup0 == 0.0) return finish(Outcome::DecayToZero, "zero initial datum");
  if (residual < cfg.steady_tol) return finish(Outcome::ConvergedSteady, "initial datum is steady");

  while (true) {
    if (!std::isfinite(sup) || !std::isfinite(energy)) return finish(Outcome::Blowup, "non-finite values");
    if (sup > tr.blowup_threshold) return finish(Outcome::Blowup, "sup-norm above blow-up threshold");
    if (sup < tr.decay_threshold) return finish(Outcome::DecayToZero, "sup-norm below decay threshold");
    if (cfg.early_exit) {
      if (energy < 0.0) return finish(Outcome::Blowup, "negative energy");
      if (p * std::pow(sup, p - 1.0) < 0.5 * lambda1) return finish(Outcome::DecayToZero, "reaction below half the first eigenvalue");
    }
    if (t >= cfg.t_max) return finish(Outcome::MaxTimeReached, "t_max reached");
    if (tr.steps >= cfg.max_steps) return finish(Outcome::MaxTimeReached, "step limit reached");
    const double dt = stable_dt(sup, p, cfg);
    if (dt < cfg.dt_min) return finish(Outcome::Blowup, "step size underflow");

    FlowStepper* stepper = nullptr;
    static thread_local std::map<std::pair<const Grid*, bool>, std::pair<std::weak_ptr<const Grid>, std::unique_ptr<FlowStepper>>> steppers;
    {
      auto& slot = steppers[{grid.get(), cfg.serial}];
      if (!slot.second || slot.first.lock() != grid) {
        slot.first = grid;
        slot.second = std::make_unique<FlowStepper>(grid, cfg.serial);
      }
      stepper = slot.second.get();
    }
    stepper->step(v, p, dt, next);
    ++tr.steps;
    t += dt;
    if (projector && tr.steps % static_cast<std::size_t>(cfg.project_every) == 0) projector->apply(next);

    for (std::size_t i = 0; i < n; ++i) diff[i] = next[i] - v[i];
    const double dissipation = op.weighted_dot(g, diff, diff) / (dt * dt);
    const double new_energy = energy_of(next);
    if (new_energy > energy + 1e-10 * std::abs(energy)) {
      ++tr.energy_violations;
      tr.max_energy_increase = std::max(tr.max_energy_increase, (new_energy - energy) / std::max(std::abs(energy), 1e-300));
    }
    const double rate = (new_energy - energy) / dt;
    v.swap(next);
    energy = new_energy;
    sup = op.sup_norm(v);

    double res = -1.0;
    if (tr.steps % static_cast<std::size_t>(cfg.residual_every) == 0 && std::isfinite(sup)) {
      res = residual_of(v);
      track_residual(res, sup);
    }
    if (tr.steps % static_cast<std::size_t>(cfg.record_every) == 0)
      tr.samples.push_back({t, dt, energy, sup, res, dissipation, rate, nodal_count(v)});
    if (res >= 0.0 && res < cfg.steady_tol) return finish(Outcome::ConvergedSteady, "elliptic residual below tolerance");
  }
}

bool ThresholdResult::sign_changing() const {
  if (omega_candidate.size() == 0) return false;
  return is_sign_changing(omega_candidate.span(), omega_candidate.sup_norm());
}

ThresholdResult threshold_bisect(const ScalarField& direction, double p, const ThresholdConfig& cfg) {
  if (direction.size() == 0 || direction.is_zero()) throw std::invalid_argument("threshold_bisect: zero direction");
  if (!(cfg.rel_width > 0.0)) throw std::invalid_argument("threshold_bisect: rel_width must be positive");
  ThresholdResult out;
  FlowConfig fc = cfg.flow;
  if (fc.early_exit && !fc.lambda1) fc.lambda1 = first_dirichlet_eigenvalue(direction.grid());

  ScalarField best;
  double best_res = -1.0;
  bool best_steady = false;
  auto run = [&](double lambda) {
    Trajectory tr = evolve(lambda * direction, p, fc);
    out.probes.push_back({lambda, tr.outcome, tr.final_time(), tr.min_residual, tr.blowup_sign});
    const bool decays = tr.outcome == Outcome::DecayToZero;
    if (!decays) {
      const bool steady = tr.outcome == Outcome::ConvergedSteady;
      const ScalarField& snap = cfg.require_sign_change ? tr.min_residual_sign_changing : tr.min_residual_field;
      const double res = steady ? tr.final_residual
                                : (cfg.require_sign_change ? tr.min_residual_sign_changing_value : tr.min_residual);
      const bool usable = steady ? (!cfg.require_sign_change || is_sign_changing(tr.final_field.span(), tr.final_field.sup_norm()))
                                 : (res >= 0.0);
      if (usable && (best_res < 0.0 || res < best_res)) {
        best = steady ? tr.final_field : snap;
        best_res = res;
        best_steady = steady;
      }
      out.blowup_sign = tr.blowup_sign;
    }
    return decays;
  };

  double lambda = cfg.lambda_init > 0.0 ? cfg.lambda_init : 1.0 / direction.sup_norm();
  double lo = 0.0, hi = 0.0;
  int hi_sign = 0;
  if (run(lambda)) {
    lo = lambda;
    for (int k = 0; k < cfg.max_bracket && hi == 0.0; ++k) {
      lambda *= 2.0;
      if (run(lambda)) lo = lambda;
      else hi = lambda;
    }
    if (hi == 0.0) {
      out.diagnostics = "bracket failure: every probe up to lambda = " + std::to_string(lambda) + " decayed";
      return out;
    }
  } else {
    hi = lambda;
    for (int k = 0; k < cfg.max_bracket && lo == 0.0; ++k) {
      lambda *= 0.5;
      if (run(lambda)) lo = lambda;
      else hi = lambda;
    }
    if (lo == 0.0) {
      out.diagnostics = "bracket failure: no decaying probe down to lambda = " + std::to_string(lambda);
      return out;
    }
  }
  hi_sign = out.blowup_sign;
  for (const auto& pr : out.probes)
    if (pr.lambda == hi) hi_sign = pr.blowup_sign;

  while ((hi - lo) / hi >= cfg.rel_width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (run(mid)) {
      lo = mid;
    } else {
      hi = mid;
      hi_sign = out.probes.back().blowup_sign;
    }
  }
  out.lambda_lo = lo;
  out.lambda_hi = hi;
  out.lambda_star = 0.5 * (lo + hi);
  out.bisection_width = (hi - lo) / out.lambda_star;
  out.blowup_sign = hi_sign;
  out.v0 = out.lambda_star * direction;
  out.ok = true;

  if (best_res < 0.0) {
    out.diagnostics = cfg.require_sign_change ? "no sign-changing snapshot on the non-decaying side" : "no snapshot recorded";
    return out;
  }
  out.flow_residual = best_res;
  out.omega_candidate = best;
  out.omega_residual = best_res;
  if (best_steady) out.diagnostics = "near-threshold run converged";
  if (cfg.polish && best_res > cfg.polish_tol) {
    std::optional<SymmetryProjector> proj;
    if (cfg.project_polish && cfg.flow.group) proj.emplace(best.grid_ref(), *cfg.flow.group);
    try {
      NewtonResult nr = newton_polish(best, p, cfg.polish_tol, 40, proj ? &*proj : nullptr);
      out.newton_iterations = nr.iterations;
      const double pe_v0 = field_energy(out.v0, p).energy;
      const double pe_nr = nr.converged ? field_energy(nr.field, p).energy : 0.0;
      if (!nr.converged) {
        out.diagnostics = "Newton polish did not converge (residual " + std::to_string(nr.residual) + ")";
      } else if (nr.field.sup_norm() < 0.1 * best.sup_norm()) {
        out.diagnostics = "Newton polish collapsed towards zero; kept the flow snapshot";
      } else if (pe_nr > pe_v0 + 1e-10 * std::abs(pe_v0)) {
        // The flow cannot raise the energy, so this state is not in the omega-limit of v0.
        out.diagnostics = "Newton polish reached a state above the datum's energy; kept the flow snapshot";
      } else {
        double dist = 0.0;
        for (std::size_t i = 0; i < best.size(); ++i) dist = std::max(dist, std::abs(nr.field[i] - best[i]));
        out.polish_distance = dist / nr.field.sup_norm();
        out.omega_candidate = std::move(nr.field);
        out.omega_residual = nr.residual;
        out.polished = true;
      }
    } catch (const std::exception& e) {
      out.diagnostics = std::string("Newton polish failed: ") + e.what();
    }
  }
  return out;
}

namespace {

ScalarField ray_direction(const ScalarField& u1, const ScalarField& u2, double theta) {
  return std::cos(theta) * u1 + std::sin(theta) * u2;
}

bool better(const RayOutcome& a, const RayOutcome& b) {
  if (a.sign_changing != b.sign_changing) return a.sign_changing;
  if (a.result.polished != b.result.polished) return a.result.polished;
  if (a.result.flow_residual != b.result.flow_residual) return a.result.flow_residual < b.result.flow_residual;
  return a.result.omega_residual < b.result.omega_residual;
}

}  // namespace

RayScanResult ray_scan(const ScalarField& u1, const ScalarField& u2, double p,
                       const std::vector<double>& ratios, const RayScanConfig& cfg) {
  if (u1.grid() != u2.grid()) throw std::invalid_argument("ray_scan: fields on different grids");
  RayScanResult out;
  ThresholdConfig scan_cfg = cfg.threshold;
  scan_cfg.rel_width = std::max(cfg.scan_rel_width, cfg.threshold.rel_width);
  if (scan_cfg.flow.early_exit && !scan_cfg.flow.lambda1) scan_cfg.flow.lambda1 = first_dirichlet_eigenvalue(u1.grid());

  auto run_ray = [&](double theta, double lambda_init, const ThresholdConfig& c) {
    RayOutcome r;
    r.theta = theta;
    ThresholdConfig cc = c;
    cc.lambda_init = lambda_init;
    const ScalarField dir = ray_direction(u1, u2, theta);
    if (dir.is_zero()) {
      r.result.diagnostics = "zero direction";
      return r;
    }
    r.result = threshold_bisect(dir, p, cc);
    r.sign_changing = r.result.ok && r.result.sign_changing();
    return r;
  };

  out.rays.resize(ratios.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < ratios.size(); ++i) out.rays[i] = run_ray(ratios[i], 0.0, scan_cfg);

  // Theta refinement between neighbouring rays whose thresholds blow up with
  // opposite signs: the sign switch along the threshold curve.
  if (cfg.refine_steps > 0) {
    std::vector<std::size_t> order(out.rays.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return out.rays[a].theta < out.rays[b].theta; });
    std::vector<std::pair<RayOutcome, RayOutcome>> brackets;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      const auto& a = out.rays[order[k]];
      const auto& b = out.rays[order[k + 1]];
      if (a.result.ok && b.result.ok && a.result.blowup_sign * b.result.blowup_sign < 0) brackets.push_back({a, b});
    }
    ThresholdConfig fine_cfg = cfg.threshold;
    if (fine_cfg.flow.early_exit && !fine_cfg.flow.lambda1) fine_cfg.flow.lambda1 = scan_cfg.flow.lambda1;
    for (auto [a, b] : brackets) {
      for (int s = 0; s < cfg.refine_steps && std::abs(b.theta - a.theta) > 1e-13; ++s) {
        const double theta = 0.5 * (a.theta + b.theta);
        const double lambda_init = std::min(a.result.lambda_lo, b.result.lambda_lo);
        RayOutcome mid = run_ray(theta, lambda_init, fine_cfg);
        mid.refined = true;
        out.rays.push_back(mid);
        if (!mid.result.ok || mid.result.blowup_sign == 0) break;
        if (mid.result.blowup_sign == a.result.blowup_sign) a = mid;
        else b = mid;
      }
    }
  }

  for (std::size_t i = 0; i < out.rays.size(); ++i)
    if (out.rays[i].result.ok && (!out.best || better(out.rays[i], out.rays[*out.best]))) out.best = i;
  if (out.best && !out.rays[*out.best].sign_changing) out.best.reset();

  // Redo the chosen ray at the requested width.
  if (out.best && cfg.threshold.rel_width < scan_cfg.rel_width) {
    const RayOutcome& b = out.rays[*out.best];
    RayOutcome fine = run_ray(b.theta, b.result.lambda_lo, cfg.threshold);
    fine.refined = true;
    if (fine.result.ok && fine.sign_changing && fine.result.omega_residual <= b.result.omega_residual * 1.000001 + 1e-300) {
      out.rays.push_back(std::move(fine));
      out.best = out.rays.size() - 1;
    } else {
      out.rays.push_back(std::move(fine));
    }
  }
  return out;
}

RestartResult restart_from_nodal_pair(const ScalarField& u, const NodalDecomposition& d, double p,
                                      const std::vector<double>& ratios, const RayScanConfig& cfg) {
  if (d.count() < 3)
    throw std::invalid_argument("nothing to restart: decomposition has " + std::to_string(d.count()) + " nodal domains");
  RestartResult out;
  double best = std::numeric_limits<double>::infinity();
  const auto energies = per_domain_energy(u, d, p);
  for (const auto& [a, b] : d.adjacency) {
    if (d.domain(a).sign == d.domain(b).sign) continue;
    const double e = energies[static_cast<std::size_t>(a - 1)].energy + energies[static_cast<std::size_t>(b - 1)].energy;
    if (e < best) {
      best = e;
      out.domain_a = a;
      out.domain_b = b;
    }
  }
  if (out.domain_a == 0) throw std::invalid_argument("restart: no adjacent pair of opposite sign");
  // u1 positive, u2 negative, matching the ray parametrization.
  int pos = out.domain_a, neg = out.domain_b;
  if (d.domain(pos).sign < 0) std::swap(pos, neg);
  out.u1 = nehari_project(restrict_to_domain(u, d, pos), p).first;
  out.u2 = nehari_project(restrict_to_domain(u, d, neg), p).first;
  out.scan = ray_scan(out.u1, out.u2, p, ratios, cfg);
  return out;
}

}  // namespace lef
