#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lef/field.hpp"
#include "lef/implicit_solver.hpp"
#include "lef/nodal.hpp"

namespace lef {

enum class Outcome { DecayToZero, Blowup, ConvergedSteady, MaxTimeReached };

std::string to_string(Outcome o);

struct FlowConfig {
  double dt_max = 1e-3;
  double c_stab = 0.1;  ///< dt <= c_stab / (p max|v|^{p-1})
  double t_max = 50.0;
  double decay_factor = 1e-6;   ///< decay threshold relative to the initial sup-norm
  double blowup_factor = 1e4;   ///< blow-up threshold relative to the initial sup-norm
  double steady_tol = 1e-6;     ///< elliptic residual for ConvergedSteady
  double dt_min = 1e-14;        ///< smaller steps count as blow-up
  std::size_t max_steps = 50'000'000;
  int residual_every = 10;      ///< steps between residual evaluations
  int record_every = 1;         ///< steps between recorded samples
  int project_every = 0;        ///< symmetry projection period (0 = never)
  std::optional<SymmetryGroup> group;
  /// Negative energy means blow-up; p sup^{p-1} < lambda_1/2 means decay.
  bool early_exit = true;
  /// First Dirichlet eigenvalue of the grid Laplacian, computed on demand
  /// when early_exit is set and this is empty.
  std::optional<double> lambda1;
  bool record_nodal_count = false;
  bool serial = false;  ///< serial kernels and CG instead of the parallel path
  bool keep_snapshots = true;
};

struct TrajectorySample {
  double t = 0.0;
  double dt = 0.0;
  double energy = 0.0;
  double sup_norm = 0.0;
  double residual = -1.0;     ///< negative when not evaluated at this sample
  double dissipation = 0.0;   ///< ||(v_{n+1} - v_n)/dt||_M^2 of the step ending here
  double energy_rate = 0.0;   ///< (E_{n+1} - E_n)/dt of the step ending here
  int nodal_count = -1;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Outcome outcome = Outcome::MaxTimeReached;
  std::string reason;
  ScalarField final_field;
  double final_residual = -1.0;
  std::size_t steps = 0;
  double decay_threshold = 0.0;
  double blowup_threshold = 0.0;
  /// Steps with E_{n+1} > E_n + 1e-10 |E_n|, and the largest relative increase.
  std::size_t energy_violations = 0;
  double max_energy_increase = 0.0;
  /// Snapshot with the smallest elliptic residual seen, and the same
  /// restricted to sign-changing snapshots.
  ScalarField min_residual_field;
  double min_residual = -1.0;
  ScalarField min_residual_sign_changing;
  double min_residual_sign_changing_value = -1.0;
  /// Sign of the largest |v| when the run blew up.
  int blowup_sign = 0;

  double final_time() const { return samples.empty() ? 0.0 : samples.back().t; }
};

/// Time integrator for one grid. Owns the implicit solver and scratch buffers;
/// not shared between threads.
class FlowStepper {
 public:
  FlowStepper(GridPtr grid, bool serial = false);
  /// (M + dt K) v_{n+1} = M (v_n + dt |v_n|^{p-1} v_n).
  void step(std::span<const double> v, double p, double dt, std::span<double> out);
  const GridPtr& grid() const { return grid_; }

 private:
  GridPtr grid_;
  bool serial_;
  std::unique_ptr<ImplicitSolver> solver_;
  std::vector<double> rhs_;
};

ScalarField step(const ScalarField& v, double p, double dt);
/// Pure heat step (no reaction term).
ScalarField heat_step(const ScalarField& v, double dt);

/// dt = min(dt_max, c_stab / (p max|v|^{p-1})).
double stable_dt(double sup, double p, const FlowConfig& cfg);

Trajectory evolve(const ScalarField& v0, double p, const FlowConfig& cfg = {});

/// Smallest Dirichlet eigenvalue of the grid Laplacian (cached per grid).
double first_dirichlet_eigenvalue(const GridPtr& grid);

struct ThresholdConfig {
  FlowConfig flow;
  double rel_width = 1e-3;    ///< stop when (hi - lo)/hi < rel_width
  int max_bracket = 60;
  double lambda_init = 0.0;   ///< initial probe; <= 0 picks 1/||direction||_inf
  bool polish = true;
  double polish_tol = 1e-10;
  bool require_sign_change = false;  ///< candidate restricted to sign-changing snapshots
  bool project_polish = true;        ///< symmetrize Newton iterates when flow.group is set
};

struct ProbeRecord {
  double lambda = 0.0;
  Outcome outcome = Outcome::MaxTimeReached;
  double t_end = 0.0;
  double min_residual = -1.0;
  int blowup_sign = 0;
};

struct ThresholdResult {
  double lambda_star = 0.0;
  double lambda_lo = 0.0;  ///< largest probe that decayed
  double lambda_hi = 0.0;  ///< smallest probe that did not decay
  double bisection_width = 0.0;  ///< (hi - lo)/lambda_star
  ScalarField v0;
  ScalarField omega_candidate;
  double omega_residual = -1.0;   ///< elliptic residual of omega_candidate
  double flow_residual = -1.0;    ///< residual of the snapshot before polishing
  bool polished = false;
  int newton_iterations = 0;
  /// ||polished - snapshot||_inf / ||polished||_inf; negative without polishing.
  double polish_distance = -1.0;
  int blowup_sign = 0;            ///< sign of blow-up at lambda_hi
  std::vector<ProbeRecord> probes;
  bool ok = false;
  std::string diagnostics;

  bool sign_changing() const;
};

/// Bisection on lambda for the datum lambda * direction between decay and
/// non-decay. Bracket failure gives ok = false with diagnostics.
ThresholdResult threshold_bisect(const ScalarField& direction, double p, const ThresholdConfig& cfg = {});

struct RayOutcome {
  double theta = 0.0;
  ThresholdResult result;
  bool sign_changing = false;
  bool refined = false;  ///< produced by theta refinement rather than the scan list
};

struct RayScanConfig {
  ThresholdConfig threshold;
  /// Bisection steps on theta between neighbouring rays whose thresholds blow
  /// up with opposite signs (0 disables refinement). Refinement probes use
  /// threshold.rel_width and stop once the theta bracket is below 1e-13.
  int refine_steps = 40;
  /// Rel width of the scan probes; the chosen ray is redone at threshold.rel_width.
  double scan_rel_width = 1e-3;
};

struct RayScanResult {
  std::vector<RayOutcome> rays;
  std::optional<std::size_t> best;  ///< index into rays
  const ThresholdResult* best_result() const { return best ? &rays[*best].result : nullptr; }
};

/// Thresholds along cos(theta) u1 + sin(theta) u2. Picks a sign-changing
/// candidate, preferring converged polishes and then the closest flow approach
/// (smallest snapshot residual). Scan rays run concurrently.
RayScanResult ray_scan(const ScalarField& u1, const ScalarField& u2, double p,
                       const std::vector<double>& ratios, const RayScanConfig& cfg = {});

struct RestartResult {
  int domain_a = 0, domain_b = 0;
  ScalarField u1, u2;  ///< Nehari-projected restrictions
  RayScanResult scan;
};

/// Restarts the ray scan from the restrictions of u to two adjacent domains of
/// opposite sign (the pair with the smallest energy). Needs at least 3 domains.
RestartResult restart_from_nodal_pair(const ScalarField& u, const NodalDecomposition& d, double p,
                                      const std::vector<double>& ratios, const RayScanConfig& cfg = {});

}  // namespace lef
