#pragma once

#include <memory>
#include <span>

#include "lef/grid.hpp"

namespace lef {

/// Solver for the backward-Euler system (M + dt K) x = rhs of one IMEX step.
/// Instances own scratch buffers and are not shared between threads.
class ImplicitSolver {
 public:
  virtual ~ImplicitSolver() = default;
  /// x holds an initial guess on entry (used by iterative solvers).
  virtual void solve(double dt, std::span<const double> rhs, std::span<double> x) = 0;
};

/// Direct solver for polar grids: real FFT in theta, then one tridiagonal
/// system in r per angular mode.
class PolarFFTSolver final : public ImplicitSolver {
 public:
  explicit PolarFFTSolver(GridPtr grid);
  ~PolarFFTSolver() override;
  PolarFFTSolver(const PolarFFTSolver&) = delete;
  PolarFFTSolver& operator=(const PolarFFTSolver&) = delete;

  void solve(double dt, std::span<const double> rhs, std::span<double> x) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Jacobi-preconditioned conjugate gradients to relative residual `tol`.
class CGSolver final : public ImplicitSolver {
 public:
  explicit CGSolver(GridPtr grid, double tol = 1e-12, int max_iter = 20000, bool serial = false);
  void solve(double dt, std::span<const double> rhs, std::span<double> x) override;
  int last_iterations() const { return last_iterations_; }

 private:
  GridPtr grid_;
  double tol_;
  int max_iter_;
  bool serial_;
  int last_iterations_ = 0;
  std::vector<double> r_, z_, q_, d_, inv_diag_;
};

/// FFT solver on polar grids, CG otherwise.
std::unique_ptr<ImplicitSolver> make_implicit_solver(const GridPtr& grid);

}  // namespace lef
