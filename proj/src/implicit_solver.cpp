#include "lef/implicit_solver.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lef/errors.hpp"
#include "lef/kernels.hpp"

namespace lef {

namespace {
// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct PolarFFTSolver::Impl {
  GridPtr grid;
  int n_r = 0, n_theta = 0, n_modes = 0;
  double* real_buf = nullptr;
  fftw_complex* spec_buf = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> omega;  // angular eigenvalues 2 - 2 cos(2 pi k / n_theta)
  std::vector<double> c_prime;
  std::vector<double> d_re, d_im;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(real_buf);
    fftw_free(spec_buf);
  }
};

PolarFFTSolver::PolarFFTSolver(GridPtr grid) : impl_(std::make_unique<Impl>()) {
  if (grid->kind() != GridKind::polar) throw std::invalid_argument("PolarFFTSolver needs a polar grid");
  auto& s = *impl_;
  s.grid = std::move(grid);
  s.n_r = s.grid->n_r();
  s.n_theta = s.grid->n_theta();
  s.n_modes = s.n_theta / 2 + 1;
  s.omega.resize(s.n_modes);
  for (int k = 0; k < s.n_modes; ++k)
    s.omega[k] = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / s.n_theta);
  s.c_prime.resize(s.n_r);
  s.d_re.resize(s.n_r);
  s.d_im.resize(s.n_r);

  std::lock_guard<std::mutex> lock(planner_mutex());
  s.real_buf = fftw_alloc_real(static_cast<std::size_t>(s.n_r) * s.n_theta);
  s.spec_buf = fftw_alloc_complex(static_cast<std::size_t>(s.n_r) * s.n_modes);
  int n[1] = {s.n_theta};
  // FFTW_ESTIMATE keeps the chosen algorithm, and hence rounding, reproducible.
  s.forward = fftw_plan_many_dft_r2c(1, n, s.n_r, s.real_buf, nullptr, 1, s.n_theta, s.spec_buf,
                                     nullptr, 1, s.n_modes, FFTW_ESTIMATE);
  s.backward = fftw_plan_many_dft_c2r(1, n, s.n_r, s.spec_buf, nullptr, 1, s.n_modes, s.real_buf,
                                      nullptr, 1, s.n_theta, FFTW_ESTIMATE);
  if (!s.forward || !s.backward) throw SolverError("FFTW plan creation failed");
}

PolarFFTSolver::~PolarFFTSolver() = default;

void PolarFFTSolver::solve(double dt, std::span<const double> rhs, std::span<double> x) {
  auto& s = *impl_;
  const auto& pc = s.grid->polar_coefficients();
  const std::size_t n = static_cast<std::size_t>(s.n_r) * s.n_theta;
  std::copy(rhs.begin(), rhs.begin() + n, s.real_buf);
  fftw_execute(s.forward);

  for (int k = 0; k < s.n_modes; ++k) {
    // Tridiagonal in r: -dt*rf[i-1] x[i-1] + b_i x[i] - dt*rf[i] x[i+1] = rhs_k[i].
    auto diag = [&](int i) {
      double d = pc.mass[i] + dt * (pc.boundary[i] + pc.angular[i] * s.omega[k]);
      if (i > 0) d += dt * pc.radial_face[i - 1];
      if (i + 1 < s.n_r) d += dt * pc.radial_face[i];
      return d;
    };
    fftw_complex* col = s.spec_buf + k;
    auto at = [&](int i) -> fftw_complex& { return col[static_cast<std::size_t>(i) * s.n_modes]; };
    double denom = diag(0);
    s.c_prime[0] = s.n_r > 1 ? -dt * pc.radial_face[0] / denom : 0.0;
    s.d_re[0] = at(0)[0] / denom;
    s.d_im[0] = at(0)[1] / denom;
    for (int i = 1; i < s.n_r; ++i) {
      const double lower = -dt * pc.radial_face[i - 1];
      denom = diag(i) - lower * s.c_prime[i - 1];
      s.c_prime[i] = i + 1 < s.n_r ? -dt * pc.radial_face[i] / denom : 0.0;
      s.d_re[i] = (at(i)[0] - lower * s.d_re[i - 1]) / denom;
      s.d_im[i] = (at(i)[1] - lower * s.d_im[i - 1]) / denom;
    }
    at(s.n_r - 1)[0] = s.d_re[s.n_r - 1];
    at(s.n_r - 1)[1] = s.d_im[s.n_r - 1];
    for (int i = s.n_r - 2; i >= 0; --i) {
      at(i)[0] = s.d_re[i] - s.c_prime[i] * at(i + 1)[0];
      at(i)[1] = s.d_im[i] - s.c_prime[i] * at(i + 1)[1];
    }
  }

  fftw_execute(s.backward);
  const double scale = 1.0 / s.n_theta;
  for (std::size_t i = 0; i < n; ++i) x[i] = s.real_buf[i] * scale;
}

CGSolver::CGSolver(GridPtr grid, double tol, int max_iter, bool serial)
    : grid_(std::move(grid)), tol_(tol), max_iter_(max_iter), serial_(serial) {
  const std::size_t n = grid_->size();
  r_.resize(n);
  z_.resize(n);
  q_.resize(n);
  d_.resize(n);
  inv_diag_.resize(n);
}

void CGSolver::solve(double dt, std::span<const double> rhs, std::span<double> x) {
  const Grid& g = *grid_;
  const auto& m = g.mass();
  const std::size_t n = g.size();
  auto apply = [&](std::span<const double> v, std::span<double> out) {
    if (serial_) kernels::serial::stiffness_apply(g, v, out);
    else kernels::stiffness_apply(g, v, out);
    for (std::size_t i = 0; i < n; ++i) out[i] = m[i] * v[i] + dt * out[i];
  };
  auto dot = [&](std::span<const double> a, std::span<const double> b) {
    return serial_ ? kernels::serial::dot(a, b) : kernels::dot(a, b);
  };
  for (std::size_t i = 0; i < n; ++i) inv_diag_[i] = 1.0 / (m[i] + dt * g.diag()[i]);

  apply(x, q_);
  for (std::size_t i = 0; i < n; ++i) r_[i] = rhs[i] - q_[i];
  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  if (rhs_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    last_iterations_ = 0;
    return;
  }
  for (std::size_t i = 0; i < n; ++i) z_[i] = inv_diag_[i] * r_[i];
  d_ = z_;
  double rz = dot(r_, z_);
  for (int it = 0; it < max_iter_; ++it) {
    if (std::sqrt(dot(r_, r_)) <= tol_ * rhs_norm) {
      last_iterations_ = it;
      return;
    }
    apply(d_, q_);
    const double alpha = rz / dot(d_, q_);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * d_[i];
      r_[i] -= alpha * q_[i];
      z_[i] = inv_diag_[i] * r_[i];
    }
    const double rz_new = dot(r_, z_);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) d_[i] = z_[i] + beta * d_[i];
  }
  throw SolverError("CG did not reach relative residual " + std::to_string(tol_) + " in " +
                    std::to_string(max_iter_) + " iterations");
}

std::unique_ptr<ImplicitSolver> make_implicit_solver(const GridPtr& grid) {
  if (grid->kind() == GridKind::polar) return std::make_unique<PolarFFTSolver>(grid);
  return std::make_unique<CGSolver>(grid);
}

}  // namespace lef
