#include "lef/kernels.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace lef::kernels {

namespace {

constexpr std::size_t kBlock = 2048;

template <class Term>
double blocked_sum(std::size_t n, Term&& term) {
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

inline std::ptrdiff_t ssize(std::size_t n) { return static_cast<std::ptrdiff_t>(n); }

}  // namespace

AbsPower::AbsPower(double q) : q_(q) {
  if (q >= 0.0 && q <= 64.0 && q == std::floor(q)) {
    integer_ = true;
    exponent_ = static_cast<unsigned>(q);
  }
}

void stiffness_apply(const Grid& grid, std::span<const double> u, std::span<double> out) {
  const auto& rp = grid.row_ptr();
  const auto& col = grid.col();
  const auto& c = grid.coupling();
  const auto& d = grid.diag();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(u.size()); ++i) {
    double s = d[i] * u[i];
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s -= c[k] * u[col[k]];
    out[i] = s;
  }
}

double dirichlet_form(const Grid& grid, std::span<const double> u) {
  const auto& rp = grid.row_ptr();
  const auto& col = grid.col();
  const auto& c = grid.coupling();
  const auto& d = grid.diag();
  return blocked_sum(u.size(), [&](std::size_t i) {
    double s = d[i] * u[i];
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s -= c[k] * u[col[k]];
    return u[i] * s;
  });
}

double power_integral(const Grid& grid, std::span<const double> u, double q) {
  const AbsPower pw(q);
  const auto& m = grid.mass();
  return blocked_sum(u.size(), [&](std::size_t i) { return m[i] * pw(std::abs(u[i])); });
}

double weighted_dot(const Grid& grid, std::span<const double> a, std::span<const double> b) {
  const auto& m = grid.mass();
  return blocked_sum(a.size(), [&](std::size_t i) { return m[i] * a[i] * b[i]; });
}

void nonlinearity(std::span<const double> u, double p, std::span<double> out) {
  const AbsPower pw(p - 1.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(u.size()); ++i) out[i] = pw(std::abs(u[i])) * u[i];
}

void imex_rhs(const Grid& grid, std::span<const double> u, double p, double dt,
              std::span<double> out) {
  const AbsPower pw(p - 1.0);
  const auto& m = grid.mass();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(u.size()); ++i)
    out[i] = m[i] * (u[i] + dt * pw(std::abs(u[i])) * u[i]);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double sup_norm(std::span<const double> u) {
  double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(u.size()); ++i) best = std::max(best, std::abs(u[i]));
  return best;
}

ResidualParts elliptic_residual_parts(const Grid& grid, std::span<const double> u,
                                      std::span<const double> ku, double p) {
  const AbsPower pw(p - 1.0);
  const auto& m = grid.mass();
  const double res = blocked_sum(u.size(), [&](std::size_t i) {
    const double r = pw(std::abs(u[i])) * u[i] - ku[i] / m[i];
    return m[i] * r * r;
  });
  const double nrm = blocked_sum(u.size(), [&](std::size_t i) { return m[i] * u[i] * u[i]; });
  return {res, nrm};
}

namespace serial {

void stiffness_apply(const Grid& grid, std::span<const double> u, std::span<double> out) {
  const auto& rp = grid.row_ptr();
  for (std::size_t i = 0; i < u.size(); ++i) {
    double s = grid.diag()[i] * u[i];
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s -= grid.coupling()[k] * u[grid.col()[k]];
    out[i] = s;
  }
}

double dirichlet_form(const Grid& grid, std::span<const double> u) {
  std::vector<double> ku(u.size());
  stiffness_apply(grid, u, ku);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * ku[i];
  return s;
}

double power_integral(const Grid& grid, std::span<const double> u, double q) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += grid.mass()[i] * std::pow(std::abs(u[i]), q);
  return s;
}

double weighted_dot(const Grid& grid, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += grid.mass()[i] * a[i] * b[i];
  return s;
}

void nonlinearity(std::span<const double> u, double p, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::pow(std::abs(u[i]), p - 1.0) * u[i];
}

void imex_rhs(const Grid& grid, std::span<const double> u, double p, double dt,
              std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = grid.mass()[i] * (u[i] + dt * std::pow(std::abs(u[i]), p - 1.0) * u[i]);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sup_norm(std::span<const double> u) {
  double best = 0.0;
  for (double v : u) best = std::max(best, std::abs(v));
  return best;
}

ResidualParts elliptic_residual_parts(const Grid& grid, std::span<const double> u,
                                      std::span<const double> ku, double p) {
  double res = 0.0, nrm = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double m = grid.mass()[i];
    const double r = std::pow(std::abs(u[i]), p - 1.0) * u[i] - ku[i] / m;
    res += m * r * r;
    nrm += m * u[i] * u[i];
  }
  return {res, nrm};
}

}  // namespace serial

}  // namespace lef::kernels
