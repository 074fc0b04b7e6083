#include "lef/spectrum.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lef/energy.hpp"
#include "lef/errors.hpp"
#include "lef/kernels.hpp"

namespace lef {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Projection = std::function<void(VectorXd&)>;

struct CoreResult {
  std::vector<double> values;
  std::vector<VectorXd> vectors;  // unit vectors of the symmetric form
  std::vector<double> residuals;
};

// Orthonormalizes the columns of `block` against the first `m` columns of Q and
// among themselves (two passes of Gram-Schmidt). Columns that collapse are
// replaced by fresh random directions.
void orthonormalize_block(const MatrixXd& Q, int m, MatrixXd& block, std::mt19937_64& rng,
                          const Projection& project) {
  std::normal_distribution<double> gauss;
  for (int c = 0; c < block.cols(); ++c) {
    for (int attempt = 0; attempt < 5; ++attempt) {
      VectorXd v = block.col(c);
      const double before = v.norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (m > 0) v -= Q.leftCols(m) * (Q.leftCols(m).transpose() * v);
        for (int d = 0; d < c; ++d) v -= block.col(d).dot(v) * block.col(d);
      }
      const double after = v.norm();
      if (after > 1e-10 * before && after > 0.0) {
        block.col(c) = v / after;
        break;
      }
      VectorXd fresh(block.rows());
      for (auto& x : fresh) x = gauss(rng);
      if (project) project(fresh);
      block.col(c) = fresh;
      if (attempt == 4) throw SolverError("eigensolver: Krylov basis cannot be extended");
    }
  }
}

struct PassResult {
  CoreResult core;
  bool converged = false;
};

// One shift-invert Krylov run for B = (A - sigma)^{-1} with thick restarts.
// `factor` holds the LDL^T factorization of A - sigma I; `start` seeds the
// basis (random when empty).
PassResult krylov_pass(const SparseMatrix& A, const Eigen::SimplicialLDLT<SparseMatrix>& factor,
                       double sigma, int k, int wanted, const Projection& project, double tol,
                       const EigenOptions& opt, const std::vector<VectorXd>& start,
                       std::mt19937_64& rng) {
  const int n = static_cast<int>(A.rows());
  const int b = std::min(opt.block_size, n);
  int max_basis = opt.max_basis > 0 ? opt.max_basis : std::max(60, 8 * k + 8 * b);
  max_basis = std::min(max_basis, n);
  max_basis = std::max(max_basis, std::min(n, k + 2 * b));

  std::normal_distribution<double> gauss;
  MatrixXd Q(n, max_basis);
  MatrixXd T = MatrixXd::Zero(max_basis, max_basis);
  const int seeds = std::max<int>(b, std::min<int>(static_cast<int>(start.size()), max_basis / 2));
  MatrixXd block(n, seeds);
  for (int c = 0; c < seeds; ++c) {
    VectorXd v(n);
    if (c < static_cast<int>(start.size())) v = start[c];
    else
      for (auto& x : v) x = gauss(rng);
    if (project) project(v);
    block.col(c) = v;
  }
  orthonormalize_block(Q, 0, block, rng, project);
  int m = 0;

  PassResult pass;
  CoreResult& best = pass.core;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    while (true) {
      const int add = std::min<int>(static_cast<int>(block.cols()), max_basis - m);
      if (add <= 0) break;
      Q.middleCols(m, add) = block.leftCols(add);
      MatrixXd W(n, add);
      for (int c = 0; c < add; ++c) {
        VectorXd w = factor.solve(VectorXd(Q.col(m + c)));
        if (project) project(w);
        W.col(c) = w;
      }
      const MatrixXd coeff = Q.leftCols(m + add).transpose() * W;
      T.block(0, m, m + add, add) = coeff;
      T.block(m, 0, add, m + add) = coeff.transpose();
      m += add;
      if (m >= max_basis) break;
      block = W.rightCols(std::min<int>(add, b));
      orthonormalize_block(Q, m, block, rng, project);
    }

    // Rayleigh-Ritz: largest theta of B <-> lowest lambda of A.
    const MatrixXd Tm = 0.5 * (T.topLeftCorner(m, m) + T.topLeftCorner(m, m).transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Tm);
    const int keep = std::min(m, k + b);
    best.values.assign(k, 0.0);
    best.vectors.assign(k, VectorXd());
    best.residuals.assign(k, 0.0);
    MatrixXd ritz(n, keep);
    VectorXd theta(keep);
    bool converged = true;
    for (int j = 0; j < keep; ++j) {
      const int col = m - 1 - j;
      theta(j) = es.eigenvalues()(col);
      ritz.col(j) = Q.leftCols(m) * es.eigenvectors().col(col);
      if (j >= k) continue;
      const double lambda = sigma + 1.0 / theta(j);
      VectorXd x = ritz.col(j);
      x.normalize();
      const double res = (A * x - lambda * x).norm() / std::max(1.0, std::abs(lambda));
      best.values[j] = lambda;
      best.vectors[j] = x;
      best.residuals[j] = res;
      if (j < wanted && !(res < tol)) converged = false;
    }
    if (converged || m < max_basis) {
      pass.converged = converged || m == n;
      return pass;
    }

    // Thick restart: keep the leading Ritz vectors and expand from the
    // unconverged wanted ones.
    Q.leftCols(keep) = ritz;
    T.setZero();
    for (int j = 0; j < keep; ++j) T(j, j) = theta(j);
    m = keep;
    std::vector<int> order;
    for (int j = 0; j < wanted; ++j)
      if (!(best.residuals[j] < tol)) order.push_back(j);
    for (int j = 0; j < keep && static_cast<int>(order.size()) < b; ++j)
      if (std::find(order.begin(), order.end(), j) == order.end()) order.push_back(j);
    block = MatrixXd(n, b);
    for (int c = 0; c < b; ++c) {
      VectorXd w = factor.solve(VectorXd(ritz.col(order[c % order.size()])));
      if (project) project(w);
      block.col(c) = w;
    }
    orthonormalize_block(Q, m, block, rng, project);
  }
  return pass;
}

// Number of negative pivots of the LDL^T factorization (Sylvester inertia).
int negative_pivots(const Eigen::SimplicialLDLT<SparseMatrix>& f) {
  const VectorXd d = f.vectorD();
  return static_cast<int>((d.array() < 0.0).count());
}

CoreResult shift_invert_krylov(const SparseMatrix& A, int k, const Projection& project,
                               const EigenOptions& opt, double lower_bound) {
  const int n = static_cast<int>(A.rows());
  if (k < 1) throw std::invalid_argument("need k >= 1 eigenpairs");
  if (k > n) throw std::invalid_argument("k exceeds the operator dimension");
  std::mt19937_64 rng(20240917);
  // A few guard vectors beyond k speed up convergence of the k-th pair.
  const int wanted = k;
  k = std::min(n, k + std::min(opt.block_size, 4));
  SparseMatrix shifted = A;
  auto factor_at = [&](double sigma, Eigen::SimplicialLDLT<SparseMatrix>& f) {
    shifted = A;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
    f.compute(shifted);
    if (f.info() != Eigen::Success) throw SolverError("eigensolver: factorization failed");
  };

  // Coarse pass from a guaranteed lower bound, then re-shift just below the
  // lowest Ritz value; the inertia of the new factorization confirms the shift
  // is still below the spectrum.
  double sigma = lower_bound - 1.0;
  Eigen::SimplicialLDLT<SparseMatrix> factor;
  factor_at(sigma, factor);
  PassResult coarse = krylov_pass(A, factor, sigma, k, wanted, project, 1e-3, opt, {}, rng);
  const double lo = coarse.core.values.front(), hi = coarse.core.values[wanted - 1];
  double step = std::max({0.05 * (hi - lo), 1e-2 * std::max(1.0, std::abs(lo))});
  for (int tries = 0; tries < 40; ++tries) {
    const double candidate = lo - step;
    if (candidate <= sigma) break;
    Eigen::SimplicialLDLT<SparseMatrix> f;
    factor_at(candidate, f);
    if (negative_pivots(f) == 0) {
      sigma = candidate;
      factor_at(sigma, factor);
      break;
    }
    step *= 4.0;
  }
  PassResult fine = krylov_pass(A, factor, sigma, k, wanted, project, opt.tol, opt, coarse.core.vectors, rng);
  fine.core.values.resize(wanted);
  fine.core.vectors.resize(wanted);
  fine.core.residuals.resize(wanted);
  if (fine.converged) return fine.core;
  std::ostringstream msg;
  msg << "eigensolver did not converge; residuals:";
  for (double r : fine.core.residuals) msg << ' ' << r;
  throw SolverError(msg.str());
}

Eigenpairs to_nodal(const CoreResult& core, const std::vector<double>& mass_subset) {
  Eigenpairs out;
  out.values = core.values;
  out.residuals = core.residuals;
  for (const auto& x : core.vectors) {
    std::vector<double> phi(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) phi[i] = x(i) / std::sqrt(mass_subset[i]);
    out.vectors.push_back(std::move(phi));
  }
  return out;
}

std::vector<double> potential_of(const ScalarField& u, double p) {
  const kernels::AbsPower pw(p - 1.0);
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = p * pw(std::abs(u[i]));
  return v;
}

}  // namespace

SparseMatrix stiffness_matrix(const Grid& grid) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(grid.col().size() + grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    trip.emplace_back(i, i, grid.diag()[i]);
    for (std::size_t k = grid.row_ptr()[i]; k < grid.row_ptr()[i + 1]; ++k)
      trip.emplace_back(i, grid.col()[k], -grid.coupling()[k]);
  }
  SparseMatrix K(grid.size(), grid.size());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

SparseMatrix LinearizedOperator::symmetric_form() const {
  const auto& m = grid->mass();
  SparseMatrix A = stiffness;
  for (int j = 0; j < A.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(A, j); it; ++it)
      it.valueRef() /= std::sqrt(m[it.row()]) * std::sqrt(m[it.col()]);
  for (std::size_t i = 0; i < potential.size(); ++i) A.coeffRef(i, i) -= potential[i];
  return A;
}

double LinearizedOperator::rayleigh_quotient(const std::vector<double>& phi) const {
  const double num = kernels::dirichlet_form(*grid, phi);
  double pot = 0.0, den = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    pot += grid->mass()[i] * potential[i] * phi[i] * phi[i];
    den += grid->mass()[i] * phi[i] * phi[i];
  }
  return (num - pot) / den;
}

LinearizedOperator assemble_linearized(const ScalarField& u, double p) {
  return {u.grid(), stiffness_matrix(u.grid_ref()), potential_of(u, p)};
}

Eigenpairs lowest_eigenpairs(const LinearizedOperator& op, int k, const SymmetryProjector* projector,
                             const EigenOptions& opt) {
  Projection project;
  if (projector) {
    project = [projector](VectorXd& v) {
      projector->apply(std::span<double>(v.data(), static_cast<std::size_t>(v.size())));
    };
  }
  const double vmax = *std::max_element(op.potential.begin(), op.potential.end());
  return to_nodal(shift_invert_krylov(op.symmetric_form(), k, project, opt, -vmax), op.grid->mass());
}

Eigenpairs lowest_eigenpairs_on(const LinearizedOperator& op, const std::vector<std::size_t>& subset,
                                int k, const EigenOptions& opt) {
  const SparseMatrix A = op.symmetric_form();
  std::vector<long> pos(A.rows(), -1);
  for (std::size_t s = 0; s < subset.size(); ++s) pos[subset[s]] = static_cast<long>(s);
  std::vector<Eigen::Triplet<double>> trip;
  for (int j = 0; j < A.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(A, j); it; ++it)
      if (pos[it.row()] >= 0 && pos[it.col()] >= 0) trip.emplace_back(pos[it.row()], pos[it.col()], it.value());
  SparseMatrix S(subset.size(), subset.size());
  S.setFromTriplets(trip.begin(), trip.end());
  std::vector<double> mass(subset.size());
  for (std::size_t s = 0; s < subset.size(); ++s) mass[s] = op.grid->mass()[subset[s]];
  double vmax = 0.0;
  for (std::size_t s : subset) vmax = std::max(vmax, op.potential[s]);
  return to_nodal(shift_invert_krylov(S, k, {}, opt, -vmax), mass);
}

int count_negative(const std::vector<double>& values) {
  if (values.empty()) return 0;
  const double thr = -1e-8 * std::abs(values.front());
  return static_cast<int>(std::count_if(values.begin(), values.end(), [thr](double v) { return v < thr; }));
}

HalfDomainResult half_domain_mu(const ScalarField& u, double p, const SymmetryGroup& group,
                                int reflection, const std::vector<double>& full_values) {
  if (!group.is_reflection(reflection)) throw std::invalid_argument("group element is not a reflection");
  const Grid& grid = u.grid_ref();
  const auto perm = grid.permutation(group, reflection);
  if (!perm) throw std::invalid_argument("grid does not conform to the reflection");
  const double sup = u.sup_norm();
  for (std::size_t i = 0; i < u.size(); ++i)
    if (std::abs(u[(*perm)[i]] - u[i]) > 1e-8 * sup)
      throw std::invalid_argument("half_domain_mu: field is not symmetric about the axis");

  const double a = group.element_angle(reflection);
  const Point normal{-std::sin(a), std::cos(a)};
  std::vector<std::size_t> half;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if ((*perm)[i] == i) continue;  // on the axis
    const Point x = grid.node(i);
    if (x.x * normal.x + x.y * normal.y < 0.0) half.push_back(i);
  }
  const LinearizedOperator op = assemble_linearized(u, p);
  const Eigenpairs ep = lowest_eigenpairs_on(op, half, 1);

  HalfDomainResult res;
  res.mu = ep.values.front();
  res.half_nodes = half.size();
  res.odd_extension.assign(grid.size(), 0.0);
  for (std::size_t s = 0; s < half.size(); ++s) {
    res.odd_extension[half[s]] = ep.vectors.front()[s];
    res.odd_extension[(*perm)[half[s]]] = -ep.vectors.front()[s];
  }
  // Eigen-residual of the odd extension in the full symmetric form.
  const SparseMatrix A = op.symmetric_form();
  VectorXd x(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) x(i) = std::sqrt(grid.mass()[i]) * res.odd_extension[i];
  res.odd_extension_residual = (A * x - res.mu * x).norm() / (x.norm() * std::max(1.0, std::abs(res.mu)));
  if (!full_values.empty()) {
    double gap = INFINITY;
    for (double v : full_values) gap = std::min(gap, std::abs(v - res.mu));
    res.full_spectrum_gap = gap / std::max(1.0, std::abs(res.mu));
  }
  return res;
}

int eigenvalues_below(const LinearizedOperator& op, double shift, const SymmetryGroup* group) {
  SparseMatrix A = op.symmetric_form();
  if (group) {
    // Orthonormal basis of orbit indicators: A restricted to G-symmetric fields.
    const std::size_t n = op.grid->size();
    std::vector<long> orbit(n, -1);
    std::vector<std::vector<std::size_t>> perms;
    for (int g = 0; g < group->size(); ++g) {
      auto perm = op.grid->permutation(*group, g);
      if (!perm) throw std::invalid_argument("eigenvalues_below: grid does not conform to " + group->name());
      perms.push_back(std::move(*perm));
    }
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (orbit[i] >= 0) continue;
      const long id = static_cast<long>(members.size());
      members.emplace_back();
      for (const auto& perm : perms) {
        if (orbit[perm[i]] < 0) {
          orbit[perm[i]] = id;
          members.back().push_back(perm[i]);
        }
      }
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t o = 0; o < members.size(); ++o)
      for (std::size_t i : members[o]) trip.emplace_back(i, o, 1.0 / std::sqrt(double(members[o].size())));
    SparseMatrix P(n, members.size());
    P.setFromTriplets(trip.begin(), trip.end());
    A = SparseMatrix(P.transpose() * A * P);
  }
  for (int i = 0; i < A.rows(); ++i) A.coeffRef(i, i) -= shift;
  Eigen::SimplicialLDLT<SparseMatrix> f(A);
  if (f.info() != Eigen::Success) throw SolverError("eigenvalues_below: factorization failed");
  return negative_pivots(f);
}

SpectrumReport morse_index(const ScalarField& u, double p, const SymmetryGroup* group,
                           const MorseOptions& opt) {
  SpectrumReport rep;
  rep.elliptic_residual = elliptic_residual(u, p);
  if (!(rep.elliptic_residual < opt.residual_precondition))
    throw std::invalid_argument("morse_index: elliptic residual " + std::to_string(rep.elliptic_residual) +
                                " above the steady-state precondition");
  const LinearizedOperator op = assemble_linearized(u, p);
  const int n = static_cast<int>(u.size());

  // The index comes from the inertia at the counting threshold; the listed
  // eigenpairs cover it plus a few positive ones.
  const double lambda1 = lowest_eigenpairs(op, 1).values.front();
  const double threshold = -1e-8 * std::abs(lambda1);
  rep.morse_index = eigenvalues_below(op, threshold);
  EigenOptions listing;
  listing.tol = opt.listing_tol;
  const Eigenpairs full = lowest_eigenpairs(op, std::min(n, std::max(opt.initial_k, rep.morse_index + 4)), nullptr, listing);
  rep.eigenvalues = full.values;
  rep.residuals = full.residuals;
  rep.inertia_consistent = count_negative(full.values) == rep.morse_index;
  if (group) {
    const SymmetryProjector proj(u.grid_ref(), *group);
    rep.symmetric_morse_index = eigenvalues_below(op, threshold, group);
    const Eigenpairs sym = lowest_eigenpairs(op, std::min(n, *rep.symmetric_morse_index + 4), &proj, listing);
    rep.symmetric_eigenvalues = sym.values;
    if (count_negative(sym.values) != *rep.symmetric_morse_index) rep.inertia_consistent = false;
    if (opt.half_domain && group->kind() == GroupKind::dihedral)
      rep.half_domain = half_domain_mu(u, p, *group, group->base_reflection(), full.values);
  }
  return rep;
}

NewtonResult newton_polish(const ScalarField& u0, double p, double tol, int max_iter,
                           const SymmetryProjector* projector) {
  const Grid& grid = u0.grid_ref();
  const SparseMatrix K = stiffness_matrix(grid);
  const auto& m = grid.mass();
  const std::size_t n = grid.size();
  const kernels::AbsPower pw(p - 1.0);

  NewtonResult res{u0, elliptic_residual(u0, p), 0, false};
  if (projector) {
    res.field = (*projector)(res.field);
    res.residual = elliptic_residual(res.field, p);
  }
  Eigen::SparseLU<SparseMatrix> lu;
  for (int it = 0; it < max_iter && !(res.residual < tol); ++it) {
    const auto& u = res.field.values();
    SparseMatrix J = K;
    VectorXd F(n);
    std::vector<double> ku(n);
    kernels::stiffness_apply(grid, u, ku);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = pw(std::abs(u[i]));
      J.coeffRef(i, i) -= m[i] * p * a;
      F(i) = ku[i] - m[i] * a * u[i];
    }
    if (it == 0) lu.analyzePattern(J);
    lu.factorize(J);
    if (lu.info() != Eigen::Success) break;
    const VectorXd delta = lu.solve(-F);
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      ScalarField trial = res.field;
      for (std::size_t i = 0; i < n; ++i) trial[i] += t * delta(i);
      if (projector) trial = (*projector)(trial);
      const double r = elliptic_residual(trial, p);
      if (r < (1.0 - 1e-4 * t) * res.residual) {
        res.field = std::move(trial);
        res.residual = r;
        accepted = true;
        break;
      }
    }
    res.iterations = it + 1;
    if (!accepted) break;
  }
  res.converged = res.residual < tol;
  return res;
}

}  // namespace lef
