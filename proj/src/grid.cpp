#include "lef/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lef {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void Grid::finalize_csr(std::vector<std::vector<std::pair<std::size_t, double>>>& rows) {
  row_ptr_.assign(rows.size() + 1, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::sort(rows[i].begin(), rows[i].end());
    row_ptr_[i + 1] = row_ptr_[i] + rows[i].size();
  }
  col_.resize(row_ptr_.back());
  coupling_.resize(row_ptr_.back());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t k = row_ptr_[i];
    for (const auto& [j, c] : rows[i]) {
      col_[k] = j;
      coupling_[k] = c;
      ++k;
    }
  }
}

std::shared_ptr<const Grid> Grid::polar(const DomainSpec& domain, int n_r, int n_theta) {
  if (domain.shape() == ShapeKind::mask)
    throw std::invalid_argument("polar grids require a disk or annulus domain");
  if (n_r < 2 || n_theta < 4) throw std::invalid_argument("polar grid needs n_r >= 2, n_theta >= 4");

  auto g = std::shared_ptr<Grid>(new Grid(GridKind::polar, domain));
  g->n_r_ = n_r;
  g->n_theta_ = n_theta;
  g->r_in_ = domain.shape() == ShapeKind::annulus ? domain.inner_radius() : 0.0;
  g->r_out_ = domain.outer_radius();
  g->dr_ = (g->r_out_ - g->r_in_) / n_r;
  g->dtheta_ = kTwoPi / n_theta;
  g->spacing_ = g->dr_;

  auto& pc = g->polar_;
  pc.mass.resize(n_r);
  pc.angular.resize(n_r);
  pc.boundary.assign(n_r, 0.0);
  pc.radial_face.resize(n_r - 1);
  for (int i = 0; i < n_r; ++i) {
    const double r = g->ring_radius(i);
    pc.mass[i] = r * g->dr_ * g->dtheta_;
    pc.angular[i] = g->dr_ / (r * g->dtheta_);
    if (i + 1 < n_r) pc.radial_face[i] = (g->r_in_ + (i + 1) * g->dr_) * g->dtheta_ / g->dr_;
  }
  pc.boundary[n_r - 1] += g->r_out_ * g->dtheta_ / (0.5 * g->dr_);
  if (g->r_in_ > 0.0) pc.boundary[0] += g->r_in_ * g->dtheta_ / (0.5 * g->dr_);

  const std::size_t n = static_cast<std::size_t>(n_r) * n_theta;
  g->nodes_.resize(n);
  g->mass_.resize(n);
  g->diag_.resize(n);
  g->boundary_adjacent_.assign(n, 0);
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  auto idx = [n_theta](int i, int j) {
    return static_cast<std::size_t>(i) * n_theta + static_cast<std::size_t>((j + n_theta) % n_theta);
  };
  for (int i = 0; i < n_r; ++i) {
    const double r = g->ring_radius(i);
    for (int j = 0; j < n_theta; ++j) {
      const std::size_t k = idx(i, j);
      const double th = j * g->dtheta_;
      g->nodes_[k] = {r * std::cos(th), r * std::sin(th)};
      g->mass_[k] = pc.mass[i];
      double d = pc.boundary[i] + 2.0 * pc.angular[i];
      rows[k].push_back({idx(i, j + 1), pc.angular[i]});
      rows[k].push_back({idx(i, j - 1), pc.angular[i]});
      if (i > 0) {
        rows[k].push_back({idx(i - 1, j), pc.radial_face[i - 1]});
        d += pc.radial_face[i - 1];
      }
      if (i + 1 < n_r) {
        rows[k].push_back({idx(i + 1, j), pc.radial_face[i]});
        d += pc.radial_face[i];
      }
      g->diag_[k] = d;
      if (pc.boundary[i] > 0.0) g->boundary_adjacent_[k] = 1;
    }
  }
  g->finalize_csr(rows);

  for (int j = 0; j < n_theta; ++j) {
    const double th = j * g->dtheta_;
    g->boundary_points_.push_back({g->r_out_ * std::cos(th), g->r_out_ * std::sin(th)});
    if (g->r_in_ > 0.0)
      g->boundary_points_.push_back({g->r_in_ * std::cos(th), g->r_in_ * std::sin(th)});
  }
  if (g->r_in_ == 0.0)
    for (int j = 0; j < n_theta; ++j) g->origin_nodes_.push_back(idx(0, j));
  return g;
}

std::shared_ptr<const Grid> Grid::cartesian(const DomainSpec& domain, int n_cells) {
  if (n_cells < 2) throw std::invalid_argument("cartesian grid needs n_cells >= 2");
  auto g = std::shared_ptr<Grid>(new Grid(GridKind::cartesian, domain));
  const double e = domain.extent();
  const double h = 2.0 * e / n_cells;
  g->n_cells_ = n_cells;
  g->lattice_origin_ = -e;
  g->spacing_ = h;
  const int m = n_cells + 1;
  g->lattice_to_node_.assign(static_cast<std::size_t>(m) * m, -1);
  auto lat = [m](int a, int b) { return static_cast<std::size_t>(b) * m + a; };
  auto coord = [e, h](int a) { return -e + a * h; };
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < m; ++a) {
      const Point x{coord(a), coord(b)};
      if (domain.contains(x, 1e-12 * e)) {
        g->lattice_to_node_[lat(a, b)] = static_cast<long>(g->nodes_.size());
        g->nodes_.push_back(x);
      }
    }
  }
  const std::size_t n = g->nodes_.size();
  if (n == 0) throw std::invalid_argument("cartesian grid has no interior nodes");
  g->mass_.assign(n, h * h);
  g->diag_.assign(n, 4.0);
  g->boundary_adjacent_.assign(n, 0);
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  std::vector<char> is_boundary_point(static_cast<std::size_t>(m) * m, 0);
  const int da[4] = {1, -1, 0, 0};
  const int db[4] = {0, 0, 1, -1};
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < m; ++a) {
      const long k = g->lattice_to_node_[lat(a, b)];
      if (k < 0) continue;
      for (int s = 0; s < 4; ++s) {
        const int a2 = a + da[s], b2 = b + db[s];
        long k2 = -1;
        if (a2 >= 0 && a2 < m && b2 >= 0 && b2 < m) k2 = g->lattice_to_node_[lat(a2, b2)];
        if (k2 >= 0) {
          rows[k].push_back({static_cast<std::size_t>(k2), 1.0});
        } else {
          g->boundary_adjacent_[k] = 1;
          if (a2 >= 0 && a2 < m && b2 >= 0 && b2 < m && !is_boundary_point[lat(a2, b2)]) {
            is_boundary_point[lat(a2, b2)] = 1;
            g->boundary_points_.push_back({coord(a2), coord(b2)});
          }
        }
      }
    }
  }
  g->finalize_csr(rows);

  if (domain.contains_origin()) {
    for (std::size_t k = 0; k < n; ++k)
      if (norm(g->nodes_[k]) < 1e-9 * h) g->origin_nodes_.push_back(k);
    if (g->origin_nodes_.empty())
      for (std::size_t k = 0; k < n; ++k)
        if (norm(g->nodes_[k]) < h) g->origin_nodes_.push_back(k);
  }
  return g;
}

std::optional<std::size_t> Grid::locate(Point x) const {
  if (kind_ == GridKind::polar) {
    const double r = norm(x);
    const double s = (r - r_in_) / dr_ - 0.5;
    const long i = std::lround(s);
    if (i < 0 || i >= n_r_ || std::abs(s - i) > 1e-9) return std::nullopt;
    double th = std::atan2(x.y, x.x);
    if (th < 0.0) th += kTwoPi;
    const double t = th / dtheta_;
    long j = std::lround(t);
    if (std::abs(t - j) > 1e-9) return std::nullopt;
    j %= n_theta_;
    return static_cast<std::size_t>(i) * n_theta_ + static_cast<std::size_t>(j);
  }
  const double h = spacing_;
  const double fa = (x.x - lattice_origin_) / h, fb = (x.y - lattice_origin_) / h;
  const long a = std::lround(fa), b = std::lround(fb);
  if (std::abs(fa - a) > 1e-9 || std::abs(fb - b) > 1e-9) return std::nullopt;
  const int m = n_cells_ + 1;
  if (a < 0 || a >= m || b < 0 || b >= m) return std::nullopt;
  const long k = lattice_to_node_[static_cast<std::size_t>(b) * m + a];
  if (k < 0) return std::nullopt;
  return static_cast<std::size_t>(k);
}

std::optional<std::vector<std::size_t>> Grid::permutation(const SymmetryGroup& group,
                                                          int index) const {
  std::vector<std::size_t> perm(size());
  for (std::size_t n = 0; n < size(); ++n) {
    const auto k = locate(group.apply_inverse(index, nodes_[n]));
    if (!k) return std::nullopt;
    perm[n] = *k;
  }
  return perm;
}

bool Grid::conforms_to(const SymmetryGroup& group) const {
  for (int g = 0; g < group.size(); ++g)
    if (!permutation(group, g)) return false;
  return true;
}

double Grid::interpolate(const std::vector<double>& values, Point x) const {
  if (kind_ == GridKind::polar) {
    const double r = norm(x);
    if (r >= r_out_ || (r_in_ > 0.0 && r <= r_in_)) return 0.0;
    double th = std::atan2(x.y, x.x);
    if (th < 0.0) th += kTwoPi;
    const double t = th / dtheta_;
    const long j0 = static_cast<long>(std::floor(t));
    const double w = t - j0;
    auto ring = [&](long i) {
      if (i < 0 || i >= n_r_) return 0.0;
      const std::size_t base = static_cast<std::size_t>(i) * n_theta_;
      return (1.0 - w) * values[base + static_cast<std::size_t>(j0 % n_theta_)] +
             w * values[base + static_cast<std::size_t>((j0 + 1) % n_theta_)];
    };
    const double s = (r - r_in_) / dr_ - 0.5;
    if (s < 0.0) {
      if (r_in_ == 0.0) return ring(0);
      return ring(0) * (s + 0.5) / 0.5;
    }
    if (s > n_r_ - 1) return ring(n_r_ - 1) * (n_r_ - 0.5 - s) / 0.5;
    const long i0 = static_cast<long>(std::floor(s));
    const double v = s - i0;
    return (1.0 - v) * ring(i0) + v * ring(i0 + 1);
  }
  const double h = spacing_;
  const double fa = (x.x - lattice_origin_) / h, fb = (x.y - lattice_origin_) / h;
  const long a0 = static_cast<long>(std::floor(fa)), b0 = static_cast<long>(std::floor(fb));
  const double wa = fa - a0, wb = fb - b0;
  const int m = n_cells_ + 1;
  auto at = [&](long a, long b) {
    if (a < 0 || a >= m || b < 0 || b >= m) return 0.0;
    const long k = lattice_to_node_[static_cast<std::size_t>(b) * m + a];
    return k < 0 ? 0.0 : values[static_cast<std::size_t>(k)];
  };
  return (1 - wa) * (1 - wb) * at(a0, b0) + wa * (1 - wb) * at(a0 + 1, b0) +
         (1 - wa) * wb * at(a0, b0 + 1) + wa * wb * at(a0 + 1, b0 + 1);
}

}  // namespace lef
