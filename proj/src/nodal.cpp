#include "lef/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace lef {

int NodalDecomposition::positive_count() const {
  return static_cast<int>(std::count_if(domains.begin(), domains.end(), [](const NodalDomain& d) { return d.sign > 0; }));
}

int NodalDecomposition::negative_count() const { return count() - positive_count(); }

bool NodalDecomposition::adjacent(int a, int b) const {
  const auto key = std::minmax(a, b);
  return std::find(adjacency.begin(), adjacency.end(), std::pair<int, int>(key.first, key.second)) != adjacency.end();
}

bool NodalDecomposition::nodal_line_touches_boundary() const {
  for (const auto& b : bands)
    if (b.touches_boundary && b.is_nodal_line()) return true;
  for (const auto& d : domains)
    if (d.touches_boundary) return true;
  return false;
}

NodalDecomposition decompose(const ScalarField& v, std::optional<double> tau_opt) {
  const Grid& grid = v.grid_ref();
  const std::size_t n = grid.size();
  NodalDecomposition d;
  d.grid = v.grid();
  d.tau = tau_opt ? *tau_opt : 1e-3 * v.sup_norm();
  if (d.tau < 0.0) throw std::invalid_argument("zero band threshold must be nonnegative");
  d.labels.assign(n, 0);
  d.band_labels.assign(n, 0);
  if (v.is_zero()) return d;

  auto sign_of = [&](std::size_t i) { return v[i] > d.tau ? 1 : (v[i] < -d.tau ? -1 : 0); };
  std::vector<std::size_t> stack;
  // Domains: components of {v > tau} and {v < -tau}.
  for (std::size_t seed = 0; seed < n; ++seed) {
    const int s = sign_of(seed);
    if (s == 0 || d.labels[seed] != 0) continue;
    const int id = d.count() + 1;
    NodalDomain dom;
    dom.id = id;
    dom.sign = s;
    d.labels[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      ++dom.node_count;
      grid.for_each_neighbor(i, [&](std::size_t j) {
        if (d.labels[j] == 0 && sign_of(j) == s) {
          d.labels[j] = id;
          stack.push_back(j);
        }
      });
    }
    d.domains.push_back(dom);
  }
  // Zero band components.
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (d.labels[seed] != 0 || d.band_labels[seed] != 0) continue;
    const int id = static_cast<int>(d.bands.size()) + 1;
    ZeroBandComponent band;
    std::set<int> adj;
    d.band_labels[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      ++band.node_count;
      if (grid.next_to_boundary(i)) band.touches_boundary = true;
      grid.for_each_neighbor(i, [&](std::size_t j) {
        if (d.labels[j] != 0) {
          adj.insert(d.labels[j]);
        } else if (d.band_labels[j] == 0) {
          d.band_labels[j] = id;
          stack.push_back(j);
        }
      });
    }
    band.adjacent_domains.assign(adj.begin(), adj.end());
    for (int a : adj) {
      if (d.domain(a).sign > 0) band.adjacent_positive = true;
      else band.adjacent_negative = true;
    }
    d.bands.push_back(std::move(band));
  }

  std::set<std::pair<int, int>> pairs;
  for (const auto& band : d.bands)
    for (std::size_t a = 0; a < band.adjacent_domains.size(); ++a)
      for (std::size_t b = a + 1; b < band.adjacent_domains.size(); ++b)
        pairs.insert({band.adjacent_domains[a], band.adjacent_domains[b]});
  for (std::size_t i = 0; i < n; ++i) {
    if (d.labels[i] == 0) continue;
    grid.for_each_neighbor(i, [&](std::size_t j) {
      if (d.labels[j] != 0 && d.labels[j] != d.labels[i]) {
        pairs.insert(std::minmax(d.labels[i], d.labels[j]));
        // A sign change across one edge next to the boundary.
        if (grid.next_to_boundary(i) || grid.next_to_boundary(j))
          d.domains[static_cast<std::size_t>(d.labels[i] - 1)].touches_boundary = true;
      }
    });
  }
  d.adjacency.assign(pairs.begin(), pairs.end());

  for (auto& dom : d.domains)
    for (const auto& band : d.bands)
      if (band.touches_boundary && band.is_nodal_line() &&
          std::find(band.adjacent_domains.begin(), band.adjacent_domains.end(), dom.id) != band.adjacent_domains.end())
        dom.touches_boundary = true;

  const auto& origin = grid.origin_nodes();
  if (!origin.empty()) {
    const int first = d.labels[origin.front()];
    const bool same = std::all_of(origin.begin(), origin.end(), [&](std::size_t i) { return d.labels[i] == first; });
    if (same && first != 0) d.domains[static_cast<std::size_t>(first - 1)].contains_origin = true;
  }
  return d;
}

bool touches_boundary(const NodalDecomposition& d, int id) { return d.domain(id).touches_boundary; }

std::optional<int> contains_origin(const NodalDecomposition& d) {
  if (!d.grid->domain().contains_origin())
    throw std::invalid_argument("origin predicate is undefined: the domain does not contain the origin");
  for (const auto& dom : d.domains)
    if (dom.contains_origin) return dom.id;
  return std::nullopt;
}

std::vector<DomainSymmetry> domain_symmetry_check(const NodalDecomposition& d, const SymmetryGroup& g) {
  std::vector<std::vector<std::size_t>> perms;
  for (int k = 0; k < g.size(); ++k) {
    auto perm = d.grid->permutation(g, k);
    if (!perm) throw std::invalid_argument("domain_symmetry_check: grid does not conform to " + g.name());
    perms.push_back(std::move(*perm));
  }
  std::vector<DomainSymmetry> out;
  for (const auto& dom : d.domains) {
    std::size_t mismatched = 0;
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
      const bool in = d.labels[i] == dom.id;
      for (const auto& perm : perms) {
        if (in != (d.labels[perm[i]] == dom.id)) {
          ++mismatched;
          break;
        }
      }
    }
    out.push_back({dom.id, mismatched == 0, static_cast<double>(mismatched) / static_cast<double>(dom.node_count)});
  }
  return out;
}

ScalarField restrict_to_domain(const ScalarField& v, const NodalDecomposition& d, int id) {
  ScalarField out(v.grid(), v.time());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (d.labels[i] == id) out[i] = v[i];
  return out;
}

std::vector<EnergyReport> per_domain_energy(const ScalarField& v, const NodalDecomposition& d, double p) {
  std::vector<EnergyReport> out;
  for (const auto& dom : d.domains) out.push_back(field_energy(restrict_to_domain(v, d, dom.id), p));
  return out;
}

}  // namespace lef
