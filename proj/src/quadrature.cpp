#include "qrdft/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "embedded_data.hpp"
#include "qrdft/linalg.hpp"

namespace qrdft {

namespace {

// Bragg-Slater radii in ångström, H..Ar; hydrogen uses 0.35 Å.
constexpr std::array<double, 18> kBraggAngstrom = {0.35, 0.35, 1.45, 1.05, 0.85, 0.70, 0.65, 0.60, 0.50,
                                                   0.45, 1.80, 1.50, 1.25, 1.10, 1.00, 1.00, 1.00, 0.95};

std::map<int, AngularRule> load_angular_rules() {
  std::map<int, AngularRule> rules;
  std::istringstream in{std::string(embedded::kLebedev)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string key;
    if (!(row >> key) || key != "LEBEDEV") continue;
    int count = 0;
    AngularRule rule;
    row >> count >> rule.degree;
    for (int k = 0; k < count; ++k) {
      std::getline(in, line);
      std::istringstream p(line);
      Vec3 v{};
      double w = 0.0;
      p >> v[0] >> v[1] >> v[2] >> w;
      rule.points.push_back(v);
      rule.weights.push_back(w);
    }
    rules.emplace(count, std::move(rule));
  }
  return rules;
}

// Becke's cutoff polynomial iterated three times.
double becke_step(double mu) {
  for (int k = 0; k < 3; ++k) mu = 1.5 * mu - 0.5 * mu * mu * mu;
  return 0.5 * (1.0 - mu);
}

double pairwise_sum_impl(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_impl(v, half) + pairwise_sum_impl(v + half, n - half);
}

}  // namespace

GridLevel grid_level(int level) {
  switch (level) {
    case 1: return {20, 26};
    case 2: return {30, 38};
    case 3: return {50, 86};
    case 4: return {75, 194};
    case 5: return {100, 302};
    default: throw InputError("grid level must be in 1..5");
  }
}

const AngularRule& angular_rule(int points) {
  static const std::map<int, AngularRule> rules = load_angular_rules();
  const auto it = rules.find(points);
  if (it == rules.end()) throw InputError("no embedded angular rule with " + std::to_string(points) + " points");
  return it->second;
}

double becke_radius(int z) {
  if (z < 1 || z > static_cast<int>(kBraggAngstrom.size())) throw InputError("no Becke radius for Z=" + std::to_string(z));
  return kBraggAngstrom[z - 1] * kBohrPerAngstrom;
}

void radial_grid(int n, double radius, std::vector<double>& r, std::vector<double>& w) {
  r.resize(n);
  w.resize(n);
  for (int i = 1; i <= n; ++i) {
    const double t = i * std::numbers::pi / (n + 1);
    const double x = std::cos(t);
    const double ri = radius * (1.0 + x) / (1.0 - x);
    const double drdx = 2.0 * radius / ((1.0 - x) * (1.0 - x));
    // Second-kind weights divided by sqrt(1 - x²) integrate plain f(x).
    const double wx = std::numbers::pi / (n + 1) * std::sin(t);
    r[i - 1] = ri;
    w[i - 1] = wx * drdx * ri * ri;
  }
}

std::vector<double> becke_cell_weights(const Vec3& point, const Molecule& mol) {
  const std::size_t na = mol.atoms.size();
  std::vector<double> cell(na, 1.0);
  if (na == 1) return cell;
  std::vector<double> dist(na);
  for (std::size_t a = 0; a < na; ++a) dist[a] = distance(point, mol.atoms[a].position);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < na; ++b) {
      if (a == b) continue;
      const double rab = distance(mol.atoms[a].position, mol.atoms[b].position);
      cell[a] *= becke_step((dist[a] - dist[b]) / rab);
    }
  }
  const double total = std::accumulate(cell.begin(), cell.end(), 0.0);
  for (double& c : cell) c /= total;
  return cell;
}

std::vector<double> becke_partition(std::span<const Vec3> points, std::span<const double> weights,
                                    std::span<const int> parent_atoms, const Molecule& mol) {
  std::vector<double> out(weights.begin(), weights.end());
  if (mol.atoms.size() < 2) return out;
  for (std::size_t i = 0; i < points.size(); ++i) out[i] *= becke_cell_weights(points[i], mol)[parent_atoms[i]];
  return out;
}

Grid build_molecular_grid(const Molecule& mol, int level) {
  const GridLevel lv = grid_level(level);
  const AngularRule& ang = angular_rule(lv.angular);
  Grid g;
  std::vector<double> raw_weights;
  std::vector<double> rr, rw;
  for (std::size_t a = 0; a < mol.atoms.size(); ++a) {
    const Atom& atom = mol.atoms[a];
    radial_grid(lv.radial, becke_radius(atom.z), rr, rw);
    for (int i = 0; i < lv.radial; ++i) {
      for (std::size_t k = 0; k < ang.points.size(); ++k) {
        const Vec3& u = ang.points[k];
        g.points.push_back({atom.position[0] + rr[i] * u[0], atom.position[1] + rr[i] * u[1],
                            atom.position[2] + rr[i] * u[2]});
        raw_weights.push_back(rw[i] * ang.weights[k]);
        g.parent_atoms.push_back(static_cast<int>(a));
      }
    }
  }
  for (const Vec3& p : g.points)
    for (const Atom& atom : mol.atoms)
      if (distance(p, atom.position) < 1e-10) throw InputError("grid point coincides with a nucleus");
  g.weights = becke_partition(g.points, raw_weights, g.parent_atoms, mol);
  // Partitioning can underflow far from the parent atom; keep weights strictly positive.
  for (double& w : g.weights) w = std::max(w, std::numeric_limits<double>::min());
  return g;
}

Minibatch make_minibatch(std::vector<std::size_t> indices, std::size_t n) {
  const std::size_t m = indices.size();
  if (m < 1 || m > n) throw InputError("minibatch size out of range");
  Minibatch b;
  b.indices = std::move(indices);
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  b.single_scale = dn / dm;
  b.pair_scale = m >= 2 ? dn * (dn - 1.0) / (dm * (dm - 1.0)) : 0.0;
  return b;
}

Minibatch sample_minibatch(const Grid& grid, std::size_t m, Rng& rng) {
  const std::size_t n = grid.size();
  if (m < 2 || m > n) throw InputError("minibatch size must satisfy 2 <= m <= n");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first m slots are a uniform m-subset.
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(m);
  return make_minibatch(std::move(idx), n);
}

std::vector<Minibatch> epoch_batches(std::size_t n, std::size_t m, Rng& rng) {
  if (m < 2 || m > n) throw InputError("minibatch size must satisfy 2 <= m <= n");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (m < n) {
    for (std::size_t i = n - 1; i > 0; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i);
      std::swap(idx[i], idx[pick(rng)]);
    }
  }
  std::vector<Minibatch> batches;
  for (std::size_t start = 0; start + m <= n; start += m)
    batches.push_back(make_minibatch({idx.begin() + start, idx.begin() + start + m}, n));
  return batches;
}

double pairwise_sum(std::span<const double> values) { return pairwise_sum_impl(values.data(), values.size()); }

double integrate(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw InputError("integrate: one value per grid point required");
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) terms[i] = grid.weights[i] * values[i];
  return pairwise_sum(terms);
}

}  // namespace qrdft
