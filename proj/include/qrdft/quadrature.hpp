#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qrdft/chem.hpp"

namespace qrdft {

using Rng = std::mt19937_64;

struct Grid {
  std::vector<Vec3> points;       // bohr
  std::vector<double> weights;    // all > 0
  std::vector<int> parent_atoms;  // atom whose product grid emitted the point

  std::size_t size() const { return points.size(); }
};

struct Minibatch {
  std::vector<std::size_t> indices;
  double single_scale = 1.0;  // n / m
  double pair_scale = 1.0;    // n(n-1) / (m(m-1))
};

struct AngularRule {
  int degree = 0;
  std::vector<Vec3> points;
  std::vector<double> weights;  // sum to 4π
};

struct GridLevel {
  int radial = 0;
  int angular = 0;
};

/// (radial, angular) counts for levels 1..5.
GridLevel grid_level(int level);

/// Embedded Lebedev rule with exactly `points` directions.
const AngularRule& angular_rule(int points);

/// Becke mapping radius in bohr for atomic number z.
double becke_radius(int z);

/// Gauss-Chebyshev (second kind) radial nodes under r = R(1+x)/(1-x);
/// weights include the r² Jacobian.
void radial_grid(int n, double radius, std::vector<double>& r, std::vector<double>& w);

/// Normalized Becke cell functions of every atom at `point`; sums to 1.
std::vector<double> becke_cell_weights(const Vec3& point, const Molecule& mol);

/// Multiplies each weight by the cell function of its parent atom.
std::vector<double> becke_partition(std::span<const Vec3> points, std::span<const double> weights,
                                    std::span<const int> parent_atoms, const Molecule& mol);

Grid build_molecular_grid(const Molecule& mol, int level);

Minibatch make_minibatch(std::vector<std::size_t> indices, std::size_t n);

/// Uniform sample of m distinct indices from [0, n).
Minibatch sample_minibatch(const Grid& grid, std::size_t m, Rng& rng);

/// One epoch's worth of disjoint batches from a single shuffle; the
/// remainder n mod m is dropped.
std::vector<Minibatch> epoch_batches(std::size_t n, std::size_t m, Rng& rng);

/// Pairwise (tree-order) summation.
double pairwise_sum(std::span<const double> values);

/// Σ wᵢ vᵢ with a fixed reduction tree.
double integrate(const Grid& grid, std::span<const double> values);

}  // namespace qrdft
