#pragma once

#include <span>
#include <vector>

#include "qrdft/chem.hpp"
#include "qrdft/linalg.hpp"
#include "qrdft/orbitals.hpp"
#include "qrdft/quadrature.hpp"
#include "qrdft/xc.hpp"

namespace qrdft {

struct EnergyBreakdown {
  double kinetic = 0.0;
  double external = 0.0;
  double hartree = 0.0;
  double xc = 0.0;
  double nuclear = 0.0;
  double total = 0.0;

  double electronic() const { return kinetic + external + hartree + xc; }
};

/// The points an energy is evaluated on: the whole grid (scales 1) or a
/// minibatch with its unbiasing scale factors.
struct QuadratureBlock {
  std::vector<Vec3> points;
  std::vector<double> weights;
  std::vector<double> v_ext;  // -Σ_A Z_A / |r - R_A|
  AOTable ao;
  double single_scale = 1.0;
  double pair_scale = 1.0;

  std::size_t size() const { return points.size(); }
};

std::vector<double> external_potential(const Molecule& mol, std::span<const Vec3> points);

QuadratureBlock make_full_block(const Grid& grid, const Molecule& mol, AOTable ao);
QuadratureBlock make_full_block(const Grid& grid, const Molecule& mol, const AOBasis& basis);
/// Gathers the rows of `full` selected by the minibatch.
QuadratureBlock make_batch_block(const QuadratureBlock& full, const Minibatch& batch);

/// V_i = Σ_{j≠i} q_j / |x_i − x_j|.
std::vector<double> hartree_potential(std::span<const Vec3> points, std::span<const double> charges);

/// Orbitals, densities and energy derivatives on a block.
struct BlockEvaluation {
  Matrix psi_alpha, psi_beta;          // m × N_σ
  Matrix lap_psi_alpha, lap_psi_beta;  // m × N_σ
  std::vector<double> rho_alpha, rho_beta;
  std::vector<double> hartree_potential;  // unscaled V_H at each point
  EnergyBreakdown energy;                 // nuclear term left at 0
  // ∂E/∂ρ_σ(x_i), weights and scale factors included.
  std::vector<double> d_rho_alpha, d_rho_beta;
};

BlockEvaluation evaluate_block(const SpinCoefficients& c, const QuadratureBlock& block, XCFunctional xc);

double kinetic_energy(const SpinCoefficients& c, const QuadratureBlock& block);
double external_energy(const SpinCoefficients& c, const QuadratureBlock& block);
double hartree_energy(const SpinCoefficients& c, const QuadratureBlock& block);
double xc_energy(const SpinCoefficients& c, const QuadratureBlock& block, XCFunctional xc);

/// Full-grid energy including nuclear repulsion.
EnergyBreakdown total_energy(const SpinCoefficients& c, const QuadratureBlock& full, const Molecule& mol,
                             XCFunctional xc);

/// Unbiased minibatch estimate of the electronic energy.
double minibatch_energy(const SpinCoefficients& c, const QuadratureBlock& batch, XCFunctional xc);

/// ∫(ρα + ρβ) over the block (scaled).
double electron_count(const SpinCoefficients& c, const QuadratureBlock& block);

}  // namespace qrdft
