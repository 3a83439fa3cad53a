#pragma once

#include <vector>

#include "qrdft/energy.hpp"
#include "qrdft/optimizer.hpp"

namespace qrdft {

struct FockPair {
  Matrix alpha;
  Matrix beta;
  EnergyBreakdown energy;  // electronic terms at the density F was built from
};

/// T_μν = −½ Σ_i w_i φ_μ(x_i) ∇²φ_ν(x_i), symmetrized.
Matrix kinetic_matrix(const QuadratureBlock& block);
/// Σ_i w_i v(x_i) φ_μ φ_ν for a per-point potential v.
Matrix potential_matrix(const QuadratureBlock& block, std::span<const double> v);

/// Kohn-Sham matrices on the full grid at the given occupied orbitals.
FockPair fock_matrix(const SpinCoefficients& c, const QuadratureBlock& full, XCFunctional xc);

struct ScfOptions {
  double mixing = 0.9;  // Fock momentum β
  int max_iter = 100;
  double tol = 1e-6;    // ∫|Δρ|
  bool fallback = true; // retry with β = 0 if the mixed run does not converge
};

struct ScfResult {
  SpinCoefficients c;
  std::vector<double> eps_alpha;
  std::vector<double> eps_beta;
  EnergyBreakdown energy;
  int iterations = 0;
  bool converged = false;
  double mixing_used = 0.0;
  std::vector<double> density_changes;  // ∫|Δρ| per iteration
};

ScfResult scf_solve(const Problem& problem, const ScfOptions& options = {});

/// Lowest `n` generalized eigenpairs of F c = ε S c, via F̃ = D F Dᵀ.
void solve_occupied(const Matrix& f, const Matrix& d, std::size_t n, Matrix& c, std::vector<double>& eps);

struct SelfConsistency {
  double subspace = 0.0;  // max_σ ‖F Cᵀ − S Cᵀ M‖_F / ‖F‖_F
  std::vector<double> orbital_alpha;
  std::vector<double> orbital_beta;
  std::vector<double> eps_alpha;
  std::vector<double> eps_beta;
};

/// Throws InputError if C S Cᵀ deviates from I by more than 1e-8.
SelfConsistency self_consistency_residual(const SpinCoefficients& c, const Matrix& s, const QuadratureBlock& full,
                                          XCFunctional xc);

}  // namespace qrdft
