#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrdft/energy.hpp"
#include "qrdft/ortho.hpp"

namespace qrdft {

enum class Algorithm { Sgd, Adam };

Algorithm parse_algorithm(std::string_view name);

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::Adam;
  double lr0 = 0.1;
  std::vector<int> decay_epochs{60};
  double decay_factor = 0.1;
  int max_epochs = 200;
  std::size_t batch_size = 1024;  // clamped to the grid size
  std::uint64_t seed = 0;
  int window = 20;
  double tolerance = 1e-5;
  bool train_theta = true;  // only meaningful when params carry a network

  void validate() const;
};

struct TraceRecord {
  int epoch = 0;
  long step = 0;
  double batch_energy = 0.0;
  std::optional<double> full_energy;
  double lr = 0.0;
  double wall_ms = 0.0;
};

struct Trace {
  std::vector<TraceRecord> records;

  /// `epoch,step,batch_energy,full_energy,lr,wall_ms`
  std::string to_csv() const;
};

double lr_schedule(int epoch, const OptimizerConfig& config);

/// Everything about a system that stays fixed while the orbitals train.
struct Problem {
  Molecule mol;
  AOBasis basis;
  Grid grid;
  Matrix whitening;  // D
  QuadratureBlock full;
  XCFunctional xc = XCFunctional::LdaX;
  WhiteningScheme scheme = WhiteningScheme::Pca;
};

Problem make_problem(Molecule mol, std::string_view basis_name, XCFunctional xc, int grid_level,
                     WhiteningScheme scheme = WhiteningScheme::Pca);

/// Replaces the AO table of `block` with the warped basis when the params
/// carry a network; otherwise returns the block untouched.
QuadratureBlock with_params_basis(const OrbitalParams& params, const AOBasis& basis, QuadratureBlock block);

/// Full-grid energy (nuclear repulsion included) of the current params.
EnergyBreakdown params_energy(const OrbitalParams& params, const Problem& problem);

struct ParamGradient {
  Matrix w_alpha;
  Matrix w_beta;
  std::vector<double> theta;
};

struct EnergyGradient {
  double energy = 0.0;  // electronic, as estimated on the block
  ParamGradient grad;
};

/// dE/dC_σ from an evaluated block: N_σ × B.
Matrix coefficient_gradient(const Matrix& c, const Matrix& psi, const Matrix& lap_psi,
                            std::span<const double> d_rho, const QuadratureBlock& block);

/// Minibatch energy and its gradient with respect to W_α, W_β and θ.
/// `block` must already hold the basis the params imply (see with_params_basis).
EnergyGradient energy_gradient(const OrbitalParams& params, const Problem& problem, const QuadratureBlock& block,
                               bool with_theta = true);

/// Flat view helpers: W_α, then W_β, then θ.
std::vector<double> flatten(const OrbitalParams& params);
void unflatten(std::span<const double> flat, OrbitalParams& params);
std::vector<double> flatten(const ParamGradient& grad);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad, double lr);
void sgd_step(std::span<double> params, std::span<const double> grad, double lr);

struct DirectResult {
  OrbitalParams params;  // best full-grid energy seen
  EnergyBreakdown energy;
  Trace trace;
  int epochs = 0;
  bool converged = false;
  bool diverged = false;
};

DirectResult run_direct(const Problem& problem, OrbitalParams init, const OptimizerConfig& config);

}  // namespace qrdft
