#include "qrdft/driver.hpp"

#include <algorithm>
#include <chrono>

namespace qrdft {

OptimizerConfig optimizer_config(const RunConfig& config) {
  OptimizerConfig o;
  o.lr0 = config.lr;
  o.max_epochs = config.epochs;
  o.batch_size = config.batch_size;
  o.decay_epochs = config.decay_epochs;
  o.decay_factor = config.decay_factor;
  o.seed = config.seed;
  return o;
}

RunOutput run_calculation(const RunConfig& config, const Molecule& mol) {
  const auto start = std::chrono::steady_clock::now();
  const XCFunctional xc = parse_xc(config.xc);
  const WhiteningScheme scheme = parse_whitening(config.whitening);
  const Problem problem = make_problem(mol, config.basis, xc, config.grid_level, scheme);

  RunOutput out;
  out.record.config = config;
  SpinCoefficients c;
  QuadratureBlock full = problem.full;
  if (config.mode == RunMode::Scf) {
    const ScfResult r = scf_solve(problem);
    c = r.c;
    out.record.energy = r.energy;
    out.record.converged = r.converged;
    out.record.iterations = r.iterations;
  } else {
    OrbitalParams init = initial_params(problem.basis.size, mol.n_alpha, mol.n_beta, scheme, config.seed);
    if (config.mode == RunMode::Neural) init.theta = MLPParams::identity_init({3, 9, 9, 9, 1}, 2.0, config.seed);
    DirectResult r = run_direct(problem, std::move(init), optimizer_config(config));
    c = orthonormal_coefficients(r.params, problem.whitening);
    full = with_params_basis(r.params, problem.basis, std::move(full));
    out.record.energy = r.energy;
    out.record.converged = r.converged;
    out.record.iterations = r.epochs;
    out.record.theta = r.params.theta;
    out.trace = std::move(r.trace);
  }
  out.record.sc_residual = self_consistency_residual(c, problem.basis.overlap, full, xc).subspace;
  out.record.electrons = electron_count(c, full);
  out.record.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RunOutput run_calculation(const RunConfig& config) {
  Molecule mol = load_xyz(config.geometry);
  if (config.multiplicity != 0) mol = make_molecule(mol.atoms, mol.charge, config.multiplicity);
  return run_calculation(config, mol);
}

BenchRow bench_direct(const Problem& problem, std::size_t m, int iterations, std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  m = std::min(m, problem.grid.size());
  OrbitalParams params =
      initial_params(problem.basis.size, problem.mol.n_alpha, problem.mol.n_beta, problem.scheme, seed);
  std::vector<double> flat = flatten(params);
  AdamState adam(flat.size());
  Rng rng(seed);
  double total_ms = 0.0;
  // One untimed warm-up step.
  for (int it = -1; it < iterations; ++it) {
    const auto t0 = Clock::now();
    const QuadratureBlock block = make_batch_block(problem.full, sample_minibatch(problem.grid, m, rng));
    const EnergyGradient eg = energy_gradient(params, problem, block);
    adam_step(adam, flat, flatten(eg.grad), 1e-3);
    unflatten(flat, params);
    if (it >= 0) total_ms += std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }
  return {"direct", problem.grid.size(), m, total_ms / iterations};
}

BenchRow bench_scf(const Problem& problem, int iterations) {
  using Clock = std::chrono::steady_clock;
  const Matrix core = kinetic_matrix(problem.full) + potential_matrix(problem.full, problem.full.v_ext);
  SpinCoefficients c;
  std::vector<double> eps;
  solve_occupied(core, problem.whitening, problem.mol.n_alpha, c.alpha, eps);
  solve_occupied(core, problem.whitening, problem.mol.n_beta, c.beta, eps);
  double total_ms = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const auto t0 = Clock::now();
    const FockPair f = fock_matrix(c, problem.full, problem.xc);
    solve_occupied(f.alpha, problem.whitening, problem.mol.n_alpha, c.alpha, eps);
    solve_occupied(f.beta, problem.whitening, problem.mol.n_beta, c.beta, eps);
    total_ms += std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }
  return {"scf", problem.grid.size(), problem.grid.size(), total_ms / iterations};
}

}  // namespace qrdft
