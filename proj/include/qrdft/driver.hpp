#pragma once

#include "qrdft/optimizer.hpp"
#include "qrdft/report.hpp"
#include "qrdft/scf.hpp"

namespace qrdft {

struct RunOutput {
  ResultRecord record;
  Trace trace;  // empty for SCF runs
};

OptimizerConfig optimizer_config(const RunConfig& config);

/// Runs one calculation of `config` on `mol` (whose multiplicity is already set).
RunOutput run_calculation(const RunConfig& config, const Molecule& mol);

/// Loads the geometry, applies the configured multiplicity and runs.
RunOutput run_calculation(const RunConfig& config);

struct BenchRow {
  std::string mode;
  std::size_t n = 0;
  std::size_t m = 0;
  double iter_ms = 0.0;
};

/// Mean wall time of one minibatch step (sample, gradient, update).
BenchRow bench_direct(const Problem& problem, std::size_t m, int iterations, std::uint64_t seed);
/// Mean wall time of one SCF iteration (Fock build and diagonalization).
BenchRow bench_scf(const Problem& problem, int iterations);

}  // namespace qrdft
