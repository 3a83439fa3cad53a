#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qrdft/driver.hpp"

namespace {

using namespace qrdft;

void add_common(CLI::App* cmd, RunConfig& cfg, std::string& mode) {
  cmd->add_option("--geometry", cfg.geometry, "XYZ file in angstrom")->required()->check(CLI::ExistingFile);
  cmd->add_option("--basis", cfg.basis, "sto-3g or 6-31g")->capture_default_str();
  cmd->add_option("--xc", cfg.xc, "lda_x or lda_x_vwn")->capture_default_str();
  cmd->add_option("--mode", mode, "direct, scf or neural")->capture_default_str();
  cmd->add_option("--grid-level", cfg.grid_level, "1..5")->check(CLI::Range(1, 5))->capture_default_str();
  cmd->add_option("--whitening", cfg.whitening, "pca, cholesky or zca")->capture_default_str();
  cmd->add_option("--batch-size", cfg.batch_size, "minibatch size (0: whole grid)")->capture_default_str();
  cmd->add_option("--lr", cfg.lr, "initial learning rate")->capture_default_str();
  cmd->add_option("--epochs", cfg.epochs, "maximum epochs")->capture_default_str();
  cmd->add_option("--decay-epochs", cfg.decay_epochs, "epochs at which the learning rate decays")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--decay-factor", cfg.decay_factor, "learning rate decay factor")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  cmd->add_option("--out", cfg.out, "JSON result path");
  cmd->add_option("--trace", cfg.trace, "CSV trace path");
}

void write_file(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
}

void print_breakdown(const ResultRecord& r) {
  const EnergyBreakdown& e = r.energy;
  std::printf("mode %-7s mult %d  converged %s  iterations %d\n", to_string(r.config.mode).c_str(),
              r.config.multiplicity, r.converged ? "yes" : "no", r.iterations);
  std::printf("  kinetic   %16.8f\n  external  %16.8f\n  hartree   %16.8f\n  xc        %16.8f\n"
              "  nuclear   %16.8f\n  total     %16.8f\n",
              e.kinetic, e.external, e.hartree, e.xc, e.nuclear, e.total);
  std::printf("  electrons %16.8f  sc_residual %.3e  wall %.2f s\n", r.electrons, r.sc_residual, r.wall_time_s);
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  if (path.empty()) return path;
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kohn-Sham DFT by direct minimization over orthonormal orbitals"};
  app.require_subcommand(1);

  RunConfig cfg;
  if (const char* env = std::getenv("QRDFT_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);
  std::string mode = "direct";

  auto* energy = app.add_subcommand("energy", "ground-state energy of one geometry");
  add_common(energy, cfg, mode);
  energy->add_option("--multiplicity", cfg.multiplicity, "spin multiplicity (0: lowest)");

  auto* magnetism = app.add_subcommand("magnetism", "compare spin multiplicities");
  add_common(magnetism, cfg, mode);
  std::vector<int> mults{1, 3};
  magnetism->add_option("--multiplicities", mults, "comma-separated list")->delimiter(',')->capture_default_str();

  auto* bench = app.add_subcommand("bench", "per-iteration timings across grid sizes");
  add_common(bench, cfg, mode);
  std::vector<int> levels{2, 4};
  std::vector<std::size_t> batch_sizes{1024};
  int iterations = 10;
  int scf_iterations = 2;
  bench->add_option("--grid-levels", levels, "grid levels")->delimiter(',')->capture_default_str();
  bench->add_option("--batch-sizes", batch_sizes, "minibatch sizes")->delimiter(',')->capture_default_str();
  bench->add_option("--iterations", iterations, "timed direct steps per row")->capture_default_str();
  bench->add_option("--scf-iterations", scf_iterations, "timed SCF iterations per row")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.mode = parse_mode(mode);
    if (*energy) {
      const RunOutput out = run_calculation(cfg);
      print_breakdown(out.record);
      write_file(cfg.out, to_json(out.record) + "\n");
      if (cfg.mode != RunMode::Scf) write_file(cfg.trace, out.trace.to_csv());
      return out.record.converged ? 0 : 2;
    }
    if (*magnetism) {
      const Molecule base = load_xyz(cfg.geometry);
      std::vector<ResultRecord> records;
      bool all_converged = true;
      for (int m : mults) {
        RunConfig c = cfg;
        c.multiplicity = m;
        const Molecule mol = make_molecule(base.atoms, base.charge, m);
        const std::string suffix = "_m" + std::to_string(m);
        const RunOutput out = run_calculation(c, mol);
        print_breakdown(out.record);
        write_file(with_suffix(cfg.out, suffix), to_json(out.record) + "\n");
        if (cfg.mode != RunMode::Scf) write_file(with_suffix(cfg.trace, suffix), out.trace.to_csv());
        all_converged = all_converged && out.record.converged;
        records.push_back(out.record);
      }
      if (records.size() > 1) {
        const ResultRecord* lowest = &records.front();
        for (const ResultRecord& r : records)
          if (r.energy.total < lowest->energy.total) lowest = &r;
        const bool para = lowest->config.multiplicity > records.front().config.multiplicity;
        std::printf("verdict: %s (lowest multiplicity %d at %.8f)\n", para ? "paramagnetic" : "diamagnetic",
                    lowest->config.multiplicity, lowest->energy.total);
      }
      return all_converged ? 0 : 2;
    }
    if (*bench) {
      const Molecule mol = load_xyz(cfg.geometry);
      const XCFunctional xc = parse_xc(cfg.xc);
      const WhiteningScheme scheme = parse_whitening(cfg.whitening);
      std::string csv = "mode,n,m,iter_ms\n";
      std::cout << csv;
      for (int level : levels) {
        const Problem problem = make_problem(mol, cfg.basis, xc, level, scheme);
        std::vector<BenchRow> rows;
        for (std::size_t m : batch_sizes) rows.push_back(bench_direct(problem, m, iterations, cfg.seed));
        rows.push_back(bench_scf(problem, scf_iterations));
        for (const BenchRow& r : rows) {
          const std::string line =
              r.mode + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," + std::to_string(r.iter_ms);
          std::cout << line << "\n";
          csv += line + "\n";
        }
      }
      write_file(cfg.out, csv);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
