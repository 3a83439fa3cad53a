#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrdft/energy.hpp"
#include "qrdft/neural.hpp"

namespace qrdft {

enum class RunMode { Direct, Scf, Neural };

RunMode parse_mode(std::string_view name);
std::string to_string(RunMode mode);

struct RunConfig {
  std::string geometry;
  std::string basis = "6-31g";
  std::string xc = "lda_x";
  RunMode mode = RunMode::Direct;
  int grid_level = 3;
  std::string whitening = "pca";
  std::size_t batch_size = 1024;
  double lr = 0.1;
  int epochs = 200;
  std::vector<int> decay_epochs{60};
  double decay_factor = 0.1;
  std::uint64_t seed = 0;
  int multiplicity = 0;  // 0: lowest compatible
  std::string out;
  std::string trace;
};

struct ResultRecord {
  RunConfig config;
  EnergyBreakdown energy;
  bool converged = false;
  int iterations = 0;
  double sc_residual = 0.0;
  double wall_time_s = 0.0;
  double electrons = 0.0;
  std::optional<MLPParams> theta;
};

std::string to_json(const ResultRecord& record, int indent = 2);

}  // namespace qrdft
