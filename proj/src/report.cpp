#include "qrdft/report.hpp"

#include <json.hpp>

#include "qrdft/chem.hpp"

namespace qrdft {

RunMode parse_mode(std::string_view name) {
  if (name == "direct") return RunMode::Direct;
  if (name == "scf") return RunMode::Scf;
  if (name == "neural" || name == "direct+neural") return RunMode::Neural;
  throw InputError("unknown mode '" + std::string(name) + "'");
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Direct: return "direct";
    case RunMode::Scf: return "scf";
    case RunMode::Neural: return "neural";
  }
  return "direct";
}

std::string to_json(const ResultRecord& record, int indent) {
  const RunConfig& c = record.config;
  nlohmann::ordered_json j;
  j["config"] = {
      {"geometry", c.geometry},   {"basis", c.basis},
      {"xc", c.xc},               {"mode", to_string(c.mode)},
      {"grid_level", c.grid_level}, {"whitening", c.whitening},
      {"batch_size", c.batch_size}, {"lr", c.lr},
      {"epochs", c.epochs},       {"decay_epochs", c.decay_epochs},
      {"decay_factor", c.decay_factor}, {"seed", c.seed},
      {"multiplicity", c.multiplicity},
  };
  const EnergyBreakdown& e = record.energy;
  j["energies"] = {{"kinetic", e.kinetic}, {"external", e.external}, {"hartree", e.hartree},
                   {"xc", e.xc},           {"nuclear", e.nuclear},   {"total", e.total}};
  j["converged"] = record.converged;
  j["iterations"] = record.iterations;
  j["sc_residual"] = record.sc_residual;
  j["wall_time_s"] = record.wall_time_s;
  j["electrons"] = record.electrons;
  if (record.theta) {
    j["theta"] = {{"layers", record.theta->layers}, {"alpha", record.theta->alpha}, {"values", record.theta->theta}};
  }
  return j.dump(indent);
}

}  // namespace qrdft
