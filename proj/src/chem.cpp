#include "qrdft/chem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qrdft {

namespace {

constexpr std::array<std::string_view, 18> kSymbols = {"H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",
                                                        "Ne", "Na", "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar"};

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw InputError("");
    return v;
  } catch (const std::exception&) {
    throw InputError("malformed " + what + ": '" + s + "'");
  }
}

double parse_double(const std::string& s, int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw InputError("");
    return v;
  } catch (const std::exception&) {
    throw InputError("malformed coordinate '" + s + "' on line " + std::to_string(line_no));
  }
}

}  // namespace

int Molecule::total_nuclear_charge() const {
  int z = 0;
  for (const auto& a : atoms) z += a.z;
  return z;
}

int atomic_number(std::string_view symbol) {
  for (std::size_t i = 0; i < kSymbols.size(); ++i)
    if (kSymbols[i] == symbol) return static_cast<int>(i) + 1;
  throw InputError("unknown element '" + std::string(symbol) + "'");
}

std::string_view element_symbol(int z) {
  if (z < 1 || z > static_cast<int>(kSymbols.size())) throw InputError("unsupported atomic number " + std::to_string(z));
  return kSymbols[z - 1];
}

std::pair<int, int> electron_counts(const Molecule& mol, int multiplicity) {
  const int n = mol.total_nuclear_charge() - mol.charge;
  if (n < 0) throw InputError("charge exceeds nuclear charge");
  if (multiplicity < 1) throw InputError("multiplicity must be >= 1");
  const int unpaired = multiplicity - 1;
  if (unpaired > n || (n - unpaired) % 2 != 0)
    throw InputError("multiplicity " + std::to_string(multiplicity) + " is incompatible with " + std::to_string(n) +
                     " electrons");
  const int n_beta = (n - unpaired) / 2;
  return {n_beta + unpaired, n_beta};
}

Molecule make_molecule(std::vector<Atom> atoms, int charge, int multiplicity) {
  Molecule mol;
  mol.atoms = std::move(atoms);
  mol.charge = charge;
  if (multiplicity == 0) multiplicity = (mol.total_nuclear_charge() - charge) % 2 == 0 ? 1 : 2;
  std::tie(mol.n_alpha, mol.n_beta) = electron_counts(mol, multiplicity);
  return mol;
}

Molecule parse_xyz(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty XYZ input");
  std::istringstream count_stream(line);
  std::string count_token, extra;
  count_stream >> count_token;
  if (count_token.empty() || (count_stream >> extra)) throw InputError("malformed atom count line");
  const int count = parse_int(count_token, "atom count");
  if (count < 1) throw InputError("atom count must be positive");

  int charge = 0, multiplicity = 0;
  if (std::getline(in, line)) {
    std::istringstream comment(line);
    std::string tok;
    while (comment >> tok) {
      if (tok.rfind("charge=", 0) == 0) charge = parse_int(tok.substr(7), "charge");
      if (tok.rfind("mult=", 0) == 0) multiplicity = parse_int(tok.substr(5), "multiplicity");
    }
  }
  if (multiplicity < 0) throw InputError("multiplicity must be >= 1");

  std::vector<Atom> atoms;
  int line_no = 2;
  while (static_cast<int>(atoms.size()) < count && std::getline(in, line)) {
    ++line_no;
    std::istringstream row(line);
    std::vector<std::string> tokens;
    for (std::string tok; row >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() != 4) throw InputError("malformed atom line " + std::to_string(line_no));
    Atom atom;
    atom.symbol = tokens[0];
    atom.z = atomic_number(atom.symbol);
    for (int k = 0; k < 3; ++k) atom.position[k] = parse_double(tokens[k + 1], line_no) * kBohrPerAngstrom;
    atoms.push_back(std::move(atom));
  }
  if (static_cast<int>(atoms.size()) != count) throw InputError("XYZ atom count does not match the atom lines");
  return make_molecule(std::move(atoms), charge, multiplicity);
}

Molecule load_xyz(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open geometry file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_xyz(ss.str());
}

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double nuclear_repulsion(const Molecule& mol) {
  double e = 0.0;
  for (std::size_t i = 0; i < mol.atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < mol.atoms.size(); ++j) {
      const double r = distance(mol.atoms[i].position, mol.atoms[j].position);
      if (!(r > 0.0)) throw InputError("coincident nuclei");
      e += mol.atoms[i].z * mol.atoms[j].z / r;
    }
  }
  return e;
}

}  // namespace qrdft
