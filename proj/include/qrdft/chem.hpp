#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qrdft {

using Vec3 = std::array<double, 3>;

inline constexpr double kBohrPerAngstrom = 1.8897259886;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Atom {
  std::string symbol;
  int z = 0;
  Vec3 position{};  // bohr
};

struct Molecule {
  std::vector<Atom> atoms;
  int charge = 0;
  int n_alpha = 0;
  int n_beta = 0;

  int total_nuclear_charge() const;
  int electrons() const { return n_alpha + n_beta; }
  int multiplicity() const { return n_alpha - n_beta + 1; }
};

/// Atomic number for a symbol in H..Ar; throws InputError otherwise.
int atomic_number(std::string_view symbol);
std::string_view element_symbol(int z);

/// (n_alpha, n_beta) for a given multiplicity.
std::pair<int, int> electron_counts(const Molecule& mol, int multiplicity);

/// Builds a molecule with the lowest multiplicity compatible with the
/// electron count when `multiplicity` is 0.
Molecule make_molecule(std::vector<Atom> atoms, int charge = 0, int multiplicity = 0);

/// XYZ text in ångström. The comment line may carry `charge=<int>` and
/// `mult=<int>` tokens.
Molecule parse_xyz(std::string_view text);
Molecule load_xyz(const std::string& path);

double nuclear_repulsion(const Molecule& mol);

double distance(const Vec3& a, const Vec3& b);

}  // namespace qrdft
