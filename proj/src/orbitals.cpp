#include "qrdft/orbitals.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "embedded_data.hpp"

namespace qrdft {

namespace {

// ∫ x^(i+j) style 1D overlap of two Cartesian Gaussian factors with
// angular powers la, lb ∈ {0, 1} along one axis.
double overlap_1d(int la, int lb, double a, double b, double ax, double bx) {
  const double p = a + b;
  const double px = (a * ax + b * bx) / p;
  const double s00 = std::sqrt(std::numbers::pi / p) * std::exp(-a * b / p * (ax - bx) * (ax - bx));
  const double pa = px - ax, pb = px - bx;
  if (la == 0 && lb == 0) return s00;
  if (la == 1 && lb == 0) return pa * s00;
  if (la == 0 && lb == 1) return pb * s00;
  return (pa * pb + 0.5 / p) * s00;
}

double primitive_norm(double alpha, int l) {
  // (2α/π)^{3/4} (4α)^{l/2} / sqrt((2l-1)!!) with a single Cartesian
  // power of at most 1, so the double factorial is 1.
  const double n = std::pow(2.0 * alpha / std::numbers::pi, 0.75);
  return l == 0 ? n : n * 2.0 * std::sqrt(alpha);
}

// Overlap of component ca of shell sa with component cb of shell sb.
// Component index selects the Cartesian axis for p shells.
double shell_component_overlap(const Shell& sa, int ca, const Shell& sb, int cb) {
  double total = 0.0;
  for (std::size_t i = 0; i < sa.exponents.size(); ++i) {
    for (std::size_t j = 0; j < sb.exponents.size(); ++j) {
      double prod = sa.coefficients[i] * sb.coefficients[j];
      for (int axis = 0; axis < 3; ++axis) {
        const int la = (sa.l == 1 && ca == axis) ? 1 : 0;
        const int lb = (sb.l == 1 && cb == axis) ? 1 : 0;
        prod *= overlap_1d(la, lb, sa.exponents[i], sb.exponents[j], sa.center[axis], sb.center[axis]);
      }
      total += prod;
    }
  }
  return total;
}

}  // namespace

std::vector<ShellData> parse_basis_element(std::string_view text, std::string_view symbol) {
  std::istringstream in{std::string(text)};
  std::string line;
  bool inside = false, found = false;
  std::vector<ShellData> shells;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string key;
    if (!(row >> key) || key[0] == '#') continue;
    if (key == "ELEMENT") {
      std::string sym;
      row >> sym;
      inside = (sym == symbol);
      found = found || inside;
    } else if (key == "END") {
      if (inside) break;
    } else if (key == "SHELL" && inside) {
      std::string letter;
      int count = 0;
      if (!(row >> letter >> count) || count < 1) throw InputError("malformed SHELL line in basis data");
      ShellData sh;
      if (letter == "S") {
        sh.l = 0;
      } else if (letter == "P") {
        sh.l = 1;
      } else {
        throw InputError("unsupported shell type '" + letter + "' (only S and P)");
      }
      for (int k = 0; k < count; ++k) {
        if (!std::getline(in, line)) throw InputError("truncated basis shell");
        std::istringstream prim(line);
        double e = 0.0, c = 0.0;
        if (!(prim >> e >> c)) throw InputError("malformed primitive line in basis data");
        if (!(e > 0.0)) throw InputError("basis exponents must be positive");
        sh.exponents.push_back(e);
        sh.coefficients.push_back(c);
      }
      shells.push_back(std::move(sh));
    }
  }
  if (!found) throw InputError("element " + std::string(symbol) + " missing from basis data");
  return shells;
}

std::string_view basis_text(std::string_view name) {
  if (name == "sto-3g") return embedded::kSto3g;
  if (name == "6-31g") return embedded::k631g;
  throw InputError("unknown basis set '" + std::string(name) + "'");
}

void normalize_shell(Shell& shell) {
  if (shell.exponents.empty() || shell.exponents.size() != shell.coefficients.size())
    throw InputError("shell needs at least one primitive");
  if (shell.l < 0 || shell.l > 1) throw InputError("only s and p shells are supported");
  for (std::size_t k = 0; k < shell.exponents.size(); ++k) {
    if (!(shell.exponents[k] > 0.0)) throw InputError("basis exponents must be positive");
    shell.coefficients[k] *= primitive_norm(shell.exponents[k], shell.l);
  }
  const double self = shell_component_overlap(shell, 0, shell, 0);
  const double f = 1.0 / std::sqrt(self);
  for (double& c : shell.coefficients) c *= f;
}

AOBasis make_basis(std::vector<Shell> shells, std::string name) {
  AOBasis basis;
  basis.name = std::move(name);
  for (Shell& sh : shells) {
    normalize_shell(sh);
    basis.size += sh.size();
  }
  basis.shells = std::move(shells);
  basis.overlap = overlap_matrix(basis);
  return basis;
}

AOBasis build_basis(std::string_view name, const Molecule& mol) {
  const std::string_view text = basis_text(name);
  std::vector<Shell> shells;
  for (std::size_t a = 0; a < mol.atoms.size(); ++a) {
    for (const ShellData& data : parse_basis_element(text, mol.atoms[a].symbol)) {
      Shell sh;
      sh.atom_index = static_cast<int>(a);
      sh.l = data.l;
      sh.center = mol.atoms[a].position;
      sh.exponents = data.exponents;
      sh.coefficients = data.coefficients;
      shells.push_back(std::move(sh));
    }
  }
  return make_basis(std::move(shells), std::string(name));
}

Matrix overlap_matrix(const AOBasis& basis) {
  Matrix s(basis.size, basis.size);
  std::size_t mu = 0;
  for (const Shell& sa : basis.shells) {
    for (int ca = 0; ca < sa.size(); ++ca, ++mu) {
      std::size_t nu = 0;
      for (const Shell& sb : basis.shells) {
        for (int cb = 0; cb < sb.size(); ++cb, ++nu) {
          if (nu < mu) continue;
          s(mu, nu) = s(nu, mu) = shell_component_overlap(sa, ca, sb, cb);
        }
      }
    }
  }
  try {
    cholesky_spd(s);
  } catch (const LinalgError&) {
    throw InputError("overlap matrix is not positive definite (duplicated basis functions?)");
  }
  return s;
}

AOValues eval_ao(const AOBasis& basis, const Vec3& r, bool with_gradients) {
  const std::size_t b = basis.size;
  std::vector<double> grads(3 * b), hess(6 * b);
  AOValues out;
  out.values.resize(b);
  out.laplacians.resize(b);
  const double pt[3] = {r[0], r[1], r[2]};
  eval_ao_kernel<double>(basis, pt, AOOrder::Hessians, out.values.data(), grads.data(), hess.data());
  for (std::size_t mu = 0; mu < b; ++mu) out.laplacians[mu] = hessian_trace(&hess[6 * mu]);
  if (with_gradients) {
    out.gradients.resize(b);
    for (std::size_t mu = 0; mu < b; ++mu) out.gradients[mu] = {grads[3 * mu], grads[3 * mu + 1], grads[3 * mu + 2]};
  }
  return out;
}

AOTable tabulate_ao(const AOBasis& basis, std::span<const Vec3> points) {
  const std::size_t b = basis.size;
  AOTable t;
  t.points = points.size();
  t.functions = b;
  t.values.resize(points.size() * b);
  t.laplacians.resize(points.size() * b);
  std::vector<double> grads(3 * b), hess(6 * b);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double pt[3] = {points[i][0], points[i][1], points[i][2]};
    eval_ao_kernel<double>(basis, pt, AOOrder::Hessians, &t.values[i * b], grads.data(), hess.data());
    for (std::size_t mu = 0; mu < b; ++mu) t.laplacians[i * b + mu] = hessian_trace(&hess[6 * mu]);
  }
  return t;
}

MOValues eval_mo(const Matrix& c, const AOValues& ao) {
  if (c.cols() != ao.values.size() || ao.laplacians.size() != ao.values.size())
    throw LinalgError("eval_mo: coefficient/basis shape mismatch");
  MOValues mo{std::vector<double>(c.rows()), std::vector<double>(c.rows())};
  for (std::size_t i = 0; i < c.rows(); ++i) {
    double v = 0.0, l = 0.0;
    for (std::size_t mu = 0; mu < c.cols(); ++mu) {
      v += c(i, mu) * ao.values[mu];
      l += c(i, mu) * ao.laplacians[mu];
    }
    mo.values[i] = v;
    mo.laplacians[i] = l;
  }
  return mo;
}

SpinDensity density(const Matrix& c_alpha, const Matrix& c_beta, const AOValues& ao) {
  SpinDensity rho;
  for (double v : eval_mo(c_alpha, ao).values) rho.alpha += v * v;
  for (double v : eval_mo(c_beta, ao).values) rho.beta += v * v;
  return rho;
}

}  // namespace qrdft
