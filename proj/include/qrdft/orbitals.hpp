#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrdft/chem.hpp"
#include "qrdft/linalg.hpp"

namespace qrdft {

/// Contracted Cartesian Gaussian shell. `coefficients` already include the
/// primitive normalization and the contracted renormalization.
struct Shell {
  int atom_index = 0;
  int l = 0;
  Vec3 center{};
  std::vector<double> exponents;
  std::vector<double> coefficients;

  int size() const { return l == 0 ? 1 : 3; }
};

/// Raw shell data for one element as read from a basis file.
struct ShellData {
  int l = 0;
  std::vector<double> exponents;
  std::vector<double> coefficients;
};

struct AOBasis {
  std::string name;
  std::vector<Shell> shells;
  std::size_t size = 0;  // number of basis functions B
  Matrix overlap;
};

/// Parses the `ELEMENT / SHELL / END` basis text format, returning the
/// shells of `symbol`. Throws InputError if the element is absent.
std::vector<ShellData> parse_basis_element(std::string_view text, std::string_view symbol);

/// Embedded basis text for "sto-3g" or "6-31g".
std::string_view basis_text(std::string_view name);

AOBasis build_basis(std::string_view name, const Molecule& mol);
/// Normalizes the shells and computes the overlap matrix.
AOBasis make_basis(std::vector<Shell> shells, std::string name = "custom");

/// Normalizes primitive and contracted coefficients of a shell in place.
void normalize_shell(Shell& shell);

Matrix overlap_matrix(const AOBasis& basis);

/// AO data at a single point.
struct AOValues {
  std::vector<double> values;
  std::vector<double> laplacians;
  std::vector<Vec3> gradients;  // empty unless requested
};

AOValues eval_ao(const AOBasis& basis, const Vec3& r, bool with_gradients = false);

/// AO values and Laplacians at many points, row-major n × B.
struct AOTable {
  std::size_t points = 0;
  std::size_t functions = 0;
  std::vector<double> values;
  std::vector<double> laplacians;

  std::span<const double> value_row(std::size_t i) const { return {values.data() + i * functions, functions}; }
  std::span<const double> laplacian_row(std::size_t i) const {
    return {laplacians.data() + i * functions, functions};
  }
};

AOTable tabulate_ao(const AOBasis& basis, std::span<const Vec3> points);

struct MOValues {
  std::vector<double> values;
  std::vector<double> laplacians;
};

/// ψ = C φ for C of shape N × B.
MOValues eval_mo(const Matrix& c, const AOValues& ao);

/// Occupied-orbital coefficients per spin channel, each N_σ × B.
struct SpinCoefficients {
  Matrix alpha;
  Matrix beta;
};

struct SpinDensity {
  double alpha = 0.0;
  double beta = 0.0;
};

SpinDensity density(const Matrix& c_alpha, const Matrix& c_beta, const AOValues& ao);

// Derivative order requested from eval_ao_kernel.
enum class AOOrder { Values = 0, Gradients = 1, Hessians = 2 };

/// Evaluates every basis function at `r`. Writes `values[B]`, and when the
/// order allows, `grads[3B]` and `hess[6B]` (xx, xy, xz, yy, yz, zz).
/// Templated so that the neural warp can evaluate at θ-dependent points.
template <class T>
void eval_ao_kernel(const AOBasis& basis, const T r[3], AOOrder order, T* values, T* grads, T* hess) {
  using std::exp;
  std::size_t mu = 0;
  for (const Shell& sh : basis.shells) {
    const T d[3] = {r[0] - sh.center[0], r[1] - sh.center[1], r[2] - sh.center[2]};
    const T r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    T g0 = T(0.0), g1 = T(0.0), g2 = T(0.0);
    for (std::size_t k = 0; k < sh.exponents.size(); ++k) {
      const double a = sh.exponents[k];
      const T arg = a * r2;
      if (!(arg < 80.0)) continue;
      const T g = sh.coefficients[k] * exp(-arg);
      g0 = g0 + g;
      if (order != AOOrder::Values) g1 = g1 + a * g;
      if (order == AOOrder::Hessians) g2 = g2 + (a * a) * g;
    }
    if (sh.l == 0) {
      values[mu] = g0;
      if (order != AOOrder::Values) {
        for (int i = 0; i < 3; ++i) grads[3 * mu + i] = -2.0 * g1 * d[i];
      }
      if (order == AOOrder::Hessians) {
        int h = 0;
        for (int i = 0; i < 3; ++i)
          for (int j = i; j < 3; ++j, ++h) {
            T v = 4.0 * g2 * d[i] * d[j];
            if (i == j) v = v - 2.0 * g1;
            hess[6 * mu + h] = v;
          }
      }
      ++mu;
    } else {
      for (int a = 0; a < 3; ++a, ++mu) {
        values[mu] = d[a] * g0;
        if (order != AOOrder::Values) {
          for (int i = 0; i < 3; ++i) {
            T v = -2.0 * g1 * d[a] * d[i];
            if (i == a) v = v + g0;
            grads[3 * mu + i] = v;
          }
        }
        if (order == AOOrder::Hessians) {
          int h = 0;
          for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j, ++h) {
              T lin = T(0.0);
              if (a == i) lin = lin + d[j];
              if (a == j) lin = lin + d[i];
              if (i == j) lin = lin + d[a];
              hess[6 * mu + h] = 4.0 * g2 * d[a] * d[i] * d[j] - 2.0 * g1 * lin;
            }
        }
      }
    }
  }
}

/// Laplacian from a packed Hessian; every pipeline uses this summation order.
template <class T>
T hessian_trace(const T* h) {
  return h[0] + h[3] + h[5];
}

}  // namespace qrdft
