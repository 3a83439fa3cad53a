#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qrdft/linalg.hpp"
#include "qrdft/neural.hpp"
#include "qrdft/orbitals.hpp"

namespace qrdft {

enum class WhiteningScheme { Pca, Cholesky, Zca };

WhiteningScheme parse_whitening(std::string_view name);
std::string to_string(WhiteningScheme scheme);

enum class Spin { Alpha, Beta };

/// Unconstrained parameters of the orbital manifold.
struct OrbitalParams {
  Matrix w_alpha;  // B × n_alpha
  Matrix w_beta;   // B × n_beta
  WhiteningScheme scheme = WhiteningScheme::Pca;
  std::optional<MLPParams> theta;

  const Matrix& w(Spin s) const { return s == Spin::Alpha ? w_alpha : w_beta; }
  Matrix& w(Spin s) { return s == Spin::Alpha ? w_alpha : w_beta; }
};

/// D with D S Dᵀ = I.
Matrix whitening_matrix(const Matrix& s, WhiteningScheme scheme);

/// C = Qᵀ D where (Q, R) = qr_positive(W); C S Cᵀ = I for any full-rank W.
Matrix orthonormal_coefficients(const Matrix& w, const Matrix& d);
Matrix orthonormal_coefficients(const OrbitalParams& params, const Matrix& d, Spin spin);
SpinCoefficients orthonormal_coefficients(const OrbitalParams& params, const Matrix& d);

/// B × N matrix of i.i.d. standard normal entries.
Matrix random_init(std::size_t b, std::size_t n, std::uint64_t seed);

/// Parameters for a molecule: W_alpha random, W_beta its leading n_beta
/// columns, so equal-count channels start with identical orbitals.
OrbitalParams initial_params(std::size_t basis_size, int n_alpha, int n_beta, WhiteningScheme scheme,
                             std::uint64_t seed);

/// W whose orbitals reproduce C0 (rows S-orthonormal): W = (C0 D⁻¹)ᵀ.
Matrix params_for_coefficients(const Matrix& c0, const Matrix& d);

/// Pulls dE/dC back through C = Qᵀ D and the positive-diagonal QR to dE/dW.
Matrix coefficient_gradient_to_params(const Matrix& w, const Matrix& d, const Matrix& grad_c);

}  // namespace qrdft
