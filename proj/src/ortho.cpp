#include "qrdft/ortho.hpp"

#include <cmath>
#include <random>

#include "qrdft/chem.hpp"
#include "qrdft/quadrature.hpp"

namespace qrdft {

WhiteningScheme parse_whitening(std::string_view name) {
  if (name == "pca") return WhiteningScheme::Pca;
  if (name == "cholesky") return WhiteningScheme::Cholesky;
  if (name == "zca") return WhiteningScheme::Zca;
  throw InputError("unknown whitening scheme '" + std::string(name) + "'");
}

std::string to_string(WhiteningScheme scheme) {
  switch (scheme) {
    case WhiteningScheme::Pca: return "pca";
    case WhiteningScheme::Cholesky: return "cholesky";
    case WhiteningScheme::Zca: return "zca";
  }
  return "pca";
}

Matrix whitening_matrix(const Matrix& s, WhiteningScheme scheme) {
  switch (scheme) {
    case WhiteningScheme::Pca: {
      const SymEigen eig = sym_eigh(s);
      const double top = eig.values.empty() ? 0.0 : eig.values.back();
      Matrix d = eig.vectors.transpose();
      for (std::size_t k = 0; k < d.rows(); ++k) {
        if (!(eig.values[k] > 1e-12 * top)) throw LinalgError("whitening: overlap matrix is near-singular");
        const double f = 1.0 / std::sqrt(eig.values[k]);
        for (double& v : d.row(k)) v *= f;
      }
      return d;
    }
    case WhiteningScheme::Cholesky:
      // S = L Lᵀ ⇒ D = L⁻¹ gives D S Dᵀ = I, and Dᵀ D = S⁻¹.
      return invert_lower(cholesky_spd(s));
    case WhiteningScheme::Zca:
      return inv_sqrt_spd(s);
  }
  throw LinalgError("unknown whitening scheme");
}

Matrix orthonormal_coefficients(const Matrix& w, const Matrix& d) {
  if (w.rows() != d.rows()) throw LinalgError("orthonormal_coefficients: W rows must match the basis size");
  return matmul_tn(qr_positive(w).q, d);
}

Matrix orthonormal_coefficients(const OrbitalParams& params, const Matrix& d, Spin spin) {
  const Matrix& w = params.w(spin);
  if (w.cols() == 0) return Matrix(0, d.cols());
  return orthonormal_coefficients(w, d);
}

SpinCoefficients orthonormal_coefficients(const OrbitalParams& params, const Matrix& d) {
  return {orthonormal_coefficients(params, d, Spin::Alpha), orthonormal_coefficients(params, d, Spin::Beta)};
}

Matrix random_init(std::size_t b, std::size_t n, std::uint64_t seed) {
  if (n > b) throw InputError("random_init: more orbitals than basis functions");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix w(b, n);
  for (double& v : w.data()) v = normal(rng);
  return w;
}

OrbitalParams initial_params(std::size_t basis_size, int n_alpha, int n_beta, WhiteningScheme scheme,
                             std::uint64_t seed) {
  if (n_alpha < n_beta) throw InputError("n_alpha must be >= n_beta");
  if (static_cast<std::size_t>(n_alpha) > basis_size)
    throw InputError("basis has fewer functions than occupied orbitals");
  OrbitalParams p;
  p.scheme = scheme;
  p.w_alpha = random_init(basis_size, n_alpha, seed);
  p.w_beta = p.w_alpha.left_cols(n_beta);
  return p;
}

Matrix params_for_coefficients(const Matrix& c0, const Matrix& d) {
  // D⁻¹ = Dᵀ (D Dᵀ)⁻¹, and C0 D⁻¹ has orthonormal rows whenever C0 S C0ᵀ = I.
  const Matrix l_inv = invert_lower(cholesky_spd(matmul_nt(d, d)));
  const Matrix d_inv = matmul_tn(d, matmul_tn(l_inv, l_inv));
  return matmul(c0, d_inv).transpose();
}

Matrix coefficient_gradient_to_params(const Matrix& w, const Matrix& d, const Matrix& grad_c) {
  if (w.cols() == 0) return Matrix(w.rows(), 0);
  const QR qr = qr_positive(w);
  // C = Qᵀ D  ⇒  dE/dQ = D (dE/dC)ᵀ.
  const Matrix grad_q = matmul_nt(d, grad_c);
  // Thin-QR adjoint with a zero R cotangent:
  //   M = -Q̄ᵀ Q,  W̄ = (Q̄ + Q copyltu(M)) R⁻ᵀ,
  // where copyltu mirrors the lower triangle of M onto the upper one.
  const Matrix m = -1.0 * matmul_tn(grad_q, qr.q);
  Matrix sym(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j) sym(i, j) = sym(j, i) = m(i, j);
  Matrix lhs = grad_q + matmul(qr.q, sym);
  return matmul_nt(lhs, invert_upper(qr.r));
}

}  // namespace qrdft
