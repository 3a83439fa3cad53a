#include <doctest.h>

#include "helpers.hpp"
#include "qrdft/orbitals.hpp"
#include "qrdft/ortho.hpp"

using namespace qrdft;

namespace {

constexpr WhiteningScheme kSchemes[] = {WhiteningScheme::Pca, WhiteningScheme::Cholesky, WhiteningScheme::Zca};

Matrix projector(const Matrix& c) { return matmul_tn(c, c); }

}  // namespace

TEST_CASE("whitening matrices") {
  for (WhiteningScheme s : kSchemes) {
    CAPTURE(to_string(s));
    CHECK(max_abs_diff(whitening_matrix(Matrix::identity(4), s), Matrix::identity(4)) < 1e-14);
    CHECK(max_abs_diff(whitening_matrix(Matrix{{4}}, s), Matrix{{0.5}}) < 1e-15);
    Rng rng(21);
    for (int k = 0; k < 10; ++k) {
      const Matrix a = testing::random_spd(8, rng);
      const Matrix d = whitening_matrix(a, s);
      CHECK(max_abs_diff(matmul(matmul(d, a), d.transpose()), Matrix::identity(8)) <= 1e-8);
    }
  }
  CHECK(parse_whitening("zca") == WhiteningScheme::Zca);
  CHECK_THROWS_AS(parse_whitening("svd"), InputError);
}

TEST_CASE("orthonormal coefficients") {
  SUBCASE("identity overlap") {
    const Matrix w = Matrix::identity(4).left_cols(2);
    const Matrix c = orthonormal_coefficients(w, Matrix::identity(4));
    CHECK(max_abs_diff(c, Matrix::identity(4).top_rows(2)) < 1e-15);
  }
  SUBCASE("random parameters stay on the manifold") {
    for (const Molecule& mol : {testing::h2(), testing::h2o()}) {
      const AOBasis basis = build_basis(mol.atoms.size() == 2 ? "6-31g" : "sto-3g", mol);
      const std::size_t b = basis.size, n = std::min<std::size_t>(5, b - 1);
      for (WhiteningScheme s : kSchemes) {
        const Matrix d = whitening_matrix(basis.overlap, s);
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
          const Matrix c = orthonormal_coefficients(random_init(b, n, seed), d);
          worst = std::max(worst, max_abs_diff(matmul(matmul(c, basis.overlap), c.transpose()), Matrix::identity(n)));
        }
        CHECK(worst <= 1e-10);
      }
    }
  }
  SUBCASE("reachability") {
    const AOBasis basis = build_basis("sto-3g", testing::h2o());
    for (WhiteningScheme s : kSchemes) {
      const Matrix d = whitening_matrix(basis.overlap, s);
      // Targets built with another scheme so the reconstruction is not an identity map.
      const Matrix d_other = whitening_matrix(basis.overlap, WhiteningScheme::Zca);
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix c0 = orthonormal_coefficients(random_init(basis.size, 5, 1000 + seed), d_other);
        const Matrix c = orthonormal_coefficients(params_for_coefficients(c0, d), d);
        CHECK(max_abs_diff(projector(c), projector(c0)) <= 1e-8);
      }
    }
  }
  SUBCASE("empty channel") {
    OrbitalParams p = initial_params(4, 1, 0, WhiteningScheme::Pca, 0);
    const SpinCoefficients c = orthonormal_coefficients(p, Matrix::identity(4));
    CHECK(c.alpha.rows() == 1);
    CHECK(c.beta.rows() == 0);
    CHECK(c.beta.cols() == 4);
  }
}

TEST_CASE("random initialization") {
  CHECK(random_init(4, 2, 0) == random_init(4, 2, 0));
  CHECK_FALSE(random_init(4, 2, 0) == random_init(4, 2, 1));
  CHECK_NOTHROW(qr_positive(random_init(4, 2, 0)));
  CHECK_THROWS_AS(random_init(2, 3, 0), InputError);
  const OrbitalParams p = initial_params(9, 9, 7, WhiteningScheme::Pca, 3);
  CHECK(p.w_beta == p.w_alpha.left_cols(7));
}

TEST_CASE("QR pullback matches finite differences") {
  const AOBasis basis = build_basis("sto-3g", testing::h2o());
  Rng rng(8);
  for (WhiteningScheme s : kSchemes) {
    const Matrix d = whitening_matrix(basis.overlap, s);
    const Matrix w = testing::random_matrix(basis.size, 3, rng);
    const Matrix g = testing::random_matrix(3, basis.size, rng);
    const auto f = [&](const Matrix& x) {
      const Matrix c = orthonormal_coefficients(x, d);
      double acc = 0.0;
      for (std::size_t i = 0; i < c.data().size(); ++i) acc += g.data()[i] * c.data()[i];
      return acc;
    };
    const Matrix grad = coefficient_gradient_to_params(w, d, g);
    const double h = 1e-5;
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j) {
        Matrix wp = w, wm = w;
        wp(i, j) += h;
        wm(i, j) -= h;
        const double fd = (f(wp) - f(wm)) / (2.0 * h);
        CHECK(testing::rel_err(grad(i, j), fd, 1e-6) <= 1e-6);
      }
  }
}

TEST_CASE("sign gauge leaves the orbital subspace unchanged") {
  const AOBasis basis = build_basis("sto-3g", testing::h2o());
  const Matrix d = whitening_matrix(basis.overlap, WhiteningScheme::Pca);
  Matrix w = random_init(basis.size, 5, 2);
  const Matrix c = orthonormal_coefficients(w, d);
  for (std::size_t i = 0; i < w.rows(); ++i) w(i, 1) = -w(i, 1), w(i, 3) = -w(i, 3);
  const Matrix c2 = orthonormal_coefficients(w, d);
  CHECK(max_abs_diff(projector(c), projector(c2)) <= 1e-12);
}
