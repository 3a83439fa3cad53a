#include <doctest.h>

#include "helpers.hpp"
#include "qrdft/scf.hpp"

using namespace qrdft;

namespace {

SpinCoefficients random_orthonormal(const Problem& p, int na, int nb, std::uint64_t seed) {
  OrbitalParams w = initial_params(p.basis.size, na, nb, WhiteningScheme::Pca, seed);
  w.w_beta = random_init(p.basis.size, nb, seed + 100);
  return orthonormal_coefficients(w, p.whitening);
}

double trace_product(const Matrix& c, const Matrix& m) {
  // tr(Cᵀ C M) = Σ_k c_k M c_kᵀ
  const Matrix cm = matmul(c, m);
  double t = 0.0;
  for (std::size_t k = 0; k < c.rows(); ++k)
    for (std::size_t mu = 0; mu < c.cols(); ++mu) t += cm(k, mu) * c(k, mu);
  return t;
}

}  // namespace

TEST_CASE("Fock matrix structure") {
  const Problem p = make_problem(testing::h2o(), "sto-3g", XCFunctional::LdaX, 1);
  const Matrix core = kinetic_matrix(p.full) + potential_matrix(p.full, p.full.v_ext);
  const SpinCoefficients empty{Matrix(0, p.basis.size), Matrix(0, p.basis.size)};
  const FockPair f0 = fock_matrix(empty, p.full, p.xc);
  CHECK(max_abs_diff(f0.alpha, core) <= 1e-12);
  CHECK(max_abs_diff(f0.beta, core) <= 1e-12);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const FockPair f = fock_matrix(random_orthonormal(p, 5, 4, seed), p.full, XCFunctional::LdaXVwn);
    CHECK(max_abs_diff(f.alpha, f.alpha.transpose()) <= 1e-9);
    CHECK(max_abs_diff(f.beta, f.beta.transpose()) <= 1e-9);
  }
}

TEST_CASE("energy terms recovered from Fock components") {
  const Problem p = make_problem(testing::he(), "sto-3g", XCFunctional::LdaX, 3);
  const ScfResult r = scf_solve(p);
  const BlockEvaluation ev = evaluate_block(r.c, p.full, p.xc);
  const Matrix t = kinetic_matrix(p.full);
  const Matrix v = potential_matrix(p.full, p.full.v_ext);
  const Matrix j = potential_matrix(p.full, ev.hartree_potential);
  double kin = 0.0, ext = 0.0, har = 0.0;
  for (const Matrix* c : {&r.c.alpha, &r.c.beta}) {
    kin += trace_product(*c, t);
    ext += trace_product(*c, v);
    har += 0.5 * trace_product(*c, j);
  }
  CHECK(std::abs(kin - r.energy.kinetic) <= 1e-6);
  CHECK(std::abs(ext - r.energy.external) <= 1e-6);
  CHECK(std::abs(har - r.energy.hartree) <= 1e-6);
}

TEST_CASE("SCF solutions") {
  SUBCASE("He/STO-3G") {
    const Problem p = make_problem(testing::he(), "sto-3g", XCFunctional::LdaX, 3);
    const ScfResult r = scf_solve(p);
    CHECK(r.converged);
    CHECK(std::abs(r.energy.total - (-2.65731)) <= 0.05);
    CHECK(self_consistency_residual(r.c, p.basis.overlap, p.full, p.xc).subspace <= 1e-6);
    CHECK(testing::rel_err(electron_count(r.c, p.full), 2.0) <= 1e-3);
  }
  SUBCASE("H2O/STO-3G on a coarse grid") {
    const Problem p = make_problem(testing::h2o(), "sto-3g", XCFunctional::LdaX, 1);
    const ScfResult r = scf_solve(p);
    CHECK(r.converged);
    for (const Matrix* c : {&r.c.alpha, &r.c.beta})
      CHECK(max_abs_diff(matmul(matmul(*c, p.basis.overlap), c->transpose()), Matrix::identity(5)) <= 1e-8);
    const SelfConsistency sc = self_consistency_residual(r.c, p.basis.overlap, p.full, p.xc);
    CHECK(sc.subspace <= 1e-6);
    for (double res : sc.orbital_alpha) CHECK(res <= 1e-5);
    for (std::size_t k = 0; k < sc.eps_alpha.size(); ++k) CHECK(sc.eps_alpha[k] == doctest::Approx(r.eps_alpha[k]).epsilon(1e-5));
  }
}

TEST_CASE("residual discriminates random orbitals") {
  const Problem p = make_problem(testing::h2o(), "sto-3g", XCFunctional::LdaX, 1);
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    CHECK(self_consistency_residual(random_orthonormal(p, 5, 5, seed), p.basis.overlap, p.full, p.xc).subspace > 1e-2);
  SpinCoefficients bad{Matrix(5, p.basis.size, 1.0), Matrix(5, p.basis.size, 1.0)};
  CHECK_THROWS_AS(self_consistency_residual(bad, p.basis.overlap, p.full, p.xc), InputError);
}
