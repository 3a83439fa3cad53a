#include "qrdft/scf.hpp"

#include <cmath>

namespace qrdft {

Matrix kinetic_matrix(const QuadratureBlock& block) {
  const std::size_t nb = block.ao.functions;
  Matrix t(nb, nb);
  for (std::size_t i = 0; i < block.size(); ++i) {
    const auto phi = block.ao.value_row(i);
    const auto lap = block.ao.laplacian_row(i);
    const double hw = -0.5 * block.weights[i];
    for (std::size_t mu = 0; mu < nb; ++mu) {
      const double a = hw * phi[mu];
      for (std::size_t nu = 0; nu < nb; ++nu) t(mu, nu) += a * lap[nu];
    }
  }
  return symmetrized(t);
}

Matrix potential_matrix(const QuadratureBlock& block, std::span<const double> v) {
  const std::size_t nb = block.ao.functions;
  Matrix out(nb, nb);
  for (std::size_t i = 0; i < block.size(); ++i) {
    const auto phi = block.ao.value_row(i);
    for (std::size_t mu = 0; mu < nb; ++mu) {
      const double a = block.weights[i] * v[i] * phi[mu];
      for (std::size_t nu = 0; nu <= mu; ++nu) out(mu, nu) += a * phi[nu];
    }
  }
  for (std::size_t mu = 0; mu < nb; ++mu)
    for (std::size_t nu = 0; nu < mu; ++nu) out(nu, mu) = out(mu, nu);
  return out;
}

namespace {

// d_rho already carries the weights, so it is a per-point potential without w.
Matrix weighted_outer(const QuadratureBlock& block, std::span<const double> d_rho) {
  const std::size_t nb = block.ao.functions;
  Matrix out(nb, nb);
  for (std::size_t i = 0; i < block.size(); ++i) {
    const auto phi = block.ao.value_row(i);
    for (std::size_t mu = 0; mu < nb; ++mu) {
      const double a = d_rho[i] * phi[mu];
      for (std::size_t nu = 0; nu <= mu; ++nu) out(mu, nu) += a * phi[nu];
    }
  }
  for (std::size_t mu = 0; mu < nb; ++mu)
    for (std::size_t nu = 0; nu < mu; ++nu) out(nu, mu) = out(mu, nu);
  return out;
}

std::vector<double> total_density(const SpinCoefficients& c, const QuadratureBlock& block) {
  const std::size_t nb = block.ao.functions;
  std::vector<double> rho(block.size(), 0.0);
  for (std::size_t i = 0; i < block.size(); ++i) {
    const auto phi = block.ao.value_row(i);
    for (const Matrix* m : {&c.alpha, &c.beta})
      for (std::size_t k = 0; k < m->rows(); ++k) {
        const auto ck = m->row(k);
        double psi = 0.0;
        for (std::size_t mu = 0; mu < nb; ++mu) psi += ck[mu] * phi[mu];
        rho[i] += psi * psi;
      }
  }
  return rho;
}

}  // namespace

FockPair fock_matrix(const SpinCoefficients& c, const QuadratureBlock& full, XCFunctional xc) {
  const BlockEvaluation ev = evaluate_block(c, full, xc);
  const Matrix t = kinetic_matrix(full);
  FockPair f;
  f.alpha = t + weighted_outer(full, ev.d_rho_alpha);
  f.beta = t + weighted_outer(full, ev.d_rho_beta);
  f.energy = ev.energy;
  return f;
}

void solve_occupied(const Matrix& f, const Matrix& d, std::size_t n, Matrix& c, std::vector<double>& eps) {
  const SymEigen eig = sym_eigh(matmul(matmul(d, f), d.transpose()));
  const std::size_t b = d.cols();
  c = Matrix(n, b);
  eps.assign(eig.values.begin(), eig.values.begin() + static_cast<std::ptrdiff_t>(n));
  // Row k of C is yₖᵀ D.
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < d.rows(); ++j) {
      const double y = eig.vectors(j, k);
      for (std::size_t mu = 0; mu < b; ++mu) c(k, mu) += y * d(j, mu);
    }
}

namespace {

ScfResult scf_run(const Problem& problem, double beta, int max_iter, double tol) {
  const QuadratureBlock& full = problem.full;
  const Matrix& d = problem.whitening;
  const std::size_t na = problem.mol.n_alpha, nb = problem.mol.n_beta;

  ScfResult r;
  r.mixing_used = beta;
  // Core guess: kinetic + external only.
  const Matrix core = kinetic_matrix(full) + potential_matrix(full, full.v_ext);
  solve_occupied(core, d, na, r.c.alpha, r.eps_alpha);
  solve_occupied(core, d, nb, r.c.beta, r.eps_beta);
  std::vector<double> rho = total_density(r.c, full);

  Matrix fa_prev, fb_prev;
  // Once the mixed iteration settles, momentum is switched off so the final
  // orbitals are eigenvectors of their own Fock matrix rather than of a blend.
  bool polishing = beta == 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    FockPair f = fock_matrix(r.c, full, problem.xc);
    if (it > 1 && !polishing) {
      f.alpha = beta * fa_prev + (1.0 - beta) * f.alpha;
      f.beta = beta * fb_prev + (1.0 - beta) * f.beta;
    }
    fa_prev = f.alpha;
    fb_prev = f.beta;
    solve_occupied(f.alpha, d, na, r.c.alpha, r.eps_alpha);
    solve_occupied(f.beta, d, nb, r.c.beta, r.eps_beta);
    std::vector<double> rho_new = total_density(r.c, full);
    std::vector<double> diff(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) diff[i] = full.weights[i] * std::abs(rho_new[i] - rho[i]);
    rho = std::move(rho_new);
    r.iterations = it;
    r.density_changes.push_back(pairwise_sum(diff));
    if (r.density_changes.back() < tol) {
      if (polishing) {
        r.converged = true;
        break;
      }
      polishing = true;
    }
  }
  r.energy = total_energy(r.c, full, problem.mol, problem.xc);
  return r;
}

}  // namespace

ScfResult scf_solve(const Problem& problem, const ScfOptions& options) {
  if (options.mixing < 0.0 || options.mixing >= 1.0) throw InputError("Fock mixing must lie in [0, 1)");
  ScfResult r = scf_run(problem, options.mixing, options.max_iter, options.tol);
  if (!r.converged && options.fallback && options.mixing > 0.0) {
    ScfResult plain = scf_run(problem, 0.0, options.max_iter, options.tol);
    if (plain.converged) return plain;
  }
  return r;
}

SelfConsistency self_consistency_residual(const SpinCoefficients& c, const Matrix& s, const QuadratureBlock& full,
                                          XCFunctional xc) {
  for (const Matrix* m : {&c.alpha, &c.beta}) {
    if (m->rows() == 0) continue;
    const Matrix g = matmul(matmul(*m, s), m->transpose());
    if (max_abs_diff(g, Matrix::identity(m->rows())) > 1e-8)
      throw InputError("self-consistency check needs S-orthonormal orbitals");
  }
  const FockPair f = fock_matrix(c, full, xc);
  SelfConsistency out;
  const auto channel = [&](const Matrix& cs, const Matrix& fs, std::vector<double>& res, std::vector<double>& eps) {
    if (cs.rows() == 0) return 0.0;
    const Matrix ct = cs.transpose();
    const Matrix fc = matmul(fs, ct);
    const Matrix sc = matmul(s, ct);
    const Matrix mm = matmul(cs, fc);
    const double sub = frobenius_norm(fc - matmul(sc, mm)) / frobenius_norm(fs);
    // Canonical orbitals: rotate by the eigenvectors of M.
    const SymEigen eig = sym_eigh(symmetrized(mm));
    const Matrix fcu = matmul(fc, eig.vectors);
    const Matrix scu = matmul(sc, eig.vectors);
    eps = eig.values;
    res.assign(cs.rows(), 0.0);
    for (std::size_t k = 0; k < cs.rows(); ++k) {
      double acc = 0.0;
      for (std::size_t mu = 0; mu < fcu.rows(); ++mu) {
        const double v = fcu(mu, k) - eps[k] * scu(mu, k);
        acc += v * v;
      }
      res[k] = std::sqrt(acc);
    }
    return sub;
  };
  out.subspace = std::max(channel(c.alpha, f.alpha, out.orbital_alpha, out.eps_alpha),
                          channel(c.beta, f.beta, out.orbital_beta, out.eps_beta));
  return out;
}

}  // namespace qrdft
