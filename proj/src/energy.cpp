#include "qrdft/energy.hpp"

#include <cmath>

namespace qrdft {

namespace {

// Ψ = Φ Cᵀ over the block rows.
void project(const Matrix& c, const std::vector<double>& ao, std::size_t m, std::size_t nb, Matrix& out) {
  const std::size_t n = c.rows();
  out = Matrix(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const double* phi = ao.data() + i * nb;
    for (std::size_t k = 0; k < n; ++k) {
      const auto ck = c.row(k);
      double s = 0.0;
      for (std::size_t mu = 0; mu < nb; ++mu) s += ck[mu] * phi[mu];
      out(i, k) = s;
    }
  }
}

void check_shapes(const SpinCoefficients& c, const QuadratureBlock& block) {
  const std::size_t nb = block.ao.functions;
  if (c.alpha.cols() != nb || c.beta.cols() != nb) throw LinalgError("coefficient columns must match the basis size");
  if (block.ao.points != block.size() || block.weights.size() != block.size() || block.v_ext.size() != block.size())
    throw LinalgError("quadrature block arrays disagree in length");
}

}  // namespace

std::vector<double> external_potential(const Molecule& mol, std::span<const Vec3> points) {
  std::vector<double> v(points.size(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i)
    for (const Atom& a : mol.atoms) v[i] -= a.z / distance(points[i], a.position);
  return v;
}

QuadratureBlock make_full_block(const Grid& grid, const Molecule& mol, AOTable ao) {
  QuadratureBlock b;
  b.points = grid.points;
  b.weights = grid.weights;
  b.v_ext = external_potential(mol, grid.points);
  b.ao = std::move(ao);
  return b;
}

QuadratureBlock make_full_block(const Grid& grid, const Molecule& mol, const AOBasis& basis) {
  return make_full_block(grid, mol, tabulate_ao(basis, grid.points));
}

QuadratureBlock make_batch_block(const QuadratureBlock& full, const Minibatch& batch) {
  const std::size_t m = batch.indices.size(), nb = full.ao.functions;
  QuadratureBlock b;
  b.points.reserve(m);
  b.weights.reserve(m);
  b.v_ext.reserve(m);
  b.ao.points = m;
  b.ao.functions = nb;
  b.ao.values.reserve(m * nb);
  b.ao.laplacians.reserve(m * nb);
  for (std::size_t idx : batch.indices) {
    if (idx >= full.size()) throw InputError("minibatch index out of range");
    b.points.push_back(full.points[idx]);
    b.weights.push_back(full.weights[idx]);
    b.v_ext.push_back(full.v_ext[idx]);
    const auto v = full.ao.value_row(idx);
    const auto l = full.ao.laplacian_row(idx);
    b.ao.values.insert(b.ao.values.end(), v.begin(), v.end());
    b.ao.laplacians.insert(b.ao.laplacians.end(), l.begin(), l.end());
  }
  b.single_scale = batch.single_scale;
  b.pair_scale = batch.pair_scale;
  return b;
}

std::vector<double> hartree_potential(std::span<const Vec3> points, std::span<const double> charges) {
  const std::size_t n = points.size();
  if (charges.size() != n) throw LinalgError("hartree_potential: length mismatch");
  std::vector<double> x(n), y(n), z(n), v(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = points[i][0];
    y[i] = points[i][1];
    z[i] = points[i][2];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i], yi = y[i], zi = z[i], qi = charges[i];
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = xi - x[j], dy = yi - y[j], dz = zi - z[j];
      const double inv = 1.0 / std::sqrt(dx * dx + dy * dy + dz * dz);
      acc += charges[j] * inv;
      v[j] += qi * inv;
    }
    v[i] += acc;
  }
  return v;
}

BlockEvaluation evaluate_block(const SpinCoefficients& c, const QuadratureBlock& block, XCFunctional xc) {
  check_shapes(c, block);
  const std::size_t m = block.size(), nb = block.ao.functions;
  BlockEvaluation ev;
  project(c.alpha, block.ao.values, m, nb, ev.psi_alpha);
  project(c.beta, block.ao.values, m, nb, ev.psi_beta);
  project(c.alpha, block.ao.laplacians, m, nb, ev.lap_psi_alpha);
  project(c.beta, block.ao.laplacians, m, nb, ev.lap_psi_beta);

  ev.rho_alpha.assign(m, 0.0);
  ev.rho_beta.assign(m, 0.0);
  std::vector<double> kin(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double ra = 0.0, rb = 0.0, t = 0.0;
    for (std::size_t k = 0; k < c.alpha.rows(); ++k) {
      ra += ev.psi_alpha(i, k) * ev.psi_alpha(i, k);
      t += ev.psi_alpha(i, k) * ev.lap_psi_alpha(i, k);
    }
    for (std::size_t k = 0; k < c.beta.rows(); ++k) {
      rb += ev.psi_beta(i, k) * ev.psi_beta(i, k);
      t += ev.psi_beta(i, k) * ev.lap_psi_beta(i, k);
    }
    ev.rho_alpha[i] = ra;
    ev.rho_beta[i] = rb;
    kin[i] = -0.5 * block.weights[i] * t;
  }

  const double ss = block.single_scale, ps = block.pair_scale;
  std::vector<double> ext(m), exc(m), charges(m);
  ev.d_rho_alpha.assign(m, 0.0);
  ev.d_rho_beta.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double rho = ev.rho_alpha[i] + ev.rho_beta[i];
    const double w = block.weights[i];
    const XCPoint p = lda_xc(ev.rho_alpha[i], ev.rho_beta[i], xc);
    ext[i] = w * block.v_ext[i] * rho;
    exc[i] = w * p.energy;
    charges[i] = w * rho;
    ev.d_rho_alpha[i] = ss * w * (block.v_ext[i] + p.v_alpha);
    ev.d_rho_beta[i] = ss * w * (block.v_ext[i] + p.v_beta);
  }

  ev.hartree_potential = hartree_potential(block.points, charges);
  std::vector<double> har(m);
  for (std::size_t i = 0; i < m; ++i) {
    har[i] = charges[i] * ev.hartree_potential[i];
    const double dh = ps * block.weights[i] * ev.hartree_potential[i];
    ev.d_rho_alpha[i] += dh;
    ev.d_rho_beta[i] += dh;
  }

  ev.energy.kinetic = ss * pairwise_sum(kin);
  ev.energy.external = ss * pairwise_sum(ext);
  ev.energy.xc = ss * pairwise_sum(exc);
  ev.energy.hartree = 0.5 * ps * pairwise_sum(har);
  ev.energy.total = ev.energy.electronic();
  return ev;
}

double kinetic_energy(const SpinCoefficients& c, const QuadratureBlock& block) {
  check_shapes(c, block);
  const std::size_t m = block.size(), nb = block.ao.functions;
  Matrix pa, pb, la, lb;
  project(c.alpha, block.ao.values, m, nb, pa);
  project(c.beta, block.ao.values, m, nb, pb);
  project(c.alpha, block.ao.laplacians, m, nb, la);
  project(c.beta, block.ao.laplacians, m, nb, lb);
  std::vector<double> kin(m);
  for (std::size_t i = 0; i < m; ++i) {
    double t = 0.0;
    for (std::size_t k = 0; k < pa.cols(); ++k) t += pa(i, k) * la(i, k);
    for (std::size_t k = 0; k < pb.cols(); ++k) t += pb(i, k) * lb(i, k);
    kin[i] = -0.5 * block.weights[i] * t;
  }
  return block.single_scale * pairwise_sum(kin);
}

namespace {

struct Densities {
  std::vector<double> alpha, beta;
};

Densities block_densities(const SpinCoefficients& c, const QuadratureBlock& block) {
  check_shapes(c, block);
  const std::size_t m = block.size(), nb = block.ao.functions;
  Matrix pa, pb;
  project(c.alpha, block.ao.values, m, nb, pa);
  project(c.beta, block.ao.values, m, nb, pb);
  Densities d{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < pa.cols(); ++k) d.alpha[i] += pa(i, k) * pa(i, k);
    for (std::size_t k = 0; k < pb.cols(); ++k) d.beta[i] += pb(i, k) * pb(i, k);
  }
  return d;
}

}  // namespace

double external_energy(const SpinCoefficients& c, const QuadratureBlock& block) {
  const Densities d = block_densities(c, block);
  std::vector<double> terms(block.size());
  for (std::size_t i = 0; i < terms.size(); ++i)
    terms[i] = block.weights[i] * block.v_ext[i] * (d.alpha[i] + d.beta[i]);
  return block.single_scale * pairwise_sum(terms);
}

double hartree_energy(const SpinCoefficients& c, const QuadratureBlock& block) {
  if (block.size() < 2) throw InputError("hartree_energy needs at least two points");
  const Densities d = block_densities(c, block);
  std::vector<double> q(block.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = block.weights[i] * (d.alpha[i] + d.beta[i]);
  const std::vector<double> v = hartree_potential(block.points, q);
  std::vector<double> terms(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) terms[i] = q[i] * v[i];
  return 0.5 * block.pair_scale * pairwise_sum(terms);
}

double xc_energy(const SpinCoefficients& c, const QuadratureBlock& block, XCFunctional xc) {
  const Densities d = block_densities(c, block);
  std::vector<double> terms(block.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = block.weights[i] * lda_xc(d.alpha[i], d.beta[i], xc).energy;
  return block.single_scale * pairwise_sum(terms);
}

EnergyBreakdown total_energy(const SpinCoefficients& c, const QuadratureBlock& full, const Molecule& mol,
                             XCFunctional xc) {
  EnergyBreakdown e = evaluate_block(c, full, xc).energy;
  e.nuclear = nuclear_repulsion(mol);
  e.total = e.kinetic + e.external + e.hartree + e.xc + e.nuclear;
  return e;
}

double minibatch_energy(const SpinCoefficients& c, const QuadratureBlock& batch, XCFunctional xc) {
  if (batch.size() < 2) throw InputError("minibatch energy needs at least two points");
  return evaluate_block(c, batch, xc).energy.electronic();
}

double electron_count(const SpinCoefficients& c, const QuadratureBlock& block) {
  const Densities d = block_densities(c, block);
  std::vector<double> terms(block.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = block.weights[i] * (d.alpha[i] + d.beta[i]);
  return block.single_scale * pairwise_sum(terms);
}

}  // namespace qrdft
