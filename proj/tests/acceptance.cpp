// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "qrdft/driver.hpp"

using namespace qrdft;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunConfig config(const std::string& basis, RunMode mode) {
  RunConfig c;
  c.basis = basis;
  c.mode = mode;
  c.grid_level = 3;
  c.decay_epochs = {60, 120, 160};
  return c;
}

struct Pair {
  std::string name;
  ResultRecord scf;
  ResultRecord direct;
};

Pair run_pair(const std::string& name, const Molecule& mol, const std::string& basis) {
  Pair p{name, run_calculation(config(basis, RunMode::Scf), mol).record,
         run_calculation(config(basis, RunMode::Direct), mol).record};
  std::printf("  %-4s scf %.8f (%.1f s)  direct %.8f (%.1f s)\n", name.c_str(), p.scf.energy.total,
              p.scf.wall_time_s, p.direct.energy.total, p.direct.wall_time_s);
  return p;
}

double block_energy(const OrbitalParams& p, const Problem& problem, const QuadratureBlock& block) {
  const SpinCoefficients c = orthonormal_coefficients(p, problem.whitening);
  return minibatch_energy(c, with_params_basis(p, problem.basis, block), problem.xc);
}

// Worst relative error of the analytic gradient over the given flat slots.
double gradient_error(const OrbitalParams& params, const Problem& problem, const QuadratureBlock& block,
                      const std::vector<std::size_t>& slots, double h) {
  const std::vector<double> grad =
      flatten(energy_gradient(params, problem, with_params_basis(params, problem.basis, block)).grad);
  const std::vector<double> flat = flatten(params);
  double scale = 0.0;
  for (double g : grad) scale = std::max(scale, std::abs(g));
  double worst = 0.0;
  for (std::size_t k : slots) {
    OrbitalParams p = params, m = params;
    std::vector<double> fp = flat, fm = flat;
    fp[k] += h;
    fm[k] -= h;
    unflatten(fp, p);
    unflatten(fm, m);
    const double fd = (block_energy(p, problem, block) - block_energy(m, problem, block)) / (2.0 * h);
    worst = std::max(worst, testing::rel_err(grad[k], fd, 1e-3 * scale));
  }
  return worst;
}

std::vector<std::size_t> slots(std::size_t begin, std::size_t end, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> all;
  for (std::size_t k = begin; k < end; ++k) all.push_back(k);
  Rng rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(count, all.size()));
  return all;
}

bool electrons_ok(const ResultRecord& r, double n) { return std::abs(r.electrons - n) <= 1e-3 * n; }

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const Molecule h2 = testing::h2(), he = testing::he(), h2o = testing::h2o();

  std::printf("running direct and SCF on H2/6-31G, He/STO-3G, H2O/STO-3G (grid level 3)\n");
  const std::vector<Pair> pairs{run_pair("H2", h2, "6-31g"), run_pair("He", he, "sto-3g"),
                                run_pair("H2O", h2o, "sto-3g")};
  const Pair& ph2 = pairs[0];
  const Pair& phe = pairs[1];

  {
    bool ok = true;
    std::string detail;
    for (const Pair& p : pairs) {
      const double diff = std::abs(p.direct.energy.total - p.scf.energy.total);
      const bool fast = p.scf.wall_time_s <= 300.0 && p.direct.wall_time_s <= 300.0;
      ok = ok && diff <= 0.02 && fast;
      detail += fmt("%s |dE|=%.2e ", p.name.c_str(), diff);
    }
    report(1, ok, detail + "(tol 0.02 Ha, <= 300 s per run)");
  }

  {
    const double e_he = phe.scf.energy.total, e_h2 = ph2.scf.energy.total;
    const double nre = nuclear_repulsion(h2);
    const bool ok = std::abs(e_he + 2.65731) <= 0.05 && std::abs(phe.direct.energy.total + 2.65731) <= 0.05 &&
                    std::abs(e_h2 + 1.03864) <= 0.05 && std::abs(ph2.direct.energy.total + 1.03864) <= 0.05 &&
                    std::abs(nre - 0.71375) <= 1e-4;
    report(2, ok, fmt("He %.5f (ref -2.65731)  H2 %.5f (ref -1.03864)  H2 NRE %.6f", e_he, e_h2, nre));
  }

  {
    const auto t = std::chrono::steady_clock::now();
    const Molecule o2 = load_xyz(std::string(QRDFT_DATA_DIR) + "/molecules/o2.xyz");
    const Molecule singlet = make_molecule(o2.atoms, 0, 1), triplet = make_molecule(o2.atoms, 0, 3);
    double gap[2];
    const RunMode modes[2] = {RunMode::Scf, RunMode::Direct};
    for (int k = 0; k < 2; ++k) {
      const double e1 = run_calculation(config("6-31g", modes[k]), singlet).record.energy.total;
      const double e3 = run_calculation(config("6-31g", modes[k]), triplet).record.energy.total;
      gap[k] = e1 - e3;
      std::printf("  O2 %-6s singlet %.6f  triplet %.6f\n", to_string(modes[k]).c_str(), e1, e3);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
    report(3, gap[0] >= 0.02 && gap[1] >= 0.02 && secs <= 1800.0,
           fmt("E(singlet)-E(triplet): scf %.4f  direct %.4f Ha (%.0f s)", gap[0], gap[1], secs));
  }

  {
    const Problem problem = make_problem(he, "sto-3g", XCFunctional::LdaX, 3, WhiteningScheme::Pca);
    OrbitalParams init = initial_params(problem.basis.size, he.n_alpha, he.n_beta, WhiteningScheme::Pca, 0);
    init.theta = MLPParams::identity_init({3, 9, 9, 9, 1}, 2.0, 0);
    OrbitalParams plain = init;
    plain.theta.reset();
    const bool identical = params_energy(init, problem).total == params_energy(plain, problem).total;
    OptimizerConfig oc = optimizer_config(config("sto-3g", RunMode::Neural));
    oc.train_theta = false;
    const double frozen = run_direct(problem, init, oc).energy.total;
    oc.train_theta = true;
    const double joint = run_direct(problem, init, oc).energy.total;
    report(4, identical && frozen - joint >= 0.001,
           fmt("frozen %.6f  joint %.6f  gain %.4f Ha  identity bit-equal %s", frozen, joint, frozen - joint,
               identical ? "yes" : "no"));
  }

  {
    double worst_orth = 0.0, worst_reach = 0.0;
    for (const Molecule* mol : {&h2, &h2o}) {
      const AOBasis basis = build_basis("6-31g", *mol);
      const std::size_t n = static_cast<std::size_t>(mol->n_alpha);
      for (WhiteningScheme s : {WhiteningScheme::Pca, WhiteningScheme::Cholesky, WhiteningScheme::Zca}) {
        const Matrix d = whitening_matrix(basis.overlap, s);
        const Matrix d_other = whitening_matrix(basis.overlap, WhiteningScheme::Zca);
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
          const Matrix c = orthonormal_coefficients(random_init(basis.size, n, seed), d);
          const Matrix g = matmul(matmul(c, basis.overlap), c.transpose());
          worst_orth = std::max(worst_orth, max_abs_diff(g, Matrix::identity(n)));
          const Matrix c0 = orthonormal_coefficients(random_init(basis.size, n, 5000 + seed), d_other);
          const Matrix cr = orthonormal_coefficients(params_for_coefficients(c0, d), d);
          const Matrix p0 = matmul(c0.transpose(), c0), pr = matmul(cr.transpose(), cr);
          worst_reach = std::max(worst_reach, max_abs_diff(p0, pr));
        }
      }
    }
    report(5, worst_orth <= 1e-10 && worst_reach <= 1e-8,
           fmt("max |CSC^T - I| %.2e  reachability %.2e", worst_orth, worst_reach));
  }

  {
    const Problem ph2 = make_problem(h2, "sto-3g", XCFunctional::LdaX, 1, WhiteningScheme::Pca);
    OrbitalParams p = initial_params(ph2.basis.size, 1, 1, WhiteningScheme::Pca, 3);
    p.w_beta = random_init(ph2.basis.size, 1, 4);
    const std::size_t nw = flatten(p).size();
    const double err_w = gradient_error(p, ph2, ph2.full, slots(0, nw, nw, 0), 1e-4);

    const Problem pwat = make_problem(h2o, "sto-3g", XCFunctional::LdaX, 1, WhiteningScheme::Pca);
    OrbitalParams q = initial_params(pwat.basis.size, 5, 5, WhiteningScheme::Pca, 9);
    q.w_beta = random_init(pwat.basis.size, 5, 10);
    const double err_w20 = gradient_error(q, pwat, pwat.full, slots(0, flatten(q).size(), 24, 1), 1e-4);

    p.theta = MLPParams::random({3, 9, 9, 9, 1}, 2.0, 0.3, 11);
    Rng rng(6);
    const QuadratureBlock batch = make_batch_block(ph2.full, sample_minibatch(ph2.grid, 200, rng));
    const double err_t = gradient_error(p, ph2, batch, slots(nw, flatten(p).size(), 24, 3), 1e-5);
    report(6, err_w <= 1e-4 && err_w20 <= 1e-4 && err_t <= 1e-4,
           fmt("H2 W (all %zu) %.1e  H2O W (24) %.1e  H2 theta (24) %.1e", nw, err_w, err_w20, err_t));
  }

  {
    const AOBasis basis = build_basis("6-31g", h2);
    Rng rng(3);
    std::uniform_real_distribution<double> wd(0.05, 0.4);
    QuadratureBlock full;
    for (int i = 0; i < 8; ++i) {
      full.points.push_back(testing::random_point(rng));
      full.weights.push_back(wd(rng));
    }
    full.v_ext = external_potential(h2, full.points);
    full.ao = tabulate_ao(basis, full.points);
    const Matrix d = whitening_matrix(basis.overlap, WhiteningScheme::Pca);
    OrbitalParams p = initial_params(basis.size, 1, 1, WhiteningScheme::Pca, 1);
    p.w_beta = random_init(basis.size, 1, 2);
    const SpinCoefficients c = orthonormal_coefficients(p, d);
    const EnergyBreakdown ref = evaluate_block(c, full, XCFunctional::LdaX).energy;
    double single = 0.0, pair = 0.0;
    int count = 0;
    for (std::size_t a = 0; a < 8; ++a)
      for (std::size_t b = a + 1; b < 8; ++b)
        for (std::size_t e = b + 1; e < 8; ++e) {
          const EnergyBreakdown x =
              evaluate_block(c, make_batch_block(full, make_minibatch({a, b, e}, 8)), XCFunctional::LdaX).energy;
          single += x.kinetic + x.external + x.xc;
          pair += x.hartree;
          ++count;
        }
    const double es = std::abs(single / count - (ref.kinetic + ref.external + ref.xc));
    const double ep = std::abs(pair / count - ref.hartree);
    report(7, count == 56 && es <= 1e-12 && ep <= 1e-12,
           fmt("%d subsets  single-term bias %.1e  pair-term bias %.1e", count, es, ep));
  }

  {
    double scf_worst = 0.0;
    for (const Pair& p : pairs) scf_worst = std::max(scf_worst, p.scf.sc_residual);
    const double dh2 = ph2.direct.sc_residual, dhe = phe.direct.sc_residual;
    report(8, scf_worst <= 1e-6 && dh2 <= 5e-3 && dhe <= 5e-3,
           fmt("SCF max %.1e  direct H2 %.1e  He %.1e", scf_worst, dh2, dhe));
  }

  {
    const Problem small = make_problem(h2o, "sto-3g", XCFunctional::LdaX, 2, WhiteningScheme::Pca);
    const Problem large = make_problem(h2o, "sto-3g", XCFunctional::LdaX, 4, WhiteningScheme::Pca);
    const BenchRow ds = bench_direct(small, 1024, 20, 0), dl = bench_direct(large, 1024, 20, 0);
    const BenchRow ss = bench_scf(small, 3), sl = bench_scf(large, 3);
    const double rd = dl.iter_ms / ds.iter_ms, rs = sl.iter_ms / ss.iter_ms;
    report(9, rd <= 1.5 && rs >= 3.0,
           fmt("n %zu -> %zu  direct %.2f -> %.2f ms (x%.2f)  scf %.1f -> %.1f ms (x%.2f)", ds.n, dl.n, ds.iter_ms,
               dl.iter_ms, rd, ss.iter_ms, sl.iter_ms, rs));
  }

  {
    bool ok = true;
    double worst = 0.0;
    for (const Pair& p : pairs)
      for (const ResultRecord* r : {&p.scf, &p.direct}) {
        if (!r->converged) continue;
        const double n = p.name == "H2O" ? 10.0 : 2.0;
        ok = ok && electrons_ok(*r, n);
        worst = std::max(worst, std::abs(r->electrons - n) / n);
      }
    const MLPParams theta = MLPParams::random({3, 9, 9, 9, 1}, 2.0, 0.3, 21);
    Rng rng(10);
    double jac = 0.0;
    const double h = 1e-5;
    for (int t = 0; t < 100; ++t) {
      const Vec3 r = testing::random_point(rng);
      double j[3][3];
      for (int d = 0; d < 3; ++d) {
        Vec3 rp = r, rm = r;
        rp[d] += h;
        rm[d] -= h;
        const Vec3 fp = transform(theta, rp).f, fm = transform(theta, rm).f;
        for (int a = 0; a < 3; ++a) j[a][d] = (fp[a] - fm[a]) / (2.0 * h);
      }
      const double det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                         j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                         j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
      jac = std::max(jac, testing::rel_err(transform(theta, r).det_j, det));
    }
    report(10, ok && jac <= 1e-6, fmt("max |N_grid - N|/N %.1e  det J rel err %.1e", worst, jac));
  }

  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d criteria failed, %.0f s total\n", failures, total);
  return failures == 0 ? 0 : 1;
}
