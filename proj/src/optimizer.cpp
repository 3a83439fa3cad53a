#include "qrdft/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "qrdft/neural.hpp"

namespace qrdft {

Algorithm parse_algorithm(std::string_view name) {
  if (name == "adam") return Algorithm::Adam;
  if (name == "sgd") return Algorithm::Sgd;
  throw InputError("unknown optimizer '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
  if (!(lr0 > 0.0)) throw InputError("learning rate must be positive");
  if (batch_size == 1) throw InputError("batch size must be at least 2");
  if (window < 2) throw InputError("convergence window must be at least 2");
  if (max_epochs < 1) throw InputError("max_epochs must be positive");
  if (!(decay_factor > 0.0)) throw InputError("decay factor must be positive");
}

std::string Trace::to_csv() const {
  std::ostringstream out;
  out.precision(12);
  out << "epoch,step,batch_energy,full_energy,lr,wall_ms\n";
  for (const TraceRecord& r : records) {
    out << r.epoch << ',' << r.step << ',' << r.batch_energy << ',';
    if (r.full_energy) out << *r.full_energy;
    out << ',' << r.lr << ',' << r.wall_ms << '\n';
  }
  return out.str();
}

double lr_schedule(int epoch, const OptimizerConfig& config) {
  double lr = config.lr0;
  for (int e : config.decay_epochs)
    if (epoch >= e) lr *= config.decay_factor;
  return lr;
}

Problem make_problem(Molecule mol, std::string_view basis_name, XCFunctional xc, int grid_level,
                     WhiteningScheme scheme) {
  Problem p;
  p.basis = build_basis(basis_name, mol);
  p.grid = build_molecular_grid(mol, grid_level);
  p.whitening = whitening_matrix(p.basis.overlap, scheme);
  p.full = make_full_block(p.grid, mol, p.basis);
  p.mol = std::move(mol);
  p.xc = xc;
  p.scheme = scheme;
  return p;
}

QuadratureBlock with_params_basis(const OrbitalParams& params, const AOBasis& basis, QuadratureBlock block) {
  if (params.theta) block.ao = tabulate_transformed_ao(*params.theta, basis, block.points);
  return block;
}

EnergyBreakdown params_energy(const OrbitalParams& params, const Problem& problem) {
  const SpinCoefficients c = orthonormal_coefficients(params, problem.whitening);
  if (!params.theta) return total_energy(c, problem.full, problem.mol, problem.xc);
  return total_energy(c, with_params_basis(params, problem.basis, problem.full), problem.mol, problem.xc);
}

namespace {

// Per-point adjoints of ψ and ∇²ψ:
//   a_ik = 2 dρ_i ψ_ik − ½ s w_i ∇²ψ_ik,   b_ik = −½ s w_i ψ_ik.
void orbital_adjoints(const Matrix& psi, const Matrix& lap_psi, std::span<const double> d_rho,
                      const QuadratureBlock& block, Matrix& a, Matrix& b) {
  const std::size_t m = psi.rows(), n = psi.cols();
  a = Matrix(m, n);
  b = Matrix(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const double hw = -0.5 * block.single_scale * block.weights[i];
    for (std::size_t k = 0; k < n; ++k) {
      a(i, k) = 2.0 * d_rho[i] * psi(i, k) + hw * lap_psi(i, k);
      b(i, k) = hw * psi(i, k);
    }
  }
}

Matrix ao_matrix(const std::vector<double>& data, std::size_t m, std::size_t nb) {
  Matrix out(m, nb);
  std::copy(data.begin(), data.end(), out.data().begin());
  return out;
}

}  // namespace

Matrix coefficient_gradient(const Matrix& c, const Matrix& psi, const Matrix& lap_psi, std::span<const double> d_rho,
                            const QuadratureBlock& block) {
  const std::size_t m = block.size(), nb = block.ao.functions;
  if (c.rows() == 0) return Matrix(0, nb);
  Matrix a, b;
  orbital_adjoints(psi, lap_psi, d_rho, block, a, b);
  Matrix g = matmul_tn(a, ao_matrix(block.ao.values, m, nb));
  g += matmul_tn(b, ao_matrix(block.ao.laplacians, m, nb));
  return g;
}

EnergyGradient energy_gradient(const OrbitalParams& params, const Problem& problem, const QuadratureBlock& block,
                               bool with_theta) {
  const Matrix& d = problem.whitening;
  const SpinCoefficients c = orthonormal_coefficients(params, d);
  const BlockEvaluation ev = evaluate_block(c, block, problem.xc);

  EnergyGradient out;
  out.energy = ev.energy.electronic();
  const Matrix ga = coefficient_gradient(c.alpha, ev.psi_alpha, ev.lap_psi_alpha, ev.d_rho_alpha, block);
  const Matrix gb = coefficient_gradient(c.beta, ev.psi_beta, ev.lap_psi_beta, ev.d_rho_beta, block);
  out.grad.w_alpha = coefficient_gradient_to_params(params.w_alpha, d, ga);
  out.grad.w_beta = coefficient_gradient_to_params(params.w_beta, d, gb);

  if (params.theta && with_theta) {
    const MLPParams& theta = *params.theta;
    out.grad.theta.assign(theta.theta.size(), 0.0);
    Matrix aa, ba, ab, bb;
    orbital_adjoints(ev.psi_alpha, ev.lap_psi_alpha, ev.d_rho_alpha, block, aa, ba);
    orbital_adjoints(ev.psi_beta, ev.lap_psi_beta, ev.d_rho_beta, block, ab, bb);
    // AO adjoints: Σ_σ a_σ C_σ for values, Σ_σ b_σ C_σ for Laplacians.
    Matrix value_adj = matmul(aa, c.alpha);
    value_adj += matmul(ab, c.beta);
    Matrix lap_adj = matmul(ba, c.alpha);
    lap_adj += matmul(bb, c.beta);
    ad::Tape tape;
    for (std::size_t i = 0; i < block.size(); ++i)
      transformed_ao_vjp(theta, problem.basis, block.points[i], value_adj.row(i), lap_adj.row(i), out.grad.theta,
                         tape);
  }
  return out;
}

std::vector<double> flatten(const OrbitalParams& params) {
  std::vector<double> flat(params.w_alpha.data().begin(), params.w_alpha.data().end());
  flat.insert(flat.end(), params.w_beta.data().begin(), params.w_beta.data().end());
  if (params.theta) flat.insert(flat.end(), params.theta->theta.begin(), params.theta->theta.end());
  return flat;
}

void unflatten(std::span<const double> flat, OrbitalParams& params) {
  const std::size_t na = params.w_alpha.data().size(), nb = params.w_beta.data().size();
  const std::size_t nt = params.theta ? params.theta->theta.size() : 0;
  if (flat.size() != na + nb + nt) throw InputError("unflatten: size mismatch");
  std::copy_n(flat.begin(), na, params.w_alpha.data().begin());
  std::copy_n(flat.begin() + na, nb, params.w_beta.data().begin());
  if (params.theta) std::copy_n(flat.begin() + na + nb, nt, params.theta->theta.begin());
}

std::vector<double> flatten(const ParamGradient& grad) {
  std::vector<double> flat(grad.w_alpha.data().begin(), grad.w_alpha.data().end());
  flat.insert(flat.end(), grad.w_beta.data().begin(), grad.w_beta.data().end());
  flat.insert(flat.end(), grad.theta.begin(), grad.theta.end());
  return flat;
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad, double lr) {
  if (state.m.size() != params.size() || grad.size() != params.size())
    throw InputError("adam_step: state, params and gradient sizes differ");
  ++state.t;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * grad[k];
    state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * grad[k] * grad[k];
    const double mhat = state.m[k] / c1;
    const double vhat = state.v[k] / c2;
    params[k] -= lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

void sgd_step(std::span<double> params, std::span<const double> grad, double lr) {
  if (grad.size() != params.size()) throw InputError("sgd_step: size mismatch");
  for (std::size_t k = 0; k < params.size(); ++k) params[k] -= lr * grad[k];
}

namespace {

constexpr int kMaxBacktracks = 10;
constexpr double kOverlapTolerance = 1e-3;
constexpr double kKineticTolerance = 1e-3;

// A warp is usable when it does not fold space and the grid still resolves
// the warped basis: the quadrature overlap has to match the analytic one, and
// the Laplacian and gradient forms of the kinetic matrix have to agree.
bool warp_admissible(const MLPParams& theta, const Problem& problem) {
  if (!transform_admissible(theta, problem.grid.points)) return false;
  const std::size_t nb = problem.basis.size;
  Matrix s(nb, nb), t_lap(nb, nb), t_grad(nb, nb);
  for (std::size_t i = 0; i < problem.grid.size(); ++i) {
    const AOValues a = transformed_ao(theta, problem.basis, problem.grid.points[i]);
    const double w = problem.grid.weights[i];
    for (std::size_t mu = 0; mu < nb; ++mu)
      for (std::size_t nu = 0; nu < nb; ++nu) {
        const Vec3& gm = a.gradients[mu];
        const Vec3& gn = a.gradients[nu];
        s(mu, nu) += w * a.values[mu] * a.values[nu];
        t_lap(mu, nu) -= 0.5 * w * a.values[mu] * a.laplacians[nu];
        t_grad(mu, nu) += 0.5 * w * (gm[0] * gn[0] + gm[1] * gn[1] + gm[2] * gn[2]);
      }
  }
  double t_scale = 0.0;
  for (double v : t_grad.data()) t_scale = std::max(t_scale, std::abs(v));
  for (std::size_t mu = 0; mu < nb; ++mu)
    for (std::size_t nu = 0; nu < nb; ++nu) {
      if (!(std::abs(s(mu, nu) - problem.basis.overlap(mu, nu)) <= kOverlapTolerance)) return false;
      if (!(std::abs(t_lap(mu, nu) - t_grad(mu, nu)) <= kKineticTolerance * t_scale)) return false;
    }
  return true;
}

}  // namespace

namespace {

double window_std(const std::vector<double>& e, std::size_t k) {
  const auto first = e.end() - static_cast<std::ptrdiff_t>(k);
  double mean = 0.0;
  for (auto it = first; it != e.end(); ++it) mean += *it;
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (auto it = first; it != e.end(); ++it) var += (*it - mean) * (*it - mean);
  return std::sqrt(var / static_cast<double>(k));
}

}  // namespace

DirectResult run_direct(const Problem& problem, OrbitalParams init, const OptimizerConfig& config) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto elapsed_ms = [&] { return std::chrono::duration<double, std::milli>(Clock::now() - start).count(); };

  const std::size_t n = problem.grid.size();
  const std::size_t m = config.batch_size == 0 ? n : std::min(config.batch_size, n);
  const bool train_theta = init.theta.has_value() && config.train_theta;
  const double e_nuc = nuclear_repulsion(problem.mol);

  DirectResult result;
  result.params = init;
  result.energy = params_energy(init, problem);
  const double e_init = result.energy.total;

  OrbitalParams params = std::move(init);
  std::vector<double> flat = flatten(params);
  AdamState adam(flat.size());
  Rng rng(config.seed);
  std::vector<double> history;
  long step = 0;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double lr = lr_schedule(epoch, config);
    const std::vector<Minibatch> batches = epoch_batches(n, m, rng);
    double last_batch = 0.0;
    for (const Minibatch& batch : batches) {
      QuadratureBlock block = make_batch_block(problem.full, batch);
      if (params.theta) block = with_params_basis(params, problem.basis, std::move(block));
      const EnergyGradient eg = energy_gradient(params, problem, block, train_theta);
      std::vector<double> g = flatten(eg.grad);
      // A frozen network still occupies its slots in the flat vector.
      if (params.theta && !train_theta) g.resize(flat.size(), 0.0);
      const std::vector<double> flat_before = flat;
      const AdamState adam_before = adam;
      double step_lr = lr;
      for (int attempt = 0;; ++attempt) {
        if (config.algorithm == Algorithm::Adam)
          adam_step(adam, flat, g, step_lr);
        else
          sgd_step(flat, g, step_lr);
        unflatten(flat, params);
        if (!params.theta || !train_theta || warp_admissible(*params.theta, problem)) break;
        // The warp folded over or outran the grid: back off, and skip the step if that keeps failing.
        flat = flat_before;
        adam = adam_before;
        unflatten(flat, params);
        if (attempt == kMaxBacktracks) break;
        step_lr *= 0.5;
      }
      last_batch = eg.energy + e_nuc;
      if (step + 1 < static_cast<long>(batches.size()) * (epoch + 1))
        result.trace.records.push_back({epoch, step, last_batch, std::nullopt, lr, elapsed_ms()});
      ++step;
    }

    const EnergyBreakdown e = params_energy(params, problem);
    result.trace.records.push_back({epoch, step - 1, last_batch, e.total, lr, elapsed_ms()});
    result.epochs = epoch + 1;
    if (!std::isfinite(e.total) || std::abs(e.total) > 10.0 * std::abs(e_init)) {
      result.diverged = true;
      break;
    }
    if (e.total < result.energy.total) {
      result.energy = e;
      result.params = params;
    }
    history.push_back(e.total);
    if (history.size() >= static_cast<std::size_t>(config.window) &&
        window_std(history, static_cast<std::size_t>(config.window)) < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace qrdft
