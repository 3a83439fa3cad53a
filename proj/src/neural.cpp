#include "qrdft/neural.hpp"

#include <random>
#include <string>

#include "qrdft/quadrature.hpp"

namespace qrdft {

std::size_t MLPParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l)
    n += static_cast<std::size_t>(layers[l]) * layers[l + 1] + layers[l + 1];
  return n;
}

void MLPParams::validate() const {
  if (layers.size() < 2 || layers.front() != 3 || layers.back() != 1)
    throw NeuralError("network must map R^3 to R");
  for (int w : layers)
    if (w <= 0) throw NeuralError("layer widths must be positive");
  if (!(alpha > 0.0)) throw NeuralError("alpha must be positive");
  if (theta.size() != parameter_count())
    throw NeuralError("theta has " + std::to_string(theta.size()) + " entries, expected " +
                      std::to_string(parameter_count()));
  for (double v : theta)
    if (!std::isfinite(v)) throw NeuralError("theta contains non-finite values");
}

MLPParams MLPParams::identity_init(std::vector<int> layers, double alpha, std::uint64_t seed) {
  MLPParams p;
  p.layers = std::move(layers);
  p.alpha = alpha;
  p.theta.assign(p.parameter_count(), 0.0);
  Rng rng(seed);
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 2 < p.layers.size(); ++l) {
    const int in = p.layers[l], out = p.layers[l + 1];
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(in)));
    for (int k = 0; k < in * out; ++k) p.theta[offset + k] = normal(rng);
    offset += static_cast<std::size_t>(in) * out + out;
  }
  p.validate();
  return p;
}

MLPParams MLPParams::random(std::vector<int> layers, double alpha, double scale, std::uint64_t seed) {
  MLPParams p;
  p.layers = std::move(layers);
  p.alpha = alpha;
  p.theta.resize(p.parameter_count());
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  for (double& v : p.theta) v = normal(rng);
  p.validate();
  return p;
}

MLPOutput mlp_eval(const MLPParams& params, const Vec3& r) {
  const auto jet = detail::mlp_jet<double>(params.layers, std::span<const double>(params.theta), r);
  return {jet.v, jet.g};
}

LocalScale local_scale(const MLPParams& params, const Vec3& r) {
  const auto jet = detail::scaled_sigmoid_jet(
      detail::mlp_jet<double>(params.layers, std::span<const double>(params.theta), r), params.alpha);
  return {jet.v, jet.g};
}

Warp transform(const MLPParams& params, const Vec3& r) {
  const auto w = detail::warp_jet<double>(params.layers, std::span<const double>(params.theta), params.alpha, r);
  if (!(w.det_j.v > 0.0)) throw NeuralError("local scaling transform has non-positive Jacobian determinant");
  return {w.u, w.det_j.v};
}

bool transform_admissible(const MLPParams& params, std::span<const Vec3> points) {
  for (const Vec3& r : points) {
    const auto w = detail::warp_jet<double>(params.layers, std::span<const double>(params.theta), params.alpha, r);
    if (!(w.det_j.v > 0.0)) return false;
  }
  return true;
}

AOValues transformed_ao(const MLPParams& params, const AOBasis& basis, const Vec3& r) {
  AOValues out;
  out.values.resize(basis.size);
  out.laplacians.resize(basis.size);
  out.gradients.resize(basis.size);
  detail::transformed_ao_kernel<double>(params.layers, std::span<const double>(params.theta), params.alpha, basis,
                                        r, out.values.data(), out.laplacians.data(), out.gradients.data()->data());
  return out;
}

AOTable tabulate_transformed_ao(const MLPParams& params, const AOBasis& basis, std::span<const Vec3> points) {
  const std::size_t b = basis.size;
  AOTable t;
  t.points = points.size();
  t.functions = b;
  t.values.resize(points.size() * b);
  t.laplacians.resize(points.size() * b);
  for (std::size_t i = 0; i < points.size(); ++i)
    detail::transformed_ao_kernel<double>(params.layers, std::span<const double>(params.theta), params.alpha,
                                          basis, points[i], &t.values[i * b], &t.laplacians[i * b]);
  return t;
}

void transformed_ao_vjp(const MLPParams& params, const AOBasis& basis, const Vec3& r,
                        std::span<const double> value_adj, std::span<const double> lap_adj, std::span<double> grad,
                        ad::Tape& tape) {
  const std::size_t b = basis.size, np = params.theta.size();
  if (value_adj.size() != b || lap_adj.size() != b || grad.size() != np)
    throw NeuralError("transformed_ao_vjp: size mismatch");
  tape.clear();
  ad::TapeScope scope(tape);
  std::vector<ad::Var> theta(np);
  for (std::size_t k = 0; k < np; ++k) theta[k] = ad::Var::make_leaf(params.theta[k]);
  std::vector<ad::Var> values(b), laps(b);
  detail::transformed_ao_kernel<ad::Var>(params.layers, std::span<const ad::Var>(theta), params.alpha, basis, r,
                                         values.data(), laps.data());
  ad::Var s(0.0);
  for (std::size_t mu = 0; mu < b; ++mu) {
    if (value_adj[mu] != 0.0) s = s + value_adj[mu] * values[mu];
    if (lap_adj[mu] != 0.0) s = s + lap_adj[mu] * laps[mu];
  }
  std::vector<double> adjoint;
  tape.backward(s.id(), adjoint);
  if (s.is_constant()) return;
  for (std::size_t k = 0; k < np; ++k) grad[k] += adjoint[theta[k].id()];
}

}  // namespace qrdft
