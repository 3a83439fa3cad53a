#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qrdft/autodiff.hpp"
#include "qrdft/orbitals.hpp"

namespace qrdft {

class NeuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fully connected tanh network R³ → R with a linear output layer.
/// `theta` stores, per layer, the out × in weight block (row-major)
/// followed by the out biases.
struct MLPParams {
  std::vector<int> layers{3, 9, 9, 9, 1};
  std::vector<double> theta;
  double alpha = 2.0;

  std::size_t parameter_count() const;
  void validate() const;

  /// Random hidden layers, zero output layer: g ≡ 0 and λ ≡ alpha / 2.
  static MLPParams identity_init(std::vector<int> layers = {3, 9, 9, 9, 1}, double alpha = 2.0,
                                 std::uint64_t seed = 0);
  /// Every parameter drawn from N(0, scale²).
  static MLPParams random(std::vector<int> layers, double alpha, double scale, std::uint64_t seed);
};

struct MLPOutput {
  double g = 0.0;
  Vec3 grad{};
};

MLPOutput mlp_eval(const MLPParams& params, const Vec3& r);

struct LocalScale {
  double lambda = 0.0;
  Vec3 grad{};
};

/// λ = alpha · sigmoid(g(r)).
LocalScale local_scale(const MLPParams& params, const Vec3& r);

struct Warp {
  Vec3 f{};
  double det_j = 0.0;
};

/// f(r) = λ(r) r with det J = λ²(λ + r·∇λ); throws NeuralError if det J <= 0.
Warp transform(const MLPParams& params, const Vec3& r);

/// True when det J > 0 at every point.
bool transform_admissible(const MLPParams& params, std::span<const Vec3> points);

/// Values, Laplacians and gradients of √det J · φ(f(r)) at `r`.
AOValues transformed_ao(const MLPParams& params, const AOBasis& basis, const Vec3& r);

AOTable tabulate_transformed_ao(const MLPParams& params, const AOBasis& basis, std::span<const Vec3> points);

/// Adds ∂/∂θ Σ_μ (value_adj[μ] φ̃_μ(r) + lap_adj[μ] ∇²φ̃_μ(r)) to `grad`.
void transformed_ao_vjp(const MLPParams& params, const AOBasis& basis, const Vec3& r,
                        std::span<const double> value_adj, std::span<const double> lap_adj, std::span<double> grad,
                        ad::Tape& tape);

namespace detail {

inline constexpr int hidx(int i, int j) {
  constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return table[i][j];
}

/// Value, gradient, packed Hessian, and gradient of the Laplacian of a
/// scalar field, propagated forward through the network.
template <class T>
struct LapJet {
  T v{};
  std::array<T, 3> g{};
  std::array<T, 6> h{};
  std::array<T, 3> gl{};

  T laplacian() const { return h[0] + h[3] + h[5]; }
};

/// y = f(z) given f and its first three derivatives at z.v.
template <class T>
LapJet<T> compose(const LapJet<T>& z, const T& f0, const T& f1, const T& f2, const T& f3) {
  LapJet<T> y;
  y.v = f0;
  for (int i = 0; i < 3; ++i) y.g[i] = f1 * z.g[i];
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) y.h[hidx(i, j)] = f1 * z.h[hidx(i, j)] + f2 * z.g[i] * z.g[j];
  const T lap = z.laplacian();
  const T grad2 = z.g[0] * z.g[0] + z.g[1] * z.g[1] + z.g[2] * z.g[2];
  for (int k = 0; k < 3; ++k) {
    T hg = z.h[hidx(0, k)] * z.g[0] + z.h[hidx(1, k)] * z.g[1] + z.h[hidx(2, k)] * z.g[2];
    y.gl[k] = f1 * z.gl[k] + f2 * (lap * z.g[k] + 2.0 * hg) + f3 * grad2 * z.g[k];
  }
  return y;
}

template <class T>
LapJet<T> tanh_jet(const LapJet<T>& z) {
  using std::tanh;
  const T t = tanh(z.v);
  const T f1 = 1.0 - t * t;
  const T f2 = -2.0 * t * f1;
  const T f3 = -2.0 * f1 * f1 + 4.0 * t * t * f1;
  return compose(z, t, f1, f2, f3);
}

template <class T>
LapJet<T> scaled_sigmoid_jet(const LapJet<T>& z, double alpha) {
  using std::exp;
  const T s = 1.0 / (1.0 + exp(-z.v));
  const T f1 = s * (1.0 - s);
  const T f2 = f1 * (1.0 - 2.0 * s);
  const T f3 = f2 * (1.0 - 2.0 * s) - 2.0 * f1 * f1;
  return compose(z, alpha * s, alpha * f1, alpha * f2, alpha * f3);
}

/// Network output g(r) as a jet in r.
template <class T>
LapJet<T> mlp_jet(std::span<const int> layers, std::span<const T> theta, const Vec3& r) {
  std::vector<LapJet<T>> act(3);
  for (int k = 0; k < 3; ++k) {
    act[k].v = T(r[k]);
    act[k].g[k] = T(1.0);
  }
  std::size_t offset = 0;
  const std::size_t n_layers = layers.size() - 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int in = layers[l], out = layers[l + 1];
    std::vector<LapJet<T>> next(out);
    const T* w = theta.data() + offset;
    const T* b = w + static_cast<std::size_t>(in) * out;
    for (int j = 0; j < out; ++j) {
      LapJet<T> z;
      z.v = b[j];
      for (int k = 0; k < in; ++k) {
        const T& wjk = w[j * in + k];
        const LapJet<T>& x = act[k];
        z.v = z.v + wjk * x.v;
        // Inputs of the first layer are bare coordinates: only the gradient is nonzero.
        if (l == 0) {
          z.g[k] = wjk;
          continue;
        }
        for (int c = 0; c < 3; ++c) z.g[c] = z.g[c] + wjk * x.g[c];
        for (int c = 0; c < 6; ++c) z.h[c] = z.h[c] + wjk * x.h[c];
        for (int c = 0; c < 3; ++c) z.gl[c] = z.gl[c] + wjk * x.gl[c];
      }
      next[j] = (l + 1 < n_layers) ? tanh_jet(z) : z;
    }
    act = std::move(next);
    offset += static_cast<std::size_t>(in) * out + out;
  }
  return act[0];
}

/// Value, gradient, and Laplacian of a scalar field.
template <class T>
struct Triple {
  T v{};
  std::array<T, 3> g{};
  T lap{};
};

template <class T>
Triple<T> operator*(const Triple<T>& a, const Triple<T>& b) {
  Triple<T> c;
  c.v = a.v * b.v;
  T dot = T(0.0);
  for (int i = 0; i < 3; ++i) {
    c.g[i] = a.v * b.g[i] + b.v * a.g[i];
    dot = dot + a.g[i] * b.g[i];
  }
  c.lap = a.v * b.lap + b.v * a.lap + 2.0 * dot;
  return c;
}

template <class T>
Triple<T> operator+(const Triple<T>& a, const Triple<T>& b) {
  Triple<T> c;
  c.v = a.v + b.v;
  for (int i = 0; i < 3; ++i) c.g[i] = a.g[i] + b.g[i];
  c.lap = a.lap + b.lap;
  return c;
}

/// Quantities of the local-scaling warp at one point.
template <class T>
struct WarpJet {
  LapJet<T> lambda;
  Triple<T> det_j;
  Triple<T> sqrt_det_j;
  std::array<T, 3> u{};  // f(r)
};

template <class T>
WarpJet<T> warp_jet(std::span<const int> layers, std::span<const T> theta, double alpha, const Vec3& r) {
  using std::sqrt;
  WarpJet<T> w;
  w.lambda = scaled_sigmoid_jet(mlp_jet<T>(layers, theta, r), alpha);
  const LapJet<T>& lam = w.lambda;

  Triple<T> l3{lam.v, lam.g, lam.laplacian()};
  Triple<T> q;
  q.v = r[0] * lam.g[0] + r[1] * lam.g[1] + r[2] * lam.g[2];
  for (int k = 0; k < 3; ++k)
    q.g[k] = lam.g[k] + r[0] * lam.h[hidx(0, k)] + r[1] * lam.h[hidx(1, k)] + r[2] * lam.h[hidx(2, k)];
  q.lap = 2.0 * l3.lap + (r[0] * lam.gl[0] + r[1] * lam.gl[1] + r[2] * lam.gl[2]);

  const Triple<T> l2 = l3 * l3;
  w.det_j = l2 * l3 + l2 * q;

  const T s = sqrt(w.det_j.v);
  const T s1 = 0.5 / s;
  const T s2 = -0.25 / (s * s * s);
  T grad2 = T(0.0);
  for (int i = 0; i < 3; ++i) grad2 = grad2 + w.det_j.g[i] * w.det_j.g[i];
  w.sqrt_det_j.v = s;
  for (int i = 0; i < 3; ++i) w.sqrt_det_j.g[i] = s1 * w.det_j.g[i];
  w.sqrt_det_j.lap = s1 * w.det_j.lap + s2 * grad2;

  for (int k = 0; k < 3; ++k) w.u[k] = lam.v * r[k];
  return w;
}

/// Warped basis values and Laplacians at `r`; writes B entries to each output.
template <class T>
void transformed_ao_kernel(std::span<const int> layers, std::span<const T> theta, double alpha,
                           const AOBasis& basis, const Vec3& r, T* values, T* laps, T* grads = nullptr) {
  const WarpJet<T> w = warp_jet<T>(layers, theta, alpha, r);
  if (!(ad::value_of(w.det_j.v) > 0.0))
    throw NeuralError("local scaling transform has non-positive Jacobian determinant");
  const std::size_t nb = basis.size;
  std::vector<T> val(nb), grad(3 * nb), hess(6 * nb);
  eval_ao_kernel<T>(basis, w.u.data(), AOOrder::Hessians, val.data(), grad.data(), hess.data());

  const LapJet<T>& lam = w.lambda;
  const T lap_lambda = lam.laplacian();
  const T grad_lambda2 = lam.g[0] * lam.g[0] + lam.g[1] * lam.g[1] + lam.g[2] * lam.g[2];
  const Triple<T>& s = w.sqrt_det_j;

  for (std::size_t mu = 0; mu < nb; ++mu) {
    const T* gp = &grad[3 * mu];
    const T* hp = &hess[6 * mu];
    const T phi_dot_r = gp[0] * r[0] + gp[1] * r[1] + gp[2] * r[2];
    const T phi_dot_gl = gp[0] * lam.g[0] + gp[1] * lam.g[1] + gp[2] * lam.g[2];

    // ∇[φ(u)]_k = λ φ_k + (∇φ·r) ∂_kλ
    std::array<T, 3> grad_comp;
    for (int k = 0; k < 3; ++k) grad_comp[k] = lam.v * gp[k] + phi_dot_r * lam.g[k];

    T r_h_gl = T(0.0), r_h_r = T(0.0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        r_h_gl = r_h_gl + r[a] * hp[detail::hidx(a, b)] * lam.g[b];
        r_h_r = r_h_r + r[a] * hp[detail::hidx(a, b)] * r[b];
      }
    const T lap_comp = lam.v * lam.v * hessian_trace(hp) + 2.0 * lam.v * r_h_gl + grad_lambda2 * r_h_r +
                       2.0 * phi_dot_gl + phi_dot_r * lap_lambda;

    values[mu] = s.v * val[mu];
    laps[mu] = s.lap * val[mu] + 2.0 * (s.g[0] * grad_comp[0] + s.g[1] * grad_comp[1] + s.g[2] * grad_comp[2]) +
               s.v * lap_comp;
    if (grads)
      for (int k = 0; k < 3; ++k) grads[3 * mu + k] = s.g[k] * val[mu] + s.v * grad_comp[k];
  }
}

}  // namespace detail

}  // namespace qrdft
