#pragma once

#include <cmath>
#include <random>
#include <string>

#include "qrdft/chem.hpp"
#include "qrdft/linalg.hpp"
#include "qrdft/quadrature.hpp"

namespace testing {

inline qrdft::Molecule h2() { return qrdft::parse_xyz("2\ncharge=0 mult=1\nH 0 0 0\nH 0 0 0.7414\n"); }
inline qrdft::Molecule he() { return qrdft::parse_xyz("1\ncharge=0 mult=1\nHe 0 0 0\n"); }
inline qrdft::Molecule h2o() {
  return qrdft::parse_xyz("3\nwater\nO 0 0 0.1173\nH 0 0.7572 -0.4692\nH 0 -0.7572 -0.4692\n");
}

inline qrdft::Matrix random_matrix(std::size_t r, std::size_t c, qrdft::Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  qrdft::Matrix m(r, c);
  for (double& v : m.data()) v = normal(rng);
  return m;
}

inline qrdft::Matrix random_spd(std::size_t n, qrdft::Rng& rng) {
  const qrdft::Matrix a = random_matrix(n, n, rng);
  qrdft::Matrix s = qrdft::matmul_nt(a, a);
  for (std::size_t i = 0; i < n; ++i) s(i, i) += static_cast<double>(n);
  return s;
}

inline qrdft::Vec3 random_point(qrdft::Rng& rng, double scale = 1.5) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

inline double rel_err(double a, double b, double floor = 1e-8) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace testing
