#include "qrdft/xc.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <numbers>

#include "qrdft/chem.hpp"

namespace qrdft {

namespace {

constexpr double kDensityFloor = 1e-30;

struct VwnParams {
  double a, x0, b, c;
};

// Ceperley-Alder fits: paramagnetic, ferromagnetic, spin stiffness.
constexpr VwnParams kPara{0.0310907, -0.10498, 3.72744, 12.9352};
constexpr VwnParams kFerro{0.01554535, -0.32500, 7.06042, 18.0578};
constexpr VwnParams kStiff{-1.0 / (6.0 * std::numbers::pi * std::numbers::pi), -0.0047584, 1.13107, 13.0045};

// ε(x) and dε/dx with x = sqrt(rs).
std::pair<double, double> vwn_branch(const VwnParams& p, double x) {
  const double xx = x * x + p.b * x + p.c;
  const double xx0 = p.x0 * p.x0 + p.b * p.x0 + p.c;
  const double q = std::sqrt(4.0 * p.c - p.b * p.b);
  const double at = std::atan(q / (2.0 * x + p.b));
  const double k = p.b * p.x0 / xx0;
  const double eps = p.a * (std::log(x * x / xx) + 2.0 * p.b / q * at -
                            k * (std::log((x - p.x0) * (x - p.x0) / xx) + 2.0 * (p.b + 2.0 * p.x0) / q * at));
  const double dxx = 2.0 * x + p.b;
  // d/dx atan(q / (2x + b)) = -q / (2 X(x))
  const double datan = -q / (2.0 * xx);
  const double deps = p.a * (2.0 / x - dxx / xx + 2.0 * p.b / q * datan -
                             k * (2.0 / (x - p.x0) - dxx / xx + 2.0 * (p.b + 2.0 * p.x0) / q * datan));
  return {eps, deps};
}

}  // namespace

XCFunctional parse_xc(std::string_view name) {
  if (name == "lda_x" || name == "lda" || name == "lsda") return XCFunctional::LdaX;
  if (name == "lda_x_vwn" || name == "svwn") return XCFunctional::LdaXVwn;
  throw InputError("unknown exchange-correlation functional '" + std::string(name) + "'");
}

std::string to_string(XCFunctional xc) { return xc == XCFunctional::LdaX ? "lda_x" : "lda_x_vwn"; }

VwnPoint vwn5_correlation(double rs, double zeta) {
  const double x = std::sqrt(rs);
  const auto [ep, dep] = vwn_branch(kPara, x);
  const auto [ef, def] = vwn_branch(kFerro, x);
  const auto [ac, dac] = vwn_branch(kStiff, x);

  const double denom = std::pow(2.0, 4.0 / 3.0) - 2.0;
  const double fpp0 = 8.0 / (9.0 * denom);
  const double opz = 1.0 + zeta, omz = 1.0 - zeta;
  const double f = (std::pow(opz, 4.0 / 3.0) + std::pow(omz, 4.0 / 3.0) - 2.0) / denom;
  const double df = 4.0 / 3.0 * (std::cbrt(opz) - std::cbrt(omz)) / denom;
  const double z3 = zeta * zeta * zeta, z4 = z3 * zeta;

  VwnPoint out;
  out.eps = ep + ac * f / fpp0 * (1.0 - z4) + (ef - ep) * f * z4;
  const double deps_dx = dep + dac * f / fpp0 * (1.0 - z4) + (def - dep) * f * z4;
  out.d_rs = deps_dx / (2.0 * x);
  out.d_zeta = ac / fpp0 * (df * (1.0 - z4) - 4.0 * z3 * f) + (ef - ep) * (df * z4 + 4.0 * z3 * f);
  return out;
}

XCPoint lda_xc(double rho_alpha, double rho_beta, XCFunctional xc) {
  if (rho_alpha < 0.0 || rho_beta < 0.0) throw InputError("negative density passed to the XC functional");
  XCPoint out;
  // Spin-scaled exchange: E_x[ρα, ρβ] = ½ (E_x[2ρα] + E_x[2ρβ]).
  const double cx = 0.75 * std::cbrt(6.0 / std::numbers::pi);
  const double ca = std::cbrt(rho_alpha), cb = std::cbrt(rho_beta);
  out.energy = -cx * (rho_alpha * ca + rho_beta * cb);
  out.v_alpha = -4.0 / 3.0 * cx * ca;
  out.v_beta = -4.0 / 3.0 * cx * cb;

  const double rho = rho_alpha + rho_beta;
  if (xc == XCFunctional::LdaXVwn && rho > kDensityFloor) {
    const double rs = std::cbrt(3.0 / (4.0 * std::numbers::pi * rho));
    const double zeta = std::clamp((rho_alpha - rho_beta) / rho, -1.0, 1.0);
    const VwnPoint c = vwn5_correlation(rs, zeta);
    out.energy += rho * c.eps;
    const double common = c.eps - rs / 3.0 * c.d_rs;
    out.v_alpha += common + (1.0 - zeta) * c.d_zeta;
    out.v_beta += common - (1.0 + zeta) * c.d_zeta;
  }
  return out;
}

}  // namespace qrdft
