#pragma once

#include <string>
#include <string_view>

namespace qrdft {

enum class XCFunctional {
  LdaX,     // spin-scaled Slater exchange
  LdaXVwn,  // Slater exchange + VWN5 correlation
};

XCFunctional parse_xc(std::string_view name);
std::string to_string(XCFunctional xc);

/// Energy density (per volume) and spin potentials at one point.
struct XCPoint {
  double energy = 0.0;
  double v_alpha = 0.0;
  double v_beta = 0.0;
};

/// Throws InputError for negative densities.
XCPoint lda_xc(double rho_alpha, double rho_beta, XCFunctional xc);

/// VWN5 correlation energy per electron and its derivatives with respect
/// to rs and ζ.
struct VwnPoint {
  double eps = 0.0;
  double d_rs = 0.0;
  double d_zeta = 0.0;
};
VwnPoint vwn5_correlation(double rs, double zeta);

}  // namespace qrdft
