#pragma once

// The tau = 0 slice of rotating Nariai: horizon radius, area, omega and the
// area bound 4 pi / (Lambda + omega). Lengths are in units of ell unless an
// explicit ell is passed; Lambda = 3 / ell^2, eps = a / ell.

#include <vector>

#include "mots/common.hpp"

namespace mots::nariai {

inline constexpr int kDefaultQuadN = 512;

/// (2 - sqrt 3) ell, where the discriminant of r_c^2 vanishes.
double a_max(double ell = 1.0);

/// Larger double root r_c^2; DomainError unless 0 <= a < a_max(ell).
double rc_squared(double a, double ell = 1.0);

/// A = 4 pi (r_c^2 + a^2) / (1 + a^2 / ell^2).
double area_sigma(double a, double ell = 1.0);

/// Gauss-Legendre quadrature of the simplified omega integral.
double omega_nariai(double a, double ell = 1.0, int quad_n = kDefaultQuadN);

/// (1 / |Sigma|) * integral of |X^{d_phi}|^2 dA, from the closed-form
/// integrand and area element.
double omega_definitional(double a, double ell = 1.0, int quad_n = kDefaultQuadN);

struct NariaiReport {
  double a, ell, eps, Lambda;
  double rc2;
  double area;
  double omega;
  double omega_definitional;
  double bound;  // 4 pi / (Lambda + omega)
  double gap;    // bound - area
  double refinement_delta;  // |omega(2 quad_n) - omega(quad_n)|
  int quad_n;
};

NariaiReport nariai_point(double a, double ell = 1.0, int quad_n = kDefaultQuadN);

struct EpsExpansion {
  double eps;
  bool in_window;  // eps <= 0.15
  double rc2, rc2_trunc;  // ell^2 / 3 (1 - 4 eps^2)
  double a2_over_rc2, a2_over_rc2_trunc;  // 3 eps^2
  double omega, omega_trunc;  // (2/3) (a^2 / r_c^4) (1 - 8 eps^2 / 5)
  double area, bound;
  double common_trunc;        // 4 pi r_c^2 (1 + 2 eps^2), shared by area and bound
  double rc2_eps4_coefficient;  // c in 3 r_c^2 / ell^2 = 1 - 4 eps^2 + c eps^4 + ...
};

EpsExpansion eps_expansion(double a, double ell = 1.0, int quad_n = kDefaultQuadN);

struct SweepRow {
  double a_over_ell, rc2, area, omega, bound, gap, gap_over_eps4;
};

/// One row per a value, in input order.
std::vector<SweepRow> sweep(const std::vector<double>& a_values, double ell = 1.0,
                            int quad_n = kDefaultQuadN, Execution exec = Execution::parallel);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mots::nariai
