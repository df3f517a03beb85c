#pragma once

// The MOTS stability operator on an axisymmetric sphere
//
//   L u = -Lap u + 2 <X, grad u> + (Q - |X|^2 + div X) u,
//
// its formal adjoint L* and the symmetrized operator -Lap + Q, reduced to
// azimuthal Fourier modes u(theta) e^{i m phi}.
//
// Discretization is finite-volume on the midpoint grid. The surface metric
// P^2 dtheta^2 + R^2 dphi^2 enters through cell weights W_j = P_j R_j h and
// face coefficients R/P; pole faces have R = 0, so the m = 0 block carries a
// natural zero-flux condition and m >= 1 blocks are damped by m^2/R^2. The
// first-order term uses averaged face fluxes c = P R X^theta, which makes the
// assembled adjoint exactly W^-1 L^T W.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "mots/common.hpp"
#include "mots/geomcore.hpp"
#include "mots/initdata.hpp"

namespace mots::stab {

/// Metric coefficients of P^2 dtheta^2 + R^2 dphi^2 at nodes and faces.
struct AxisymmetricSurface {
  Field P, R;            // nodes
  Field P_face, R_face;  // n + 1 faces; R_face vanishes at both poles

  static AxisymmetricSurface from_profile(const geom::MetricProfile& m, const geom::ThetaGrid& grid);
  /// The level set {t} x S^2 of product or warped data.
  static AxisymmetricSurface from_slice(const init::ProductData& d, double t,
                                        const geom::ThetaGrid& grid);
};

struct StabilityProblem {
  geom::ThetaGrid grid;
  AxisymmetricSurface surface;
  Field Q;
  Field X_theta;  // coordinate components of X
  Field X_phi;
  int m_max = 0;

  /// Coefficients on a metric profile; X_theta and X_phi default to zero.
  static StabilityProblem on_profile(const geom::MetricProfile& m, const geom::ThetaGrid& grid,
                                     Field Q, Field X_theta = {}, Field X_phi = {}, int m_max = 0);
  /// Q = kappa - (mu + J(nu)) - |chi+|^2 / 2 and X of the slice {t} in d.
  static StabilityProblem from_slice(const init::ProductData& d, double t,
                                     const geom::ThetaGrid& grid, int m_max = 0);

  /// Throws UsageError on size mismatch, DomainError on non-finite Q or X.
  void validate() const;

  Field cell_weights() const;  // W_j
  Field face_flux() const;     // c_k = P R X^theta at faces, zero at the poles
  Field div_X() const;         // (c_{j+1} - c_j) / W_j
  Field X_norm2() const;       // P^2 Xth^2 + R^2 Xph^2
  Field X_eta_norm2() const;   // R^2 Xph^2
};

/// Dense matrix of L restricted to mode m (complex for m >= 1).
Eigen::MatrixXcd assemble_mode(const StabilityProblem& p, int m);
/// Real m = 0 block of L.
Eigen::MatrixXd assemble_axisymmetric(const StabilityProblem& p);
/// m = 0 block of L*.
Eigen::MatrixXd assemble_adjoint(const StabilityProblem& p);
/// m = 0 block of -Lap + Q.
Eigen::MatrixXd assemble_symmetrized(const StabilityProblem& p);

/// -Lap_h u on the m = 0 block.
Field laplacian_times(const StabilityProblem& p, const Field& u);
/// Discrete Dirichlet energy 2 pi sum_faces (R/P) (du)^2 / h.
double dirichlet_energy(const StabilityProblem& p, const Field& u);
/// 2 pi sum_j W_j a_j b_j.
double weighted_integral(const StabilityProblem& p, const Field& a, const Field& b);

struct EigenOptions {
  double spectral_tol_rel = 1e-7;  // spectral_tol = rel * max(1, |lambda1|)
  Execution exec = Execution::parallel;
};

struct EigenResult {
  double lambda1 = 0.0;
  Field u;  // principal eigenfunction, max = 1, positive
  std::vector<double> per_mode_min_re;
  double lambda1_adjoint = 0.0;
  double lambda1_symmetrized = 0.0;
  double spectral_tol = 0.0;
  double lemma1_margin = 0.0;  // min_{m >= 1} per_mode_min_re[m] - lambda1
  bool near_degenerate = false;
  int n = 0;
  int m_max = 0;
};

/// Smallest real part of the spectrum of one mode block.
double min_real_eigenvalue(const StabilityProblem& p, int m);

EigenResult principal_eigenpair(const StabilityProblem& p, const EigenOptions& opts = {});

struct InequalityRow {
  double lhs;  // int |X^eta|^2 f^2
  double rhs;  // int |grad f|^2 + Q f^2
  double margin;
  bool passed;
};

struct InequalityReport {
  double lambda1;
  double tol;
  std::vector<InequalityRow> rows;
  bool all_passed;
};

/// Rejects unstable problems (lambda1 < -spectral_tol) with DomainError.
InequalityReport stability_inequality_check(const StabilityProblem& p,
                                            const std::vector<Field>& trial_fns,
                                            double ineq_tol_rel = 1e-8);

struct FirstVariationReport {
  std::vector<double> steps;
  std::vector<double> raw_errors;           // per step
  std::vector<double> extrapolated_errors;  // Richardson, one fewer entry
  double error = 0.0;                       // last extrapolated error
  double rhs_norm = 0.0;
  bool relative = true;  // false when the predicted variation vanishes
  bool monotone = true;  // raw errors decrease with the step
};

/// Checks d/dh theta+(t0 + h phi) = L phi + (tau theta+ - theta+^2 / 2) phi on
/// the slice {t0}, with phi = sum_k phi_coeffs[k] cos(k theta). The right-hand
/// side uses exact derivatives of phi.
FirstVariationReport first_variation_check(const init::ProductData& d, double t0,
                                           const std::vector<double>& phi_coeffs,
                                           const geom::ThetaGrid& grid,
                                           std::vector<double> steps = {1e-3, 5e-4, 2.5e-4});

}  // namespace mots::stab
