#include "mots/stability.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "mots/errors.hpp"

namespace mots::stab {

namespace {

std::size_t idx(int j) { return static_cast<std::size_t>(j); }

template <class F>
AxisymmetricSurface sample_surface(const geom::ThetaGrid& grid, F&& coeffs) {
  const int n = grid.size();
  AxisymmetricSurface s;
  s.P.resize(idx(n));
  s.R.resize(idx(n));
  s.P_face.resize(idx(n + 1));
  s.R_face.resize(idx(n + 1));
  for (int j = 0; j < n; ++j) {
    const auto [P, R] = coeffs(grid.node(j));
    s.P[idx(j)] = P;
    s.R[idx(j)] = R;
  }
  for (int k = 0; k <= n; ++k) {
    if (k == 0 || k == n) {
      s.P_face[idx(k)] = coeffs(k == 0 ? grid.node(0) : grid.node(n - 1)).first;
      s.R_face[idx(k)] = 0.0;
    } else {
      const auto [P, R] = coeffs(grid.face(k));
      s.P_face[idx(k)] = P;
      s.R_face[idx(k)] = R;
    }
  }
  return s;
}

int sign_changes(const Eigen::VectorXd& v) {
  int count = 0;
  int last = 0;
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) <= 1e-12 * scale) continue;
    const int s = v[i] > 0 ? 1 : -1;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

}  // namespace

AxisymmetricSurface AxisymmetricSurface::from_profile(const geom::MetricProfile& m,
                                                      const geom::ThetaGrid& grid) {
  const double r = m.scale();
  return sample_surface(grid, [&](double th) { return std::pair{r, r * m.shape(th).rho}; });
}

AxisymmetricSurface AxisymmetricSurface::from_slice(const init::ProductData& d, double t,
                                                    const geom::ThetaGrid& grid) {
  return sample_surface(grid, [&](double th) {
    const init::AmbientPoint<double> A = init::ambient(d, t, th);
    return std::pair{std::sqrt(A.a), std::sqrt(A.b)};
  });
}

StabilityProblem StabilityProblem::on_profile(const geom::MetricProfile& m,
                                              const geom::ThetaGrid& grid, Field Q, Field X_theta,
                                              Field X_phi, int m_max) {
  const auto n = idx(grid.size());
  if (X_theta.empty()) X_theta.assign(n, 0.0);
  if (X_phi.empty()) X_phi.assign(n, 0.0);
  StabilityProblem p{grid, AxisymmetricSurface::from_profile(m, grid), std::move(Q),
                     std::move(X_theta), std::move(X_phi), m_max};
  p.validate();
  return p;
}

StabilityProblem StabilityProblem::from_slice(const init::ProductData& d, double t,
                                              const geom::ThetaGrid& grid, int m_max) {
  const int n = grid.size();
  Field Q(idx(n)), Xth(idx(n), 0.0), Xph(idx(n));
  for (int j = 0; j < n; ++j) {
    const double th = grid.node(j);
    const init::AmbientPoint<double> A = init::ambient(d, t, th);
    const init::SurfacePoint<double> S = init::surface_point(d, th, t, 0.0, 0.0);
    Q[idx(j)] = A.kappa_level - S.mu_plus_J_nu - 0.5 * S.chi_plus_norm2;
    Xph[idx(j)] = S.X_phi;
  }
  StabilityProblem p{grid, AxisymmetricSurface::from_slice(d, t, grid), std::move(Q),
                     std::move(Xth), std::move(Xph), m_max};
  p.validate();
  return p;
}

void StabilityProblem::validate() const {
  const auto n = idx(grid.size());
  if (Q.size() != n || X_theta.size() != n || X_phi.size() != n || surface.P.size() != n ||
      surface.R.size() != n || surface.P_face.size() != n + 1 || surface.R_face.size() != n + 1)
    throw UsageError("stability problem: field sizes do not match the grid");
  if (m_max < 0) throw UsageError("stability problem: m_max must be non-negative");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(Q[j]) || !std::isfinite(X_theta[j]) || !std::isfinite(X_phi[j])) {
      std::ostringstream msg;
      msg << "stability problem: non-finite coefficient at node " << j << " (theta = "
          << grid.node(static_cast<int>(j)) << ")";
      throw DomainError(msg.str());
    }
    if (!(surface.P[j] > 0.0) || !(surface.R[j] > 0.0))
      throw DomainError("stability problem: degenerate metric at node " + std::to_string(j));
  }
}

Field StabilityProblem::cell_weights() const {
  Field W(surface.P.size());
  for (std::size_t j = 0; j < W.size(); ++j) W[j] = surface.P[j] * surface.R[j] * grid.spacing();
  return W;
}

Field StabilityProblem::face_flux() const {
  const int n = grid.size();
  Field c(idx(n + 1), 0.0);
  for (int k = 1; k < n; ++k) {
    const double xth = 0.5 * (X_theta[idx(k - 1)] + X_theta[idx(k)]);
    c[idx(k)] = surface.P_face[idx(k)] * surface.R_face[idx(k)] * xth;
  }
  return c;
}

Field StabilityProblem::div_X() const {
  const Field W = cell_weights(), c = face_flux();
  Field dv(W.size());
  for (std::size_t j = 0; j < W.size(); ++j) dv[j] = (c[j + 1] - c[j]) / W[j];
  return dv;
}

Field StabilityProblem::X_norm2() const {
  Field x(Q.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double a = surface.P[j] * X_theta[j], b = surface.R[j] * X_phi[j];
    x[j] = a * a + b * b;
  }
  return x;
}

Field StabilityProblem::X_eta_norm2() const {
  Field x(Q.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double b = surface.R[j] * X_phi[j];
    x[j] = b * b;
  }
  return x;
}

namespace {

// -Lap_h, first-order part D_h (u -> X^theta u'), and the potential without
// div X; sign = +1 assembles L, -1 assembles L*.
Eigen::MatrixXd assemble_real(const StabilityProblem& p, int sign, bool with_transport) {
  const int n = p.grid.size();
  const double h = p.grid.spacing();
  const Field W = p.cell_weights();
  const Field c = p.face_flux();
  const Field dv = p.div_X();
  const Field x2 = p.X_norm2();
  Field F(idx(n + 1), 0.0);
  for (int k = 1; k < n; ++k)
    F[idx(k)] = p.surface.R_face[idx(k)] / (p.surface.P_face[idx(k)] * h);

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const double w = W[idx(j)];
    const double fl = F[idx(j)], fr = F[idx(j + 1)];
    M(j, j) += (fl + fr) / w;
    if (j > 0) M(j, j - 1) -= fl / w;
    if (j < n - 1) M(j, j + 1) -= fr / w;
    if (with_transport) {
      const double cl = c[idx(j)], cr = c[idx(j + 1)];
      const double s = 2.0 * sign / (2.0 * w);
      if (j < n - 1) M(j, j + 1) += s * cr;
      M(j, j) += s * (cl - cr);
      if (j > 0) M(j, j - 1) -= s * cl;
      M(j, j) += p.Q[idx(j)] - x2[idx(j)] + sign * dv[idx(j)];
    } else {
      M(j, j) += p.Q[idx(j)];
    }
  }
  return M;
}

}  // namespace

Eigen::MatrixXd assemble_axisymmetric(const StabilityProblem& p) { return assemble_real(p, 1, true); }

Eigen::MatrixXd assemble_adjoint(const StabilityProblem& p) { return assemble_real(p, -1, true); }

Eigen::MatrixXd assemble_symmetrized(const StabilityProblem& p) {
  return assemble_real(p, 1, false);
}

Eigen::MatrixXcd assemble_mode(const StabilityProblem& p, int m) {
  if (m < 0 || m > p.m_max) {
    std::ostringstream msg;
    msg << "mode " << m << " outside [0, m_max = " << p.m_max << "]";
    throw UsageError(msg.str());
  }
  Eigen::MatrixXcd M = assemble_axisymmetric(p).cast<std::complex<double>>();
  if (m == 0) return M;
  const double mm = static_cast<double>(m);
  for (int j = 0; j < p.grid.size(); ++j) {
    const double R = p.surface.R[idx(j)];
    M(j, j) += std::complex<double>(mm * mm / (R * R), 2.0 * mm * p.X_phi[idx(j)]);
  }
  return M;
}

Field laplacian_times(const StabilityProblem& p, const Field& u) {
  StabilityProblem q = p;
  std::fill(q.Q.begin(), q.Q.end(), 0.0);
  const Eigen::MatrixXd A = assemble_symmetrized(q);
  const Eigen::VectorXd v = A * Eigen::Map<const Eigen::VectorXd>(u.data(), A.cols());
  return Field(v.data(), v.data() + v.size());
}

double dirichlet_energy(const StabilityProblem& p, const Field& u) {
  const int n = p.grid.size();
  const double h = p.grid.spacing();
  double e = 0.0;
  for (int k = 1; k < n; ++k) {
    const double du = u[idx(k)] - u[idx(k - 1)];
    e += p.surface.R_face[idx(k)] / p.surface.P_face[idx(k)] * du * du / h;
  }
  return kTwoPi * e;
}

double weighted_integral(const StabilityProblem& p, const Field& a, const Field& b) {
  const Field W = p.cell_weights();
  double s = 0.0;
  for (std::size_t j = 0; j < W.size(); ++j) s += W[j] * a[j] * b[j];
  return kTwoPi * s;
}

double min_real_eigenvalue(const StabilityProblem& p, int m) {
  if (m == 0) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(assemble_axisymmetric(p), false);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigen-solver failed on mode 0");
    return es.eigenvalues().real().minCoeff();
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(assemble_mode(p, m), false);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("eigen-solver failed on mode " + std::to_string(m));
  return es.eigenvalues().real().minCoeff();
}

namespace {

double min_real(const Eigen::MatrixXd& M, const char* what) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  if (es.info() != Eigen::Success) throw NumericalFailure(std::string("eigen-solver failed: ") + what);
  return es.eigenvalues().real().minCoeff();
}

double min_symmetric(const StabilityProblem& p) {
  const Eigen::MatrixXd M = assemble_symmetrized(p);
  const Field W = p.cell_weights();
  const Eigen::VectorXd sw = Eigen::Map<const Eigen::VectorXd>(W.data(), M.rows()).cwiseSqrt();
  Eigen::MatrixXd S = sw.asDiagonal() * M * sw.cwiseInverse().asDiagonal();
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalFailure("symmetric eigen-solver failed");
  return es.eigenvalues().minCoeff();
}

}  // namespace

EigenResult principal_eigenpair(const StabilityProblem& p, const EigenOptions& opts) {
  p.validate();
  const int n = p.grid.size();
  EigenResult r;
  r.n = n;
  r.m_max = p.m_max;
  r.per_mode_min_re.assign(idx(p.m_max + 1), 0.0);

  Eigen::EigenSolver<Eigen::MatrixXd> es(assemble_axisymmetric(p), true);
  if (es.info() != Eigen::Success) throw NumericalFailure("eigen-solver failed on mode 0");
  const Eigen::VectorXcd ev = es.eigenvalues();
  const double lam_min = ev.real().minCoeff();
  r.spectral_tol = opts.spectral_tol_rel * std::max(1.0, std::abs(lam_min));

  // Candidates within spectral_tol of the minimum; prefer real eigenvalues
  // whose eigenvector has the fewest sign changes.
  int best = -1, best_changes = std::numeric_limits<int>::max(), candidates = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i].real() > lam_min + r.spectral_tol) continue;
    ++candidates;
    if (std::abs(ev[i].imag()) > r.spectral_tol) continue;
    const int sc = sign_changes(es.eigenvectors().col(i).real());
    if (sc < best_changes) {
      best = static_cast<int>(i);
      best_changes = sc;
    }
  }
  if (best < 0) {
    std::ostringstream msg;
    msg << "mode 0: eigenvalue of minimal real part " << lam_min << " is not real";
    throw NumericalFailure(msg.str());
  }
  r.near_degenerate = candidates > 1;
  r.lambda1 = ev[best].real();
  r.per_mode_min_re[0] = lam_min;

  Eigen::VectorXd u = es.eigenvectors().col(best).real();
  Eigen::Index imax = 0;
  u.cwiseAbs().maxCoeff(&imax);
  u /= u[imax];
  for (int j = 0; j < n; ++j) {
    if (!(u[j] > 0.0)) {
      std::ostringstream msg;
      msg << "principal eigenfunction changes sign at node " << j << " (theta = " << p.grid.node(j)
          << ", u = " << u[j] << "); refine the grid or check the coefficients";
      throw NumericalFailure(msg.str());
    }
  }
  r.u.assign(u.data(), u.data() + n);

  r.lambda1_adjoint = min_real(assemble_adjoint(p), "adjoint");
  r.lambda1_symmetrized = min_symmetric(p);

  std::exception_ptr failure;
  if (opts.exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int m = 1; m <= p.m_max; ++m) {
      try {
        r.per_mode_min_re[idx(m)] = min_real_eigenvalue(p, m);
      } catch (...) {
#pragma omp critical(mots_stab_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  } else {
    for (int m = 1; m <= p.m_max; ++m) r.per_mode_min_re[idx(m)] = min_real_eigenvalue(p, m);
  }
  if (failure) std::rethrow_exception(failure);

  if (p.m_max >= 1) {
    r.lemma1_margin = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= p.m_max; ++m)
      r.lemma1_margin = std::min(r.lemma1_margin, r.per_mode_min_re[idx(m)] - r.lambda1);
  }
  return r;
}

InequalityReport stability_inequality_check(const StabilityProblem& p,
                                            const std::vector<Field>& trial_fns,
                                            double ineq_tol_rel) {
  EigenOptions eo;
  eo.exec = Execution::serial;
  StabilityProblem p0 = p;
  p0.m_max = 0;
  const EigenResult er = principal_eigenpair(p0, eo);
  if (er.lambda1 < -er.spectral_tol) {
    std::ostringstream msg;
    msg << "stability inequality needs a stable problem; lambda1 = " << er.lambda1;
    throw DomainError(msg.str());
  }
  InequalityReport rep{er.lambda1, ineq_tol_rel, {}, true};
  const Field xe = p.X_eta_norm2();
  Field absQ(p.Q.size());
  std::transform(p.Q.begin(), p.Q.end(), absQ.begin(), [](double v) { return std::abs(v); });
  for (const Field& f : trial_fns) {
    if (f.size() != p.Q.size()) throw UsageError("trial function does not match the grid");
    Field xf(f.size()), qf(f.size()), aqf(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
      xf[j] = xe[j] * f[j];
      qf[j] = p.Q[j] * f[j];
      aqf[j] = absQ[j] * f[j];
    }
    InequalityRow row{};
    const double grad = dirichlet_energy(p, f);
    row.lhs = weighted_integral(p, xf, f);
    row.rhs = grad + weighted_integral(p, qf, f);
    row.margin = row.rhs - row.lhs;
    const double scale = grad + weighted_integral(p, aqf, f) + row.lhs;
    row.passed = row.margin >= -ineq_tol_rel * std::max(scale, std::numeric_limits<double>::min());
    rep.all_passed = rep.all_passed && row.passed;
    rep.rows.push_back(row);
  }
  return rep;
}

FirstVariationReport first_variation_check(const init::ProductData& d, double t0,
                                           const std::vector<double>& phi_coeffs,
                                           const geom::ThetaGrid& grid, std::vector<double> steps) {
  if (steps.size() < 2) throw UsageError("first_variation_check needs at least two steps");
  for (std::size_t i = 0; i + 1 < steps.size(); ++i)
    if (!(steps[i + 1] < steps[i]) || !(steps[i + 1] > 0.0))
      throw UsageError("first_variation_check: steps must be positive and decreasing");

  const int n = grid.size();
  const double r2 = d.metric.scale() * d.metric.scale();
  Field rhs(idx(n));
  std::vector<Field> fd(steps.size(), Field(idx(n)));
  for (int j = 0; j < n; ++j) {
    const double th = grid.node(j);
    double phi = 0.0, dphi = 0.0, d2phi = 0.0;
    for (std::size_t k = 0; k < phi_coeffs.size(); ++k) {
      const double kk = static_cast<double>(k);
      phi += phi_coeffs[k] * std::cos(kk * th);
      dphi -= phi_coeffs[k] * kk * std::sin(kk * th);
      d2phi -= phi_coeffs[k] * kk * kk * std::cos(kk * th);
    }
    const init::AmbientPoint<double> A = init::ambient(d, t0, th);
    const init::SurfacePoint<double> S = init::surface_point(d, th, t0, 0.0, 0.0);
    const geom::ProfileJet pj = d.metric.shape(th);
    const double e2 = A.a / r2;
    // On a slice X is purely azimuthal: <X, grad phi> = 0 and div X = 0.
    const double lap = (d2phi + pj.drho / pj.rho * dphi) / (r2 * e2);
    const double Q = A.kappa_level - S.mu_plus_J_nu - 0.5 * S.chi_plus_norm2;
    const double tp = S.theta_plus;
    rhs[idx(j)] = -lap + (Q - S.X_norm2) * phi + (S.tau * tp - 0.5 * tp * tp) * phi;

    for (std::size_t i = 0; i < steps.size(); ++i) {
      const double h = steps[i];
      const double up =
          init::surface_point(d, th, t0 + h * phi, h * dphi, h * d2phi).theta_plus;
      const double dn =
          init::surface_point(d, th, t0 - h * phi, -h * dphi, -h * d2phi).theta_plus;
      fd[i][idx(j)] = (up - dn) / (2.0 * h);
    }
  }

  FirstVariationReport rep;
  rep.steps = steps;
  rep.rhs_norm = 0.0;
  for (double v : rhs) rep.rhs_norm = std::max(rep.rhs_norm, std::abs(v));
  rep.relative = rep.rhs_norm > 1e-12;
  const double denom = rep.relative ? rep.rhs_norm : 1.0;
  auto err = [&](const Field& v) {
    double e = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) e = std::max(e, std::abs(v[j] - rhs[j]));
    return e / denom;
  };
  for (const Field& v : fd) rep.raw_errors.push_back(err(v));
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    const double q2 = (steps[i] / steps[i + 1]) * (steps[i] / steps[i + 1]);
    Field ex(idx(n));
    for (int j = 0; j < n; ++j)
      ex[idx(j)] = (q2 * fd[i + 1][idx(j)] - fd[i][idx(j)]) / (q2 - 1.0);
    rep.extrapolated_errors.push_back(err(ex));
  }
  rep.error = rep.extrapolated_errors.back();
  for (std::size_t i = 0; i + 1 < rep.raw_errors.size(); ++i)
    if (rep.raw_errors[i + 1] > rep.raw_errors[i] && rep.raw_errors[i + 1] > 1e-12)
      rep.monotone = false;
  return rep;
}

}  // namespace mots::stab
