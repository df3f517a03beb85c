#pragma once

// Axisymmetric initial data of product type on R x S^2:
//
//   g = dt^2 + e^{2 sigma(t,theta)} r^2 (dtheta^2 + rhohat^2 dphi^2)
//   K = alpha(t) dt dt + beta(theta) (dt dphi + dphi dt)
//
// sigma = 0 is the plain product family; a nonzero warp sigma gives the
// conformally perturbed data used for foliation and first-variation checks.
// Surfaces are graphs t = f(theta) with unit normal proportional to
// dt - f' dtheta, pointing towards increasing t (the exterior).

#include <cmath>
#include <string>
#include <vector>

#include "mots/common.hpp"
#include "mots/geomcore.hpp"

namespace mots::init {

/// c_0 + c_1 t + c_2 t^2 + ...
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

  template <class T>
  T operator()(const T& t) const {
    T v = T(0.0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * t + *it;
    return v;
  }
  const std::vector<double>& coeffs() const { return c_; }
  bool is_zero() const;

 private:
  std::vector<double> c_;
};

/// One term coef * u^p * v^q of a two-variable polynomial.
struct Term {
  double coef;
  int p;
  int q;
};

/// beta(theta) = sum coef sin^p(theta) cos^q(theta).
class TrigPoly {
 public:
  TrigPoly() = default;
  explicit TrigPoly(std::vector<Term> terms) : terms_(std::move(terms)) {}

  double operator()(double theta) const;
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const;

 private:
  std::vector<Term> terms_;
};

/// Values of sigma and the partial derivatives the geometry needs.
template <class T>
struct WarpJet {
  T s, s_t, s_tt, s_th, s_thth;
};

/// sigma(t, theta) = sum coef t^p cos^q(theta).
class Warp {
 public:
  Warp() = default;
  explicit Warp(std::vector<Term> terms) : terms_(std::move(terms)) {}

  template <class T>
  WarpJet<T> operator()(const T& t, double theta) const;
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const;

 private:
  std::vector<Term> terms_;
};

struct ProductData {
  geom::MetricProfile metric = geom::MetricProfile::round();
  Polynomial alpha;
  TrigPoly beta;
  Warp warp;

  bool is_product() const { return warp.is_zero(); }
  /// Profile regularity and beta(0) = beta(pi) = 0.
  void validate(double pole_tol = geom::kDefaultPoleTol) const;
};

/// Pointwise ambient quantities of a ProductData at (t, theta).
template <class T>
struct AmbientPoint {
  T a, a_t, a_th;        // g_theta theta and partials
  T b, b_t, b_th_over_b; // g_phi phi, d_t b, (d_theta b) / b
  T alpha;
  double beta;
  T kappa_level;  // Gauss curvature of the level set {t} x S^2
  T scalar_curvature;
  T mu;
  T J_t;  // J(d_t); J(d_theta) = J(d_phi)-free part vanishes for this family
};

template <class T>
AmbientPoint<T> ambient(const ProductData& d, const T& t, double theta);

/// Geometry of the graph t = f(theta) at one node.
template <class T>
struct SurfacePoint {
  T gamma_thth, gamma_phph;  // induced metric
  T H, tr_K, theta_plus, theta_minus;
  T chi_plus_norm2, chi_minus_norm2;
  T K_nu_theta, K_nu_phi;  // K(nu, d_theta), K(nu, d_phi)
  T X_theta, X_phi;        // coordinate components of X
  T X_norm2, X_eta_norm2;
  T mu_plus_J_nu;
  T tau;
  T density;  // area element per d theta d phi
};

template <class T>
SurfacePoint<T> surface_point(const ProductData& d, double theta, const T& f, const T& df,
                              const T& d2f);

/// Node-sampled surface fields (see SurfacePoint).
struct SurfaceQuantities {
  Field theta_plus, theta_minus, tr_sigma_K, H;
  Field chi_plus_norm2, chi_minus_norm2;
  Field X_theta, X_phi, X_eta_norm2, X_norm2;
  Field K_nu_eta;  // <X, eta> = K(nu, d_phi)
  Field mu_plus_J_nu, tau;
  Field density, gamma_thth, gamma_phph;
};

SurfaceQuantities surface_quantities(const ProductData& d, const geom::GraphSurface& s,
                                     const geom::ThetaGrid& grid);

struct OmegaReport {
  double omega;
  double area;
  double komar;  // integral of K(nu, eta) dA, no 1/(8 pi)
  double bound;  // 4 pi / (c + omega)
  double c;
  double x_eta_integral;  // integral of |X^eta|^2 dA
};

OmegaReport omega_of_surface(const SurfaceQuantities& q, const geom::ThetaGrid& grid, double c);

struct LemmaBetaRow {
  double omega;
  double x_eta_integral;
  double area;
  double max_slope_on_support;  // max |f'| where beta != 0
  bool integral_not_larger;     // x_eta_integral <= slice value
  bool equality_consistent;     // equality iff f' = 0 on supp(beta)
  bool omega_strictly_smaller;  // required when beta != 0 and f' != 0 on supp(beta)
  bool omega_check_applies;
};

struct LemmaBetaReport {
  LemmaBetaRow slice;
  std::vector<LemmaBetaRow> rows;
  bool holds;
};

/// Compares omega and the |X^eta|^2 integral of each graph with the t = 0
/// slice. Requires product data (no warp).
LemmaBetaReport lemma_beta_check(const ProductData& d, const std::vector<geom::GraphSurface>& graphs,
                                 const geom::ThetaGrid& grid, double tol = 1e-12);

struct OmegaSearchOptions {
  double coef_bound = 1.0;  // box |c_k| <= coef_bound
  double initial_step = 0.25;
  double step_tol = 1e-9;
  int max_iters = 20000;
};

struct OmegaMinimum {
  std::vector<double> coeffs;  // f = sum_{k>=1} c_k cos(k theta)
  double omega;
  double omega_slice;
  int iterations;
  bool converged;
  bool slice_is_minimizer;
};

/// omega(Sigma_f) for f = sum_k coeffs[k-1] cos(k theta).
double omega_of_graph(const ProductData& d, const geom::ThetaGrid& grid,
                      const std::vector<double>& coeffs);

/// Compass search for the minimum of omega over cosine-series graphs with
/// basis_size modes inside the coefficient box.
OmegaMinimum minimize_omega(const ProductData& d, const geom::ThetaGrid& grid, int basis_size,
                            const OmegaSearchOptions& opts = {});

// ------------------------------------------------------------ templates

template <class T>
WarpJet<T> Warp::operator()(const T& t, double theta) const {
  using std::pow;
  WarpJet<T> w{T(0.0), T(0.0), T(0.0), T(0.0), T(0.0)};
  const double c = std::cos(theta), s = std::sin(theta);
  for (const Term& term : terms_) {
    // t^p and its t-derivatives
    T tp = T(1.0), tp1 = T(0.0), tp2 = T(0.0);
    if (term.p >= 1) {
      tp = T(1.0);
      for (int i = 0; i < term.p; ++i) tp = tp * t;
      T tpm1 = T(1.0);
      for (int i = 0; i < term.p - 1; ++i) tpm1 = tpm1 * t;
      tp1 = tpm1 * double(term.p);
      if (term.p >= 2) {
        T tpm2 = T(1.0);
        for (int i = 0; i < term.p - 2; ++i) tpm2 = tpm2 * t;
        tp2 = tpm2 * double(term.p * (term.p - 1));
      }
    }
    // cos^q and its theta-derivatives
    const int q = term.q;
    const double cq = std::pow(c, q);
    const double cq1 = q >= 1 ? -q * std::pow(c, q - 1) * s : 0.0;
    double cq2 = 0.0;
    if (q >= 1) cq2 -= q * std::pow(c, q);
    if (q >= 2) cq2 += q * (q - 1) * std::pow(c, q - 2) * s * s;
    w.s = w.s + tp * (term.coef * cq);
    w.s_t = w.s_t + tp1 * (term.coef * cq);
    w.s_tt = w.s_tt + tp2 * (term.coef * cq);
    w.s_th = w.s_th + tp * (term.coef * cq1);
    w.s_thth = w.s_thth + tp * (term.coef * cq2);
  }
  return w;
}

template <class T>
AmbientPoint<T> ambient(const ProductData& d, const T& t, double theta) {
  using std::exp;
  const geom::ProfileJet p = d.metric.shape(theta);
  const double r = d.metric.scale();
  const double r2 = r * r;
  const WarpJet<T> w = d.warp(t, theta);
  const T e2 = exp(w.s * 2.0);

  AmbientPoint<T> A;
  A.a = e2 * r2;
  A.a_t = A.a * w.s_t * 2.0;
  A.a_th = A.a * w.s_th * 2.0;
  A.b = e2 * (r2 * p.rho * p.rho);
  A.b_t = A.b * w.s_t * 2.0;
  A.b_th_over_b = w.s_th * 2.0 + 2.0 * p.drho / p.rho;
  A.alpha = d.alpha(t);
  A.beta = d.beta(theta);

  // Conformal change of the base curvature -rhohat''/(r^2 rhohat).
  const double kappa_base = -p.d2rho / (r2 * p.rho);
  const T lap_sigma = (w.s_thth + w.s_th * (p.drho / p.rho)) / r2;
  A.kappa_level = (lap_sigma * -1.0 + kappa_base) / e2;
  // R = R_level - 2 d_t tr k - (tr k)^2 - |k|^2 with k = sigma_t * level metric.
  A.scalar_curvature = A.kappa_level * 2.0 - w.s_tt * 4.0 - w.s_t * w.s_t * 6.0;
  // mu = (R - |K|^2 + tau^2)/2 with |K|^2 = alpha^2 + 2 beta^2 / b, tau = alpha.
  A.mu = A.scalar_curvature * 0.5 - (A.beta * A.beta) / A.b;
  // J = div(K - tau g): only the t-component survives, alpha * tr k.
  A.J_t = A.alpha * w.s_t * 2.0;
  return A;
}

template <class T>
SurfacePoint<T> surface_point(const ProductData& d, double theta, const T& f, const T& df,
                              const T& d2f) {
  using std::sqrt;
  const AmbientPoint<T> A = ambient(d, f, theta);
  SurfacePoint<T> S;
  const T N = sqrt(df * df / A.a + 1.0);

  // Second fundamental form of the graph, coordinate components.
  const T A_thth = ((d2f - A.a_t * 0.5) - df * (A.a_t * df / A.a + A.a_th * 0.5 / A.a)) * -1.0 / N;
  const T A_phph = (A.b_t * 0.5 - df * (A.b * A.b_th_over_b) * 0.5 / A.a) / N;

  S.gamma_thth = df * df + A.a;
  S.gamma_phph = A.b;
  S.H = A_thth / S.gamma_thth + A_phph / S.gamma_phph;
  S.tr_K = A.alpha * df * df / S.gamma_thth;
  S.theta_plus = S.tr_K + S.H;
  S.theta_minus = S.tr_K - S.H;

  const T Kthth = A.alpha * df * df;
  const T Kthph = df * A.beta;
  auto norm2 = [&](const T& cthth, const T& cthph, const T& cphph) -> T {
    const T u = cthth / S.gamma_thth;
    const T v = cphph / S.gamma_phph;
    return u * u + v * v + cthph * cthph * 2.0 / (S.gamma_thth * S.gamma_phph);
  };
  S.chi_plus_norm2 = norm2(Kthth + A_thth, Kthph, A_phph);
  S.chi_minus_norm2 = norm2(Kthth - A_thth, Kthph, A_phph * -1.0);

  S.K_nu_theta = A.alpha * df / N;
  S.K_nu_phi = T(A.beta) / N;
  S.X_theta = S.K_nu_theta / S.gamma_thth;
  S.X_phi = S.K_nu_phi / S.gamma_phph;
  S.X_eta_norm2 = S.K_nu_phi * S.K_nu_phi / S.gamma_phph;
  S.X_norm2 = S.K_nu_theta * S.K_nu_theta / S.gamma_thth + S.X_eta_norm2;

  S.mu_plus_J_nu = A.mu + A.J_t / N;
  S.tau = A.alpha;
  S.density = sqrt(S.gamma_thth * S.gamma_phph);
  return S;
}

}  // namespace mots::init
