#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "mots/errors.hpp"
#include "mots/initdata.hpp"

using namespace mots;
using namespace mots::init;
using geom::GraphSurface;
using geom::MetricProfile;
using geom::ThetaGrid;

namespace {

ProductData beta_data(double b, const MetricProfile& m = MetricProfile::round()) {
  ProductData d;
  d.metric = m;
  d.beta = TrigPoly({{b, 2, 0}});
  return d;
}

ProductData warped_data() {
  ProductData d;
  d.metric = MetricProfile::regular_poly({0.1, 0.05}, 1.3);
  d.alpha = Polynomial({0.3, 0.2});
  d.beta = TrigPoly({{0.4, 2, 1}, {0.1, 3, 0}});
  d.warp = Warp({{0.1, 2, 1}, {0.05, 1, 2}, {-0.03, 3, 0}});
  return d;
}

// Finite-difference geometry of g = dt^2 + e^{2 sigma} r^2 (dth^2 + rho^2 dphi^2)
// in coordinates x = (t, theta, phi), independent of the closed forms.
struct FdGeometry {
  const ProductData& d;

  using Mat = Eigen::Matrix3d;
  Mat metric(const std::array<double, 3>& x) const {
    const double r = d.metric.scale();
    double sigma = 0.0;
    for (const Term& tm : d.warp.terms())
      sigma += tm.coef * std::pow(x[0], tm.p) * std::pow(std::cos(x[1]), tm.q);
    const double rho = d.metric.shape(x[1]).rho;
    Mat g = Mat::Zero();
    g(0, 0) = 1.0;
    g(1, 1) = std::exp(2 * sigma) * r * r;
    g(2, 2) = std::exp(2 * sigma) * r * r * rho * rho;
    return g;
  }
  Mat K(const std::array<double, 3>& x) const {
    Mat k = Mat::Zero();
    k(0, 0) = d.alpha(x[0]);
    k(0, 2) = k(2, 0) = d.beta(x[1]);
    return k;
  }
  template <class F>
  static auto partial(F&& f, std::array<double, 3> x, int i, double h) {
    auto xp = x, xm = x;
    xp[static_cast<std::size_t>(i)] += h;
    xm[static_cast<std::size_t>(i)] -= h;
    return ((f(xp) - f(xm)) / (2 * h)).eval();
  }
  // Gamma[k](i, j) = Gamma^k_ij
  std::array<Mat, 3> christoffel(const std::array<double, 3>& x) const {
    const Mat gi = metric(x).inverse();
    std::array<Mat, 3> dg;
    for (int i = 0; i < 3; ++i)
      dg[static_cast<std::size_t>(i)] = partial([&](auto y) { return metric(y); }, x, i, 1e-5);
    std::array<Mat, 3> G;
    for (int k = 0; k < 3; ++k) {
      G[static_cast<std::size_t>(k)].setZero();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int l = 0; l < 3; ++l)
            G[static_cast<std::size_t>(k)](i, j) +=
                0.5 * gi(k, l) *
                (dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) -
                 dg[static_cast<std::size_t>(l)](i, j));
    }
    return G;
  }
  double scalar_curvature(const std::array<double, 3>& x) const {
    const double h = 2e-3;
    const auto G = christoffel(x);
    std::array<std::array<Mat, 3>, 3> dG;  // dG[m][k] = d_m Gamma^k, fourth-order stencil
    for (int m = 0; m < 3; ++m) {
      auto shifted = [&](double s) {
        auto y = x;
        y[static_cast<std::size_t>(m)] += s;
        return christoffel(y);
      };
      const auto Gp = shifted(h), Gm = shifted(-h), Gp2 = shifted(2 * h), Gm2 = shifted(-2 * h);
      for (std::size_t k = 0; k < 3; ++k)
        dG[static_cast<std::size_t>(m)][k] = (8.0 * (Gp[k] - Gm[k]) - (Gp2[k] - Gm2[k])) / (12 * h);
    }
    Mat Ric = Mat::Zero();
    auto g_ = [&](int k) -> const Mat& { return G[static_cast<std::size_t>(k)]; };
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k) {
          v += dG[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)](i, j);
          v -= dG[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)](i, k);
          for (int l = 0; l < 3; ++l) v += g_(k)(k, l) * g_(l)(i, j) - g_(k)(j, l) * g_(l)(i, k);
        }
        Ric(i, j) = v;
      }
    return (metric(x).inverse() * Ric).trace();
  }
  // J_i = g^{jk} nabla_k (K - tau g)_{ij}
  Eigen::Vector3d momentum(const std::array<double, 3>& x) const {
    auto P = [&](const std::array<double, 3>& y) {
      const Mat g = metric(y), k = K(y);
      const double tau = (g.inverse() * k).trace();
      return (k - tau * g).eval();
    };
    const auto G = christoffel(x);
    const Mat gi = metric(x).inverse();
    const Mat p = P(x);
    std::array<Mat, 3> dP;
    for (int m = 0; m < 3; ++m) dP[static_cast<std::size_t>(m)] = partial(P, x, m, 1e-5);
    Eigen::Vector3d J = Eigen::Vector3d::Zero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          double cov = dP[static_cast<std::size_t>(k)](i, j);
          for (int l = 0; l < 3; ++l)
            cov -= G[static_cast<std::size_t>(l)](k, i) * p(l, j) +
                   G[static_cast<std::size_t>(l)](k, j) * p(i, l);
          J[i] += gi(j, k) * cov;
        }
    return J;
  }
  // theta+ of the level set F = t - f(theta) = 0 via div of the unit normal.
  template <class Fn>
  double theta_plus(Fn&& f, double th) const {
    auto fprime = [&](double y) { return (f(y + 1e-6) - f(y - 1e-6)) / 2e-6; };
    auto flux = [&](const std::array<double, 3>& y) {
      const Mat g = metric(y), gi = g.inverse();
      const Eigen::Vector3d dF(1.0, -fprime(y[1]), 0.0);
      const Eigen::Vector3d V = gi * dF / std::sqrt(dF.dot(gi * dF));
      return (std::sqrt(g.determinant()) * V).eval();
    };
    const std::array<double, 3> x{f(th), th, 0.0};
    const double h = 1e-4;
    double div = 0.0;
    for (int i = 0; i < 2; ++i) div += partial(flux, x, i, h)[i];
    const double H = div / std::sqrt(metric(x).determinant());
    const Mat gi = metric(x).inverse();
    const Eigen::Vector3d dF(1.0, -fprime(th), 0.0);
    const Eigen::Vector3d nu = gi * dF / std::sqrt(dF.dot(gi * dF));
    const Mat proj = gi - nu * nu.transpose();
    const double trK = (proj * K(x)).trace();
    return trK + H;
  }
};

}  // namespace

TEST_CASE("product-data slices are MOTS and MITS") {
  const ThetaGrid g(64);
  const ProductData d = beta_data(0.7);
  const SurfaceQuantities q = surface_quantities(d, GraphSurface::constant(d.metric, g, 0.4), g);
  for (int j = 0; j < g.size(); ++j) {
    const auto u = static_cast<std::size_t>(j);
    CHECK(q.H[u] == 0.0);
    CHECK(q.tr_sigma_K[u] == 0.0);
    CHECK(q.theta_plus[u] == 0.0);
    CHECK(q.theta_minus[u] == 0.0);
    const double s = std::sin(g.node(j));
    CHECK(q.X_eta_norm2[u] == doctest::Approx(0.49 * s * s * s * s / (s * s)).epsilon(1e-13));
  }
}

TEST_CASE("|X^eta|^2 on f = delta cos(theta) matches the closed form") {
  const ThetaGrid g(128);
  const double b = 0.6, delta = 0.35;
  const ProductData d = beta_data(b);
  const SurfaceQuantities q =
      surface_quantities(d, GraphSurface::cosine_series(d.metric, g, {0.0, delta}), g);
  for (int j = 0; j < g.size(); ++j) {
    const double s = std::sin(g.node(j));
    const double oracle = b * b * s * s / (1.0 + delta * delta * s * s);
    CHECK(std::abs(q.X_eta_norm2[static_cast<std::size_t>(j)] - oracle) <= 1e-12);
  }
}

TEST_CASE("pointwise identities") {
  const ThetaGrid g(96);
  const ProductData d = warped_data();
  const SurfaceQuantities q =
      surface_quantities(d, GraphSurface::cosine_series(d.metric, g, {0.05, 0.2, -0.1}), g);
  for (std::size_t j = 0; j < q.H.size(); ++j) {
    CHECK(std::abs(q.theta_plus[j] - (q.tr_sigma_K[j] + q.H[j])) <= 1e-12);
    CHECK(std::abs(q.theta_minus[j] - (q.tr_sigma_K[j] - q.H[j])) <= 1e-12);
    const double lhs = q.theta_plus[j] * q.theta_minus[j];
    const double rhs = q.tr_sigma_K[j] * q.tr_sigma_K[j] - q.H[j] * q.H[j];
    CHECK(std::abs(lhs - rhs) <= 1e-12);
    CHECK(q.X_eta_norm2[j] >= 0.0);
    CHECK(q.X_eta_norm2[j] <= q.X_norm2[j] + 1e-15);
  }
}

TEST_CASE("scalar curvature, mu and J agree with a finite-difference Christoffel oracle") {
  const ProductData d = warped_data();
  const FdGeometry fd{d};
  for (double t : {-0.3, 0.0, 0.25}) {
    for (double th : {0.4, 1.3, 2.5}) {
      const AmbientPoint<double> A = ambient(d, t, th);
      const std::array<double, 3> x{t, th, 0.0};
      CHECK(A.scalar_curvature == doctest::Approx(fd.scalar_curvature(x)).epsilon(1e-5));
      // mu = (R - |K|^2 + tau^2) / 2 from the full 3x3 tensors
      const Eigen::Matrix3d gi = fd.metric(x).inverse(), K = fd.K(x);
      const double K2 = (gi * K * gi * K).trace();
      const double tau = (gi * K).trace();
      const double mu = 0.5 * (A.scalar_curvature - K2 + tau * tau);
      CHECK(std::abs(A.mu - mu) <= 1e-10);
      const Eigen::Vector3d J = fd.momentum(x);
      CHECK(std::abs(A.J_t - J[0]) <= 1e-7);
      CHECK(std::abs(J[1]) <= 1e-7);
    }
  }
}

TEST_CASE("mu on the unwarped product equals kappa minus beta^2 / rho^2") {
  const ProductData d = beta_data(0.5);
  for (double th : {0.2, 1.0, 2.0}) {
    const AmbientPoint<double> A = ambient(d, 0.3, th);
    const double s = std::sin(th);
    CHECK(std::abs(A.scalar_curvature - 2.0) <= 1e-12);
    CHECK(std::abs(A.mu - (1.0 - 0.25 * s * s)) <= 1e-12);
  }
}

TEST_CASE("theta+ of tilted graphs matches the divergence of the unit normal") {
  const ProductData d = warped_data();
  const FdGeometry fd{d};
  auto f = [](double th) { return 0.1 + 0.15 * std::cos(th) - 0.05 * std::cos(2 * th); };
  auto df = [](double th) { return -0.15 * std::sin(th) + 0.1 * std::sin(2 * th); };
  auto d2f = [](double th) { return -0.15 * std::cos(th) + 0.2 * std::cos(2 * th); };
  for (double th : {0.5, 1.4, 2.3}) {
    const SurfacePoint<double> S = surface_point(d, th, f(th), df(th), d2f(th));
    CHECK(S.theta_plus == doctest::Approx(fd.theta_plus(f, th)).epsilon(1e-6));
  }
}

TEST_CASE("omega, Komar integral and bound for beta = b sin^2") {
  const double b = 0.8;
  const ProductData d = beta_data(b);
  for (int n : {128, 4096}) {
    const ThetaGrid g(n);
    const OmegaReport o =
        omega_of_surface(surface_quantities(d, GraphSurface::constant(d.metric, g, 0.0), g), g, 1.0);
    CHECK(o.omega == doctest::Approx(2.0 / 3.0 * b * b).epsilon(1e-12));
    CHECK(o.komar == doctest::Approx(8.0 * kPi / 3.0 * b).epsilon(1e-12));
    CHECK(o.area == doctest::Approx(4.0 * kPi).epsilon(1e-12));
    CHECK(o.bound == doctest::Approx(4.0 * kPi / (1.0 + o.omega)).epsilon(1e-15));
  }
}

TEST_CASE("quadrature of cos^2 sin^3") {
  const ThetaGrid g(64);
  Field f(64);
  for (int j = 0; j < 64; ++j) {
    const double c = std::cos(g.node(j)), s = std::sin(g.node(j));
    f[static_cast<std::size_t>(j)] = c * c * s * s * s;
  }
  CHECK(std::abs(g.integrate_pole_vanishing(f) - 4.0 / 15.0) <= 1e-12);
}

TEST_CASE("omega with beta = 0, shifted graphs and linearity of the Komar integral") {
  const ThetaGrid g(128);
  ProductData zero;
  const OmegaReport o0 =
      omega_of_surface(surface_quantities(zero, GraphSurface::constant(zero.metric, g, 0.0), g), g, 2.0);
  CHECK(o0.omega == 0.0);
  CHECK(o0.komar == 0.0);
  CHECK(o0.bound == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK_THROWS_AS(omega_of_surface(surface_quantities(zero, GraphSurface::constant(zero.metric, g, 0.0), g), g, 0.0),
                  DomainError);

  const ProductData d = beta_data(0.5);
  const double w1 = omega_of_surface(
                        surface_quantities(d, GraphSurface::cosine_series(d.metric, g, {0.0, 0.3}), g), g, 1.0)
                        .omega;
  const double w2 = omega_of_surface(
                        surface_quantities(d, GraphSurface::cosine_series(d.metric, g, {1.7, 0.3}), g), g, 1.0)
                        .omega;
  CHECK(std::abs(w1 - w2) <= 1e-12);

  auto komar = [&](const TrigPoly& beta) {
    ProductData e;
    e.beta = beta;
    return omega_of_surface(
               surface_quantities(e, GraphSurface::cosine_series(e.metric, g, {0.0, 0.2, 0.1}), g), g, 1.0)
        .komar;
  };
  const TrigPoly b1({{1.0, 2, 0}}), b2({{1.0, 3, 1}});
  const double lhs = komar(TrigPoly({{0.7, 2, 0}, {-1.3, 3, 1}}));
  CHECK(std::abs(lhs - (0.7 * komar(b1) - 1.3 * komar(b2))) <= 1e-12);
}

TEST_CASE("beta must vanish at the poles") {
  ProductData d;
  d.beta = TrigPoly({{0.3, 0, 1}});
  CHECK_THROWS_AS(d.validate(), DomainError);
  CHECK_NOTHROW(beta_data(0.3).validate());
}

TEST_CASE("lemma beta: graphs versus the slice") {
  const ThetaGrid g(256);
  const double b = 0.5;
  const ProductData d = beta_data(b);
  std::vector<GraphSurface> fam{GraphSurface::constant(d.metric, g, 0.4),
                                GraphSurface::cosine_series(d.metric, g, {0.0, 0.5}),
                                GraphSurface::cosine_series(d.metric, g, {0.1, 0.0, 0.3})};
  const LemmaBetaReport r = lemma_beta_check(d, fam, g);
  CHECK(r.holds);
  CHECK(r.rows[0].omega == doctest::Approx(r.slice.omega).epsilon(1e-13));
  CHECK(r.rows[1].omega_strictly_smaller);
  CHECK(r.slice.omega - r.rows[1].omega >= 1e-3 * b * b);
  CHECK(r.rows[1].x_eta_integral < r.slice.x_eta_integral);

  ProductData none;
  const LemmaBetaReport z = lemma_beta_check(none, {GraphSurface::cosine_series(none.metric, g, {0.0, 0.5})}, g);
  CHECK(z.holds);
  CHECK(z.rows[0].omega == 0.0);
  CHECK(z.slice.omega == 0.0);

  ProductData warped = d;
  warped.warp = Warp({{0.1, 2, 0}});
  CHECK_THROWS_AS(lemma_beta_check(warped, fam, g), DomainError);
}

TEST_CASE("minimize_omega leaves the slice when beta is nonzero") {
  const ThetaGrid g(128);
  const double b = 0.6;
  const ProductData d = beta_data(b);
  const double w0 = 2.0 / 3.0 * b * b;
  // Coarse sweep of c_1 as an oracle for the existence of a lower value.
  double sweep_min = w0;
  for (int i = -10; i <= 10; ++i) sweep_min = std::min(sweep_min, omega_of_graph(d, g, {0.1 * i}));
  CHECK(sweep_min < w0);

  const OmegaMinimum m = minimize_omega(d, g, 3);
  CHECK(m.omega_slice == doctest::Approx(w0).epsilon(1e-12));
  CHECK(m.omega <= sweep_min + 1e-12);
  CHECK(w0 - m.omega >= 1e-3 * b * b);
  CHECK_FALSE(m.slice_is_minimizer);
  for (double c : m.coeffs) CHECK(std::abs(c) <= 1.0);

  ProductData none;
  const OmegaMinimum z = minimize_omega(none, g, 2);
  CHECK(z.omega == 0.0);
  CHECK(z.omega_slice == 0.0);
  CHECK_THROWS_AS(minimize_omega(d, g, 64), DomainError);
}
