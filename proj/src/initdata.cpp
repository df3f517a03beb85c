#include "mots/initdata.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mots/errors.hpp"

namespace mots::init {

bool Polynomial::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
}

double TrigPoly::operator()(double theta) const {
  const double s = std::sin(theta), c = std::cos(theta);
  double v = 0.0;
  for (const Term& t : terms_) v += t.coef * std::pow(s, t.p) * std::pow(c, t.q);
  return v;
}

bool TrigPoly::is_zero() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.coef == 0.0; });
}

bool Warp::is_zero() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.coef == 0.0; });
}

void ProductData::validate(double pole_tol) const {
  metric.validate(pole_tol);
  for (const Term& t : beta.terms())
    if (t.p < 0 || t.q < 0) throw UsageError("beta: negative power in term");
  for (const Term& t : warp.terms())
    if (t.p < 0 || t.q < 0) throw UsageError("warp: negative power in term");
  const double bn = beta(0.0), bs = beta(kPi);
  if (std::abs(bn) > pole_tol || std::abs(bs) > pole_tol) {
    std::ostringstream msg;
    msg << "beta must vanish at the poles (beta(0) = " << bn << ", beta(pi) = " << bs << ")";
    throw DomainError(msg.str());
  }
}

SurfaceQuantities surface_quantities(const ProductData& d, const geom::GraphSurface& s,
                                     const geom::ThetaGrid& grid) {
  if (s.size() != grid.size()) throw UsageError("surface_quantities: graph and grid sizes differ");
  if (s.base().id() != d.metric.id() || s.base().scale() != d.metric.scale())
    throw UsageError("surface_quantities: graph is not over the data's slice metric");

  const auto n = static_cast<std::size_t>(grid.size());
  SurfaceQuantities q;
  for (Field* f : {&q.theta_plus, &q.theta_minus, &q.tr_sigma_K, &q.H, &q.chi_plus_norm2,
                   &q.chi_minus_norm2, &q.X_theta, &q.X_phi, &q.X_eta_norm2, &q.X_norm2,
                   &q.K_nu_eta, &q.mu_plus_J_nu, &q.tau, &q.density, &q.gamma_thth, &q.gamma_phph})
    f->resize(n);

  for (std::size_t j = 0; j < n; ++j) {
    const SurfacePoint<double> p =
        surface_point<double>(d, grid.nodes()[j], s.values()[j], s.slopes()[j], s.curvatures()[j]);
    q.theta_plus[j] = p.theta_plus;
    q.theta_minus[j] = p.theta_minus;
    q.tr_sigma_K[j] = p.tr_K;
    q.H[j] = p.H;
    q.chi_plus_norm2[j] = p.chi_plus_norm2;
    q.chi_minus_norm2[j] = p.chi_minus_norm2;
    q.X_theta[j] = p.X_theta;
    q.X_phi[j] = p.X_phi;
    q.X_eta_norm2[j] = p.X_eta_norm2;
    q.X_norm2[j] = p.X_norm2;
    q.K_nu_eta[j] = p.K_nu_phi;
    q.mu_plus_J_nu[j] = p.mu_plus_J_nu;
    q.tau[j] = p.tau;
    q.density[j] = p.density;
    q.gamma_thth[j] = p.gamma_thth;
    q.gamma_phph[j] = p.gamma_phph;
  }
  return q;
}

namespace {

double integrate_dA(const geom::ThetaGrid& grid, const Field& f, const Field& density) {
  Field g(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) g[j] = f[j] * density[j];
  return kTwoPi * grid.integrate_pole_vanishing(g);
}

}  // namespace

OmegaReport omega_of_surface(const SurfaceQuantities& q, const geom::ThetaGrid& grid, double c) {
  if (!(c > 0.0)) throw DomainError("omega_of_surface: the energy bound c must be positive");
  if (static_cast<int>(q.density.size()) != grid.size())
    throw UsageError("omega_of_surface: fields do not match the grid");
  OmegaReport r{};
  r.c = c;
  r.area = integrate_dA(grid, Field(q.density.size(), 1.0), q.density);
  r.x_eta_integral = integrate_dA(grid, q.X_eta_norm2, q.density);
  r.omega = r.x_eta_integral / r.area;
  r.komar = integrate_dA(grid, q.K_nu_eta, q.density);
  r.bound = 4.0 * kPi / (c + r.omega);
  return r;
}

LemmaBetaReport lemma_beta_check(const ProductData& d, const std::vector<geom::GraphSurface>& graphs,
                                 const geom::ThetaGrid& grid, double tol) {
  if (!d.is_product()) throw DomainError("lemma_beta_check needs product data (no warp)");
  const bool beta_nonzero = !d.beta.is_zero();

  auto evaluate = [&](const geom::GraphSurface& s) {
    const SurfaceQuantities q = surface_quantities(d, s, grid);
    const OmegaReport o = omega_of_surface(q, grid, 1.0);
    LemmaBetaRow row{};
    row.omega = o.omega;
    row.x_eta_integral = o.x_eta_integral;
    row.area = o.area;
    for (int j = 0; j < grid.size(); ++j)
      if (std::abs(d.beta(grid.node(j))) > tol)
        row.max_slope_on_support =
            std::max(row.max_slope_on_support, std::abs(s.slopes()[static_cast<std::size_t>(j)]));
    return row;
  };

  LemmaBetaReport rep{};
  rep.slice = evaluate(geom::GraphSurface::constant(d.metric, grid, 0.0));
  rep.slice.integral_not_larger = rep.slice.equality_consistent = true;
  rep.holds = true;
  const double scale = std::max(1.0, rep.slice.x_eta_integral);
  for (const geom::GraphSurface& s : graphs) {
    LemmaBetaRow row = evaluate(s);
    const double diff = rep.slice.x_eta_integral - row.x_eta_integral;
    row.integral_not_larger = diff >= -tol * scale;
    const bool flat_on_support = row.max_slope_on_support <= tol;
    const bool equal = std::abs(diff) <= tol * scale;
    row.equality_consistent = !beta_nonzero || (equal == flat_on_support);
    row.omega_check_applies = beta_nonzero && !flat_on_support;
    row.omega_strictly_smaller = row.omega < rep.slice.omega;
    rep.holds = rep.holds && row.integral_not_larger && row.equality_consistent &&
                (!row.omega_check_applies || row.omega_strictly_smaller);
    rep.rows.push_back(row);
  }
  return rep;
}

double omega_of_graph(const ProductData& d, const geom::ThetaGrid& grid,
                      const std::vector<double>& coeffs) {
  std::vector<double> series(coeffs.size() + 1, 0.0);
  std::copy(coeffs.begin(), coeffs.end(), series.begin() + 1);
  const geom::GraphSurface s = geom::GraphSurface::cosine_series(d.metric, grid, series);
  return omega_of_surface(surface_quantities(d, s, grid), grid, 1.0).omega;
}

OmegaMinimum minimize_omega(const ProductData& d, const geom::ThetaGrid& grid, int basis_size,
                            const OmegaSearchOptions& opts) {
  if (basis_size < 1 || basis_size > grid.size() / 4)
    throw DomainError("minimize_omega: basis size must lie in [1, n/4]");

  OmegaMinimum best{};
  best.coeffs.assign(static_cast<std::size_t>(basis_size), 0.0);
  best.omega_slice = omega_of_graph(d, grid, best.coeffs);
  best.omega = best.omega_slice;

  // Compass search; f = 0 is a stationary point of omega (it depends on f'^2),
  // so gradient steps would never leave it.
  double step = opts.initial_step * opts.coef_bound;
  int it = 0;
  while (step > opts.step_tol && it < opts.max_iters) {
    bool improved = false;
    for (std::size_t k = 0; k < best.coeffs.size() && !improved; ++k) {
      for (double dir : {1.0, -1.0}) {
        std::vector<double> trial = best.coeffs;
        trial[k] = std::clamp(trial[k] + dir * step, -opts.coef_bound, opts.coef_bound);
        if (trial[k] == best.coeffs[k]) continue;
        ++it;
        const double w = omega_of_graph(d, grid, trial);
        if (w < best.omega) {
          best.coeffs = std::move(trial);
          best.omega = w;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  best.iterations = it;
  best.converged = step <= opts.step_tol;
  best.slice_is_minimizer = !(best.omega < best.omega_slice);
  return best;
}

}  // namespace mots::init
