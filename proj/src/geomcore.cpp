#include "mots/geomcore.hpp"

#include <Eigen/Dense>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "mots/errors.hpp"

namespace mots::geom {

namespace {

// Horner evaluation of p(x), p'(x), p''(x).
struct PolyJet {
  double v, d1, d2;
};

PolyJet eval_poly(const std::vector<double>& p, double x) {
  PolyJet r{0.0, 0.0, 0.0};
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    r.d2 = r.d2 * x + 2.0 * r.d1;
    r.d1 = r.d1 * x + r.v;
    r.v = r.v * x + *it;
  }
  return r;
}

// Linear coefficient of the interpolant c0 + c1 u + c2 u^2 + c4 u^4 through four
// points, u = distance from the pole.
double pole_slope(const double (&u)[4], const double (&y)[4]) {
  Eigen::Matrix4d A;
  Eigen::Vector4d rhs;
  for (int i = 0; i < 4; ++i) {
    const double v = u[i];
    A.row(i) << 1.0, v, v * v, v * v * v * v;
    rhs[i] = y[i];
  }
  return A.fullPivLu().solve(rhs)[1];
}

}  // namespace

// ---------------------------------------------------------------- ThetaGrid

ThetaGrid::ThetaGrid(int n, AreaRule rule) : n_(n), h_(kPi / n), rule_(rule) {
  if (n < 2) throw DomainError("ThetaGrid needs at least 2 nodes, got " + std::to_string(n));
  const auto un = static_cast<std::size_t>(n);
  nodes_.resize(un);
  weights_.assign(un, h_);
  area_weights_.resize(un);
  for (int j = 0; j < n; ++j) nodes_[static_cast<std::size_t>(j)] = (j + 0.5) * h_;

  if (rule == AreaRule::midpoint) {
    area_weights_ = weights_;
    return;
  }
  // Fejer's first rule on the Chebyshev points x_j = cos(theta_j), then
  // divided by sin(theta_j) so that it acts on integrands in d theta.
  for (int j = 0; j < n; ++j) {
    const double t = nodes_[static_cast<std::size_t>(j)];
    double acc = 0.0;
    for (int k = 1; k <= n / 2; ++k) acc += std::cos(2.0 * k * t) / (4.0 * k * k - 1.0);
    const double v = (2.0 / n) * (1.0 - 2.0 * acc);
    area_weights_[static_cast<std::size_t>(j)] = v / std::sin(t);
  }
}

double ThetaGrid::integrate(std::span<const double> f) const {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += weights_[j] * f[j];
  return s;
}

double ThetaGrid::integrate_pole_vanishing(std::span<const double> f) const {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += area_weights_[j] * f[j];
  return s;
}

// ------------------------------------------------------------ MetricProfile

struct MetricProfile::Table {
  struct SplineDeleter {
    void operator()(gsl_spline* s) const { gsl_spline_free(s); }
  };
  std::vector<double> theta, rho;
  std::unique_ptr<gsl_spline, SplineDeleter> spline;
};

MetricProfile MetricProfile::round() { return sin_poly({1.0}, 1.0).renamed("round"); }

MetricProfile MetricProfile::round_r(double r) {
  if (!(r > 0.0)) throw DomainError("round_r needs r > 0");
  return sin_poly({1.0}, r).renamed("round_r");
}

MetricProfile MetricProfile::regular_poly(std::vector<double> coeffs, double scale) {
  std::vector<double> p(coeffs.size() + 2, 0.0);
  p[0] = 1.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    p[k] += coeffs[k];
    p[k + 2] -= coeffs[k];
  }
  return sin_poly(std::move(p), scale).renamed("poly");
}

MetricProfile MetricProfile::sin_poly(std::vector<double> coeffs, double scale) {
  if (coeffs.empty()) throw DomainError("sin_poly needs at least one coefficient");
  if (!(scale > 0.0)) throw DomainError("profile scale must be positive");
  MetricProfile m;
  m.id_ = "sinpoly";
  m.scale_ = scale;
  m.poly_ = std::move(coeffs);
  return m;
}

MetricProfile MetricProfile::renamed(std::string id) && {
  id_ = std::move(id);
  return std::move(*this);
}

MetricProfile MetricProfile::tabulated(std::vector<double> theta, std::vector<double> rho) {
  if (theta.size() != rho.size()) throw UsageError("tabulated profile: column lengths differ");
  for (std::size_t i = 1; i < theta.size(); ++i)
    if (!(theta[i] > theta[i - 1]))
      throw UsageError("tabulated profile: theta must be strictly increasing (row " +
                       std::to_string(i + 1) + ")");
  if (theta.empty() || theta.front() < 0.0 || theta.back() > kPi + 1e-12)
    throw UsageError("tabulated profile: theta must lie in [0, pi]");
  // One-sided extension to the poles with rho = 0 there.
  if (theta.front() > 0.0) {
    theta.insert(theta.begin(), 0.0);
    rho.insert(rho.begin(), 0.0);
  }
  if (theta.back() < kPi - 1e-12) {
    theta.push_back(kPi);
    rho.push_back(0.0);
  }
  rho.front() = 0.0;
  rho.back() = 0.0;
  if (theta.size() < 4) throw UsageError("tabulated profile: need at least 2 interior samples");

  auto table = std::make_shared<Table>();
  table->theta = std::move(theta);
  table->rho = std::move(rho);
  table->spline.reset(gsl_spline_alloc(gsl_interp_cspline, table->theta.size()));
  gsl_spline_init(table->spline.get(), table->theta.data(), table->rho.data(),
                  table->theta.size());
  MetricProfile m;
  m.id_ = "table";
  m.scale_ = 1.0;
  m.table_ = std::move(table);
  return m;
}

MetricProfile MetricProfile::load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open profile table " + path.string());
  std::vector<double> th, rh;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    if (!(ls >> a)) continue;
    if (!(ls >> b))
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
    th.push_back(a);
    rh.push_back(b);
  }
  return tabulated(std::move(th), std::move(rh));
}

ProfileJet MetricProfile::shape(double theta) const {
  if (table_) {
    const double t = std::clamp(theta, 0.0, kPi);
    const gsl_spline* s = table_->spline.get();
    return {gsl_spline_eval(s, t, nullptr), gsl_spline_eval_deriv(s, t, nullptr),
            gsl_spline_eval_deriv2(s, t, nullptr)};
  }
  const double s = std::sin(theta), c = std::cos(theta);
  const PolyJet p = eval_poly(poly_, c);
  return {s * p.v, c * p.v - s * s * p.d1, -s * p.v - 3.0 * s * c * p.d1 + s * s * s * p.d2};
}

RegularityReport MetricProfile::regularity(double pole_tol) const {
  RegularityReport r{};
  const ProfileJet north = shape(0.0), south = shape(kPi);
  r.drho_north = north.drho;
  r.drho_south = south.drho;
  r.d2rho_north = north.d2rho;
  r.d2rho_south = south.d2rho;
  if (table_) {
    r.d4rho_north = r.d4rho_south = std::numeric_limits<double>::quiet_NaN();
  } else {
    constexpr double d = 1e-3;
    auto d4 = [&](double t0) {
      return (shape(t0 + d).d2rho - 2.0 * shape(t0).d2rho + shape(t0 - d).d2rho) / (d * d);
    };
    r.d4rho_north = d4(0.0);
    r.d4rho_south = d4(kPi);
  }
  r.min_interior_rho = std::numeric_limits<double>::infinity();
  constexpr int samples = 2048;
  for (int i = 1; i < samples; ++i)
    r.min_interior_rho = std::min(r.min_interior_rho, shape(kPi * i / samples).rho);

  std::ostringstream msg;
  if (std::abs(r.drho_north - 1.0) > pole_tol)
    msg << "rho'(0) = " << r.drho_north << " (expected 1); ";
  if (std::abs(r.drho_south + 1.0) > pole_tol)
    msg << "rho'(pi) = " << r.drho_south << " (expected -1); ";
  if (std::abs(r.d2rho_north) > pole_tol || std::abs(r.d2rho_south) > pole_tol)
    msg << "rho'' does not vanish at a pole; ";
  if (!table_ && (std::abs(r.d4rho_north) > pole_tol || std::abs(r.d4rho_south) > pole_tol))
    msg << "rho'''' does not vanish at a pole; ";
  if (!(r.min_interior_rho > 0.0)) msg << "rho is not positive on (0, pi); ";
  r.message = msg.str();
  r.regular = r.message.empty();
  return r;
}

void MetricProfile::validate(double pole_tol) const {
  const RegularityReport r = regularity(pole_tol);
  if (!r.regular) throw DomainError("profile '" + id_ + "' is not a smooth metric on S^2: " + r.message);
}

MetricProfile make_profile(const std::string& id, const std::vector<double>& params) {
  if (id == "round") {
    if (!params.empty()) throw UsageError("preset 'round' takes no parameters");
    return MetricProfile::round();
  }
  if (id == "round_r") {
    if (params.size() != 1) throw UsageError("preset 'round_r' takes exactly one parameter r");
    return MetricProfile::round_r(params[0]);
  }
  if (id == "poly") return MetricProfile::regular_poly(params);
  if (id == "sinpoly") return MetricProfile::sin_poly(params);
  throw UsageError("unknown profile preset '" + id + "' (known: round, round_r, poly, sinpoly)");
}

Field gaussian_curvature(const MetricProfile& m, const ThetaGrid& grid) {
  Field kappa(static_cast<std::size_t>(grid.size()));
  const double r2 = m.scale() * m.scale();
  for (int j = 0; j < grid.size(); ++j) {
    const ProfileJet p = m.shape(grid.node(j));
    const double k = -p.d2rho / (r2 * p.rho);
    if (!std::isfinite(k)) {
      std::ostringstream msg;
      msg << "gaussian_curvature: non-finite value at node " << j << " (theta = " << grid.node(j)
          << "); use an analytic preset or a finer table";
      throw NumericalFailure(msg.str());
    }
    kappa[static_cast<std::size_t>(j)] = k;
  }
  return kappa;
}

double area(const MetricProfile& m, const ThetaGrid& grid) {
  if (grid.size() < 8) throw DomainError("area: grid resolution must be at least 8");
  Field dens(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j) dens[static_cast<std::size_t>(j)] = m.area_density(grid.node(j));
  return kTwoPi * grid.integrate_pole_vanishing(dens);
}

double gauss_bonnet_defect(const MetricProfile& m, const ThetaGrid& grid) {
  const Field kappa = gaussian_curvature(m, grid);
  Field integrand(kappa.size());
  for (int j = 0; j < grid.size(); ++j) {
    const auto uj = static_cast<std::size_t>(j);
    integrand[uj] = kappa[uj] * m.area_density(grid.node(j));
  }
  return kTwoPi * grid.integrate_pole_vanishing(integrand) - 4.0 * kPi;
}

// ------------------------------------------------------------- GraphSurface

GraphSurface::GraphSurface(MetricProfile base, Field f, Field df, Field d2f)
    : base_(std::move(base)), f_(std::move(f)), df_(std::move(df)), d2f_(std::move(d2f)) {}

GraphSurface GraphSurface::constant(const MetricProfile& base, const ThetaGrid& grid, double c) {
  const auto n = static_cast<std::size_t>(grid.size());
  return GraphSurface(base, Field(n, c), Field(n, 0.0), Field(n, 0.0));
}

GraphSurface GraphSurface::cosine_series(const MetricProfile& base, const ThetaGrid& grid,
                                         const std::vector<double>& coeffs) {
  const auto n = static_cast<std::size_t>(grid.size());
  Field f(n, 0.0), df(n, 0.0), d2f(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = grid.nodes()[j];
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      const double kk = static_cast<double>(k);
      f[j] += coeffs[k] * std::cos(kk * t);
      df[j] -= coeffs[k] * kk * std::sin(kk * t);
      d2f[j] -= coeffs[k] * kk * kk * std::cos(kk * t);
    }
  }
  return GraphSurface(base, std::move(f), std::move(df), std::move(d2f));
}

GraphSurface GraphSurface::from_samples(const MetricProfile& base, const ThetaGrid& grid, Field f,
                                        bool validate, double pole_tol) {
  const int n = grid.size();
  if (static_cast<int>(f.size()) != n) throw UsageError("graph samples do not match the grid");
  const double h = grid.spacing();
  Field df(f.size()), d2f(f.size());
  for (int j = 0; j < n; ++j) {
    const double fm = f[static_cast<std::size_t>(j == 0 ? 0 : j - 1)];
    const double fp = f[static_cast<std::size_t>(j == n - 1 ? n - 1 : j + 1)];
    const double fc = f[static_cast<std::size_t>(j)];
    if (!std::isfinite(fc)) throw DomainError("graph height is not finite at node " + std::to_string(j));
    df[static_cast<std::size_t>(j)] = (fp - fm) / (2.0 * h);
    d2f[static_cast<std::size_t>(j)] = (fp - 2.0 * fc + fm) / (h * h);
  }
  GraphSurface s(base, std::move(f), std::move(df), std::move(d2f));
  if (validate && n >= 3) {
    const auto [north, south] = s.pole_slopes(grid);
    double scale = 1.0;
    for (double v : s.f_) scale = std::max(scale, std::abs(v));
    if (std::abs(north) > pole_tol * scale || std::abs(south) > pole_tol * scale) {
      std::ostringstream msg;
      msg << "graph is not regular at the poles: f'(0) ~ " << north << ", f'(pi) ~ " << south;
      throw DomainError(msg.str());
    }
  }
  return s;
}

bool GraphSurface::is_slice(double tol) const {
  return std::all_of(df_.begin(), df_.end(), [tol](double v) { return std::abs(v) <= tol; }) &&
         std::all_of(f_.begin(), f_.end(), [&](double v) { return std::abs(v - f_.front()) <= tol; });
}

std::pair<double, double> GraphSurface::pole_slopes(const ThetaGrid& grid) const {
  if (grid.size() < 8) throw DomainError("pole slope estimates need at least 8 nodes");
  const auto n = static_cast<std::size_t>(grid.size());
  double u[4], yn[4], ys[4];
  for (std::size_t i = 0; i < 4; ++i) {
    u[i] = grid.nodes()[i];
    yn[i] = f_[i];
    ys[i] = f_[n - 1 - i];
  }
  return {pole_slope(u, yn), -pole_slope(u, ys)};
}

Field graph_area_element(const GraphSurface& s, const ThetaGrid& grid) {
  const MetricProfile& m = s.base();
  const double r = m.scale();
  Field dens(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const double fp = s.slopes()[uj];
    dens[uj] = std::sqrt(r * r + fp * fp) * r * m.shape(grid.node(j)).rho;
  }
  return dens;
}

}  // namespace mots::geom
