#include "mots/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mots/config.hpp"
#include "mots/errors.hpp"
#include "mots/foliation.hpp"
#include "mots/geomcore.hpp"
#include "mots/initdata.hpp"
#include "mots/nariai.hpp"
#include "mots/output.hpp"
#include "mots/stability.hpp"

namespace mots::cli {

namespace {

using out::Json;
using out::num;
using out::nums;

enum class Format { json, csv };

struct Sink {
  std::ostream& stream;
  std::ofstream file;
  explicit Sink(std::ostream& fallback, const std::string& path) : stream(path.empty() ? fallback : file) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw UsageError("cannot open output file '" + path + "'");
    }
  }
};

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 2) throw UsageError("--steps must be at least 2");
  if (!(hi > lo)) throw UsageError("--a-max must exceed --a-min");
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
  return v;
}

Field nodes_of(const geom::ThetaGrid& g) { return Field(g.nodes().begin(), g.nodes().end()); }

// -------------------------------------------------------------------- nariai

Json nariai_json(const nariai::NariaiReport& r) {
  Json j;
  j["a_over_ell"] = num(r.eps);
  j["ell"] = num(r.ell);
  j["Lambda"] = num(r.Lambda);
  j["rc2"] = num(r.rc2);
  j["area"] = num(r.area);
  j["omega"] = num(r.omega);
  j["omega_definitional"] = num(r.omega_definitional);
  j["bound"] = num(r.bound);
  j["gap"] = num(r.gap);
  j["a_max_over_ell"] = num(nariai::a_max(1.0));
  j["quad_n"] = r.quad_n;
  j["refinement_delta"] = num(r.refinement_delta);
  j["units"] = "powers of ell";
  return j;
}

int nariai_point(double a, double ell, int quad_n, Format f, const std::string& path, std::ostream& os) {
  if (!(ell > 0.0)) throw DomainError("--ell must be positive");
  nariai::NariaiReport r = nariai::nariai_point(a / ell, 1.0, quad_n);
  r.ell = ell;
  Sink sink(os, path);
  if (f == Format::json) {
    out::write_json(sink.stream, nariai_json(r));
  } else {
    out::write_csv(sink.stream, {"a_over_ell", "rc2", "area", "omega", "bound", "gap"},
                   {{r.eps, r.rc2, r.area, r.omega, r.bound, r.gap}});
  }
  return kOk;
}

int nariai_sweep(double a_min, double a_max, int steps, double ell, int quad_n,
                 const std::string& path, std::ostream& os) {
  if (!(ell > 0.0)) throw DomainError("--ell must be positive");
  std::vector<double> eps = linspace(a_min / ell, a_max / ell, steps);
  const auto rows = nariai::sweep(eps, 1.0, quad_n);
  std::vector<std::vector<double>> table;
  for (const auto& r : rows)
    table.push_back({r.a_over_ell, r.rc2, r.area, r.omega, r.bound, r.gap, r.gap_over_eps4});
  Sink sink(os, path);
  out::write_csv(sink.stream, {"a_over_ell", "rc2", "area", "omega", "bound", "gap", "gap_over_eps4"},
                 table);
  return kOk;
}

int nariai_expand(double a_min, double a_max, int steps, int quad_n, bool plot,
                  const std::string& path, std::ostream& os) {
  const std::vector<double> eps = linspace(a_min, a_max, steps);
  std::vector<nariai::EpsExpansion> xs;
  std::vector<double> gaps;
  double c_area = 0.0, c_bound = 0.0;
  for (double e : eps) {
    xs.push_back(nariai::eps_expansion(e, 1.0, quad_n));
    const auto& x = xs.back();
    gaps.push_back(x.bound - x.area);
    const double e4 = e * e * e * e;
    c_area = std::max(c_area, std::abs(x.area - x.common_trunc) / e4);
    c_bound = std::max(c_bound, std::abs(x.bound - x.common_trunc) / e4);
  }
  Sink sink(os, path);
  if (plot) {
    std::vector<std::vector<double>> rows;
    for (const auto& x : xs)
      rows.push_back({x.eps, x.rc2, x.rc2_trunc, x.a2_over_rc2, x.a2_over_rc2_trunc, x.omega,
                      x.omega_trunc, x.area, x.bound, x.common_trunc});
    out::write_csv(sink.stream,
                   {"eps", "rc2", "rc2_trunc", "a2_over_rc2", "a2_over_rc2_trunc", "omega",
                    "omega_trunc", "area", "bound", "common_trunc"},
                   rows);
    return kOk;
  }
  Json j;
  j["eps_min"] = num(eps.front());
  j["eps_max"] = num(eps.back());
  j["gap_loglog_slope"] = num(nariai::loglog_slope(eps, gaps));
  j["area_trunc_coefficient"] = num(c_area);
  j["bound_trunc_coefficient"] = num(c_bound);
  j["rc2_eps4_coefficient"] = num(xs.front().rc2_eps4_coefficient);
  Json rows = Json::array();
  for (const auto& x : xs) {
    Json r;
    r["eps"] = num(x.eps);
    r["in_window"] = x.in_window;
    r["rc2"] = num(x.rc2);
    r["rc2_trunc"] = num(x.rc2_trunc);
    r["a2_over_rc2"] = num(x.a2_over_rc2);
    r["a2_over_rc2_trunc"] = num(x.a2_over_rc2_trunc);
    r["omega"] = num(x.omega);
    r["omega_trunc"] = num(x.omega_trunc);
    r["area"] = num(x.area);
    r["bound"] = num(x.bound);
    r["common_trunc"] = num(x.common_trunc);
    rows.push_back(r);
  }
  j["rows"] = rows;
  out::write_json(sink.stream, j);
  return kOk;
}

// ------------------------------------------------------------------ models

cfg::ModelConfig load(const std::string& path) { return cfg::load_config(path); }

/// Slice height of a config surface; graphs with nonconstant f are rejected.
double slice_height(const cfg::ModelConfig& c) {
  for (std::size_t k = 1; k < c.surface_f.size(); ++k)
    if (c.surface_f[k] != 0.0)
      throw UsageError("this command needs a slice surface (only the constant term of f)");
  return c.surface_f.empty() ? 0.0 : c.surface_f.front();
}

geom::GraphSurface surface_of(const cfg::ModelConfig& c, const geom::ThetaGrid& g) {
  std::vector<double> f = c.surface_f;
  if (f.empty()) f.push_back(0.0);
  return geom::GraphSurface::cosine_series(c.data.metric, g, f);
}

Json eigen_json(const stab::EigenResult& r) {
  Json j;
  j["lambda1"] = num(r.lambda1);
  j["lambda1_adjoint"] = num(r.lambda1_adjoint);
  j["lambda1_symmetrized"] = num(r.lambda1_symmetrized);
  j["per_mode_min_re"] = nums(r.per_mode_min_re);
  j["lemma1_margin"] = num(r.lemma1_margin);
  j["near_degenerate"] = r.near_degenerate;
  j["spectral_tol"] = num(r.spectral_tol);
  j["n"] = r.n;
  j["m_max"] = r.m_max;
  return j;
}

int eig(const std::string& preset, const std::string& config, int n_opt, int m_max_opt, double c,
        double r, const std::vector<double>& coeffs, bool plot, std::ostream& os) {
  if (preset.empty() == config.empty()) throw UsageError("eig needs exactly one of --preset, --config");
  stab::EigenOptions eo;
  std::optional<stab::StabilityProblem> p;
  if (!config.empty()) {
    const cfg::ModelConfig mc = load(config);
    const int n = n_opt > 0 ? n_opt : mc.solver.n;
    const int m_max = m_max_opt >= 0 ? m_max_opt : mc.solver.m_max;
    cfg::check_resolution(n);
    eo.spectral_tol_rel = mc.solver.spectral_tol;
    p = stab::StabilityProblem::from_slice(mc.data, slice_height(mc), geom::ThetaGrid(n), m_max);
  } else {
    const int n = n_opt > 0 ? n_opt : 256;
    cfg::check_resolution(n);
    std::vector<double> params = coeffs;
    if (preset == "round_r") params = {r};
    const geom::MetricProfile m = geom::make_profile(preset, params);
    m.validate();
    const geom::ThetaGrid g(n);
    Field Q = geom::gaussian_curvature(m, g);
    for (double& q : Q) q -= c;
    p = stab::StabilityProblem::on_profile(m, g, std::move(Q), {}, {}, m_max_opt >= 0 ? m_max_opt : 8);
  }
  const stab::EigenResult res = stab::principal_eigenpair(*p, eo);
  if (plot) {
    out::write_columns(os, {"theta", "u"}, {nodes_of(p->grid), res.u});
  } else {
    out::write_json(os, eigen_json(res));
  }
  return kOk;
}

double energy_bound(const cfg::ModelConfig& mc, double c_opt, const init::SurfaceQuantities& q) {
  if (!std::isnan(c_opt)) return c_opt;
  if (mc.c) return *mc.c;
  return *std::min_element(q.mu_plus_J_nu.begin(), q.mu_plus_J_nu.end());
}

Json omega_json(const init::OmegaReport& o, int n) {
  Json j;
  j["omega"] = num(o.omega);
  j["area"] = num(o.area);
  j["komar"] = num(o.komar);
  j["bound"] = num(o.bound);
  j["c"] = num(o.c);
  j["x_eta_integral"] = num(o.x_eta_integral);
  j["n"] = n;
  return j;
}

int omega(const std::string& config, double c_opt, int n_opt, bool plot, std::ostream& os) {
  const cfg::ModelConfig mc = load(config);
  const int n = n_opt > 0 ? n_opt : mc.solver.n;
  cfg::check_resolution(n);
  const geom::ThetaGrid g(n);
  const init::SurfaceQuantities q = init::surface_quantities(mc.data, surface_of(mc, g), g);
  if (plot) {
    out::write_columns(os,
                       {"theta", "theta_plus", "theta_minus", "tr_sigma_K", "H", "chi_plus_norm2",
                        "chi_minus_norm2", "X_theta", "X_phi", "X_eta_norm2", "X_norm2", "K_nu_eta",
                        "mu_plus_J_nu", "tau", "density"},
                       {nodes_of(g), q.theta_plus, q.theta_minus, q.tr_sigma_K, q.H,
                        q.chi_plus_norm2, q.chi_minus_norm2, q.X_theta, q.X_phi, q.X_eta_norm2,
                        q.X_norm2, q.K_nu_eta, q.mu_plus_J_nu, q.tau, q.density});
    return kOk;
  }
  out::write_json(os, omega_json(init::omega_of_surface(q, g, energy_bound(mc, c_opt, q)), n));
  return kOk;
}

// ---------------------------------------------------------------- foliation

int foliate(const std::string& config, double s_max, int leaves, int n_opt, const std::string& dir,
            bool plot, std::ostream& os) {
  const cfg::ModelConfig mc = load(config);
  const int n = n_opt > 0 ? n_opt : mc.solver.n;
  cfg::check_resolution(n);
  const geom::ThetaGrid g(n);
  fol::FoliationOptions fo;
  fo.newton_tol = mc.solver.newton_tol;
  fo.max_iters = mc.solver.max_iters;
  fo.f_bound = mc.solver.f_bound;
  const fol::FoliationChart chart = fol::build_chart(mc.data, s_max, leaves, g, fo, mc.weakly_outermost);

  if (plot) {
    std::vector<std::string> header{"theta"};
    std::vector<std::vector<double>> cols{nodes_of(g)};
    for (std::size_t i = 0; i < chart.leaves.size(); ++i) {
      header.push_back("f_" + std::to_string(i));
      cols.push_back(chart.leaves[i].f);
    }
    out::write_columns(os, header, cols);
    return kOk;
  }

  Json j;
  j["n"] = n;
  j["s_max"] = num(s_max);
  j["min_gap"] = num(chart.min_gap);
  j["weakly_outermost_claimed"] = chart.weakly_outermost_claimed;
  j["weakly_outermost_contradiction"] = chart.weakly_outermost_contradiction;
  Json ls = Json::array();
  for (const auto& l : chart.leaves) {
    Json e;
    e["s"] = num(l.s);
    e["k"] = num(l.k);
    e["residual"] = num(l.residual);
    e["mean_error"] = num(l.mean_error);
    e["area"] = num(l.area);
    e["newton_iters"] = l.newton_iters;
    e["min_singular_value"] = num(l.min_singular_value);
    e["residual_history"] = nums(l.residual_history);
    ls.push_back(e);
  }
  j["leaves"] = ls;
  if (chart.weakly_outermost_contradiction)
    j["note"] = "k(s) < 0 for some s > 0: outer trapped leaves contradict the weakly outermost claim";

  if (!dir.empty()) {
    std::filesystem::create_directories(dir);
    std::ofstream cj(std::filesystem::path(dir) / "chart.json");
    if (!cj) throw UsageError("cannot write into output directory '" + dir + "'");
    out::write_json(cj, j);
    for (std::size_t i = 0; i < chart.leaves.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "leaf_%03zu.csv", i);
      std::ofstream lf(std::filesystem::path(dir) / name);
      std::vector<std::string> header{"theta", "f"};
      std::vector<std::vector<double>> cols{nodes_of(g), chart.leaves[i].f};
      if (i < chart.lapse.size()) {
        header.push_back("lapse");
        header.push_back("normalized_lapse");
        cols.push_back(chart.lapse[i]);
        cols.push_back(chart.normalized_lapse[i]);
      }
      out::write_columns(lf, header, cols);
    }
  }
  out::write_json(os, j);
  return kOk;
}

// ------------------------------------------------------------------ verify

int verify_rigidity(const std::string& config, int n_opt, std::ostream& os, std::ostream& err) {
  const cfg::ModelConfig mc = load(config);
  const int n = n_opt > 0 ? n_opt : mc.solver.n;
  cfg::check_resolution(n);
  const geom::ThetaGrid g(n);
  const double t0 = slice_height(mc);
  const init::SurfaceQuantities q =
      init::surface_quantities(mc.data, geom::GraphSurface::constant(mc.data.metric, g, t0), g);
  const double c = energy_bound(mc, NAN, q);
  if (!(c > 0.0)) throw DomainError("verify rigidity needs mu + J(nu) >= c > 0 on the surface");
  const init::OmegaReport o = init::omega_of_surface(q, g, c);

  stab::StabilityProblem p = stab::StabilityProblem::from_slice(mc.data, t0, g, 0);
  stab::EigenOptions eo;
  eo.spectral_tol_rel = mc.solver.spectral_tol;
  const stab::EigenResult er = stab::principal_eigenpair(p, eo);
  const bool stable = er.lambda1 >= -er.spectral_tol;

  double hyp = HUGE_VAL, chi = 0.0, gauss = 0.0, energy = 0.0;
  for (int j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const double kappa = init::ambient(mc.data, t0, g.node(j)).kappa_level;
    hyp = std::min(hyp, q.mu_plus_J_nu[uj] - c);
    chi = std::max(chi, std::sqrt(q.chi_plus_norm2[uj]));
    gauss = std::max(gauss, std::abs(kappa - c - q.X_eta_norm2[uj]));
    energy = std::max(energy, std::abs(q.mu_plus_J_nu[uj] - c));
  }
  const double tol = 1e-10 * std::max(1.0, o.bound);
  const bool equality = std::abs(o.area - o.bound) <= tol;

  Json j;
  j["n"] = n;
  j["c"] = num(c);
  j["area"] = num(o.area);
  j["omega"] = num(o.omega);
  j["bound"] = num(o.bound);
  j["area_minus_bound"] = num(o.area - o.bound);
  j["lambda1"] = num(er.lambda1);
  j["stable"] = stable;
  j["hypothesis_margin"] = num(hyp);
  j["equality"] = equality;
  j["chi_plus_max"] = num(chi);
  j["gauss_curvature_defect"] = num(gauss);
  j["energy_defect"] = num(energy);
  bool consistent = true;
  if (stable && hyp >= -1e-10) {
    const stab::InequalityReport ir = stab::stability_inequality_check(p, {Field(g.size(), 1.0)});
    j["inequality_slack_constant"] = num(ir.rows.front().rhs - ir.rows.front().lhs);
    consistent = o.area <= o.bound + tol;
    if (equality) {
      const bool c1 = chi <= 1e-8, c2 = gauss <= 1e-8, c3 = energy <= 1e-8,
                 c4 = std::abs(er.lambda1) <= 1e-6;
      j["conclusion_chi_plus_zero"] = c1;
      j["conclusion_gauss_curvature"] = c2;
      j["conclusion_energy"] = c3;
      j["conclusion_lambda1_zero"] = c4;
      consistent = consistent && c1 && c2 && c3 && c4;
    }
  } else {
    j["note"] = "hypotheses (stability, mu + J(nu) >= c) not met; conclusions not applicable";
  }
  j["consistent"] = consistent;
  out::write_json(os, j);
  if (!consistent) {
    err << "verify rigidity: the equality case does not reproduce the rigidity conclusions\n";
    return kNumericalFailure;
  }
  return kOk;
}

int verify_lemma_beta(const std::string& config, int basis_opt, int n_opt, std::ostream& os,
                      std::ostream& err) {
  const cfg::ModelConfig mc = load(config);
  const int n = n_opt > 0 ? n_opt : mc.solver.n;
  cfg::check_resolution(n);
  const int basis = basis_opt > 0 ? basis_opt : mc.solver.basis;
  const geom::ThetaGrid g(n);

  std::vector<geom::GraphSurface> family;
  std::vector<std::string> labels;
  family.push_back(geom::GraphSurface::constant(mc.data.metric, g, 0.3));
  labels.push_back("0.3");
  for (int k = 1; k <= basis; ++k)
    for (double delta : {0.1, 0.5}) {
      std::vector<double> coef(static_cast<std::size_t>(k + 1), 0.0);
      coef.back() = delta;
      family.push_back(geom::GraphSurface::cosine_series(mc.data.metric, g, coef));
      std::ostringstream l;
      l << delta << " cos(" << k << " theta)";
      labels.push_back(l.str());
    }
  const init::LemmaBetaReport rep = init::lemma_beta_check(mc.data, family, g);
  const init::OmegaReport o0 = init::omega_of_surface(
      init::surface_quantities(mc.data, geom::GraphSurface::constant(mc.data.metric, g, 0.0), g), g,
      1.0);
  init::OmegaSearchOptions so;
  so.coef_bound = mc.solver.coef_bound;
  const init::OmegaMinimum mn = init::minimize_omega(mc.data, g, basis, so);

  Json j;
  j["n"] = n;
  j["basis"] = basis;
  j["omega_slice"] = num(rep.slice.omega);
  j["komar_slice"] = num(o0.komar);
  j["x_eta_integral_slice"] = num(rep.slice.x_eta_integral);
  Json rows = Json::array();
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    Json e;
    e["f"] = labels[i];
    e["omega"] = num(r.omega);
    e["x_eta_integral"] = num(r.x_eta_integral);
    e["integral_not_larger"] = r.integral_not_larger;
    e["equality_consistent"] = r.equality_consistent;
    e["omega_strictly_smaller"] = r.omega_strictly_smaller;
    rows.push_back(e);
  }
  j["graphs"] = rows;
  j["holds"] = rep.holds;
  Json m;
  m["coeffs"] = nums(mn.coeffs);
  m["omega"] = num(mn.omega);
  m["omega_slice"] = num(mn.omega_slice);
  m["decrease"] = num(mn.omega_slice - mn.omega);
  m["iterations"] = mn.iterations;
  m["converged"] = mn.converged;
  m["slice_is_minimizer"] = mn.slice_is_minimizer;
  j["minimizer"] = m;
  out::write_json(os, j);
  if (!rep.holds) {
    err << "verify lemma-beta: the graph comparison failed\n";
    return kNumericalFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------- dispatch

int dispatch(std::vector<std::string> args, bool plot, std::ostream& os, std::ostream& err) {
  CLI::App app{"motskit: axisymmetric MOTS stability, area bounds and rotating Nariai"};
  app.name("motskit");
  app.require_subcommand(1);

  // nariai
  auto* nar = app.add_subcommand("nariai", "rotating Nariai slice")->require_subcommand(1);
  double a = 0, ell = 1, a_min = 0, a_max = 0;
  int quad_n = nariai::kDefaultQuadN, steps = 0;
  bool as_json = false, as_csv = false;
  std::string out_path;
  auto* point = nar->add_subcommand("point", "area, omega and bound at one rotation parameter");
  point->add_option("--a", a, "rotation parameter")->required();
  point->add_option("--ell", ell, "scale factor");
  point->add_option("--quad-n", quad_n, "Gauss-Legendre nodes")->check(CLI::Range(32, 8192));
  auto* jf = point->add_flag("--json", as_json, "JSON output (default)");
  point->add_flag("--csv", as_csv, "CSV output")->excludes(jf);
  point->add_option("--out", out_path, "output file");
  auto* sw = nar->add_subcommand("sweep", "table over evenly spaced rotation parameters");
  sw->add_option("--a-min", a_min)->required();
  sw->add_option("--a-max", a_max)->required();
  sw->add_option("--steps", steps)->required();
  sw->add_option("--ell", ell);
  sw->add_option("--quad-n", quad_n)->check(CLI::Range(32, 8192));
  sw->add_option("--out", out_path);
  auto* ex = nar->add_subcommand("expand", "eps-expansions and the order of the gap (ell = 1)");
  ex->add_option("--a-min", a_min)->required();
  ex->add_option("--a-max", a_max)->required();
  ex->add_option("--steps", steps)->required();
  ex->add_option("--quad-n", quad_n)->check(CLI::Range(32, 8192));
  ex->add_option("--out", out_path);

  // eig
  std::string preset, config;
  int n = -1, m_max = -1;
  double c = 0.0, r = 1.0;
  std::vector<double> coeffs;
  auto* eg = app.add_subcommand("eig", "principal eigenpair of the stability operator");
  auto* po = eg->add_option("--preset", preset, "round | round_r | poly | sinpoly (X = 0, Q = kappa - c)");
  eg->add_option("--config", config, "model file (slice t = f)")->excludes(po);
  eg->add_option("--n", n)->check(CLI::Range(8, 4096));
  eg->add_option("--m-max", m_max)->check(CLI::Range(0, 64));
  eg->add_flag("--json", as_json, "JSON output (default)");
  eg->add_option("--c", c, "energy bound for presets");
  eg->add_option("--r", r, "radius for round_r");
  eg->add_option("--coeffs", coeffs, "preset coefficients")->delimiter(',');

  // omega
  double c_opt = NAN;
  auto* om = app.add_subcommand("omega", "omega, Komar integral and area bound of a surface");
  om->add_option("--config", config)->required();
  om->add_option("--c", c_opt);
  om->add_option("--n", n)->check(CLI::Range(8, 4096));

  // foliate
  double s_max = 0.0;
  int leaves = 0;
  std::string dir;
  auto* fo = app.add_subcommand("foliate", "leaves of constant null expansion near the slice t = 0");
  fo->add_option("--config", config)->required();
  fo->add_option("--s-max", s_max)->required();
  fo->add_option("--leaves", leaves)->required()->check(CLI::Range(1, 1000));
  fo->add_option("--n", n)->check(CLI::Range(8, 4096));
  fo->add_option("--out", dir, "directory for chart.json and per-leaf CSV");

  // verify
  int basis = -1;
  auto* ve = app.add_subcommand("verify", "consistency batteries on model data")->require_subcommand(1);
  auto* rig = ve->add_subcommand("rigidity", "area bound equality case and its conclusions");
  rig->add_option("--config", config)->required();
  rig->add_option("--n", n)->check(CLI::Range(8, 4096));
  auto* lb = ve->add_subcommand("lemma-beta", "graphs over the slice versus the slice");
  lb->add_option("--config", config)->required();
  lb->add_option("--basis", basis)->check(CLI::Range(1, 64));
  lb->add_option("--n", n)->check(CLI::Range(8, 4096));

  auto* pd = app.add_subcommand("plotdata", "run any command with columnar CSV output")->prefix_command();

  std::vector<const char*> argv{"motskit"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    os << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    os << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "motskit: " << e.what() << '\n';
    return kUsageError;
  }

  if (*pd) {
    if (plot) throw UsageError("plotdata cannot be nested");
    std::vector<std::string> rest = pd->remaining();
    if (rest.empty()) throw UsageError("plotdata needs a command to run");
    return dispatch(rest, true, os, err);
  }
  if (*point) return nariai_point(a, ell, quad_n, as_csv || plot ? Format::csv : Format::json, out_path, os);
  if (*sw) return nariai_sweep(a_min, a_max, steps, ell, quad_n, out_path, os);
  if (*ex) return nariai_expand(a_min, a_max, steps, quad_n, plot, out_path, os);
  if (*eg) return eig(preset, config, n, m_max, c, r, coeffs, plot, os);
  if (*om) return omega(config, c_opt, n, plot, os);
  if (*fo) return foliate(config, s_max, leaves, n, dir, plot, os);
  if (*rig) return verify_rigidity(config, n, os, err);
  if (*lb) return verify_lemma_beta(config, basis, n, os, err);
  throw UsageError("no command given");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    return dispatch(args, false, out, err);
  } catch (const UsageError& e) {
    err << "motskit: usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DomainError& e) {
    err << "motskit: domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const NumericalFailure& e) {
    err << "motskit: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "motskit: error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace mots::cli
