#include "mots/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mots/errors.hpp"

namespace mots::cfg {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"metric", {"preset", "scale", "coeffs", "file"}},
      {"extrinsic", {"alpha", "beta", "warp"}},
      {"surface", {"f", "c"}},
      {"solver",
       {"n", "m_max", "quad_n", "newton_tol", "max_iters", "spectral_tol", "coef_bound", "basis",
        "f_bound"}},
      {"model", {"weakly_outermost"}},
  };
  return keys;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config: " + key + " expects a number, got '" + text + "'");
  }
}

int to_int(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config: " + key + " expects an integer, got '" + text + "'");
  }
}

bool to_bool(const std::string& key, std::string text) {
  boost::algorithm::to_lower(text);
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw UsageError("config: " + key + " expects true or false, got '" + text + "'");
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::vector<std::string> parts;
  const std::string trimmed = boost::algorithm::trim_copy(text);
  if (trimmed.empty()) return out;
  boost::algorithm::split(parts, trimmed, boost::is_any_of(", "), boost::token_compress_on);
  for (const std::string& p : parts) out.push_back(to_double("list entry", p));
  return out;
}

std::vector<init::Term> parse_terms(const std::string& text) {
  std::vector<init::Term> out;
  std::vector<std::string> parts;
  const std::string trimmed = boost::algorithm::trim_copy(text);
  if (trimmed.empty()) return out;
  boost::algorithm::split(parts, trimmed, boost::is_any_of(", "), boost::token_compress_on);
  for (const std::string& p : parts) {
    std::vector<std::string> f;
    boost::algorithm::split(f, p, boost::is_any_of(":"));
    if (f.size() != 3) throw UsageError("config: term '" + p + "' is not coef:p:q");
    const int a = to_int("term power", f[1]), b = to_int("term power", f[2]);
    if (a < 0 || b < 0) throw UsageError("config: term '" + p + "' has a negative power");
    out.push_back({to_double("term coefficient", f[0]), a, b});
  }
  return out;
}

void check_resolution(int n) {
  if (n < 8 || n > 4096)
    throw UsageError("grid resolution n = " + std::to_string(n) + " outside [8, 4096]");
}

ModelConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }

  for (const auto& [section, body] : tree) {
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end() || body.data().size() > 0)
      throw UsageError("config: unknown section or top-level key '" + section + "'");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key))
        throw UsageError("config: unknown key '" + key + "' in [" + section + "]");
      (void)value;
    }
  }

  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.')))
      return boost::algorithm::trim_copy(*v);
    return std::nullopt;
  };

  ModelConfig c;
  const std::string preset = get("metric.preset").value_or("round");
  const double scale = get("metric.scale") ? to_double("metric.scale", *get("metric.scale")) : 1.0;
  const std::vector<double> coeffs =
      get("metric.coeffs") ? parse_list(*get("metric.coeffs")) : std::vector<double>{};
  if (!(scale > 0.0)) throw UsageError("config: metric.scale must be positive");
  if (preset == "round") {
    c.data.metric = scale == 1.0 ? geom::MetricProfile::round() : geom::MetricProfile::round_r(scale);
  } else if (preset == "round_r") {
    c.data.metric = geom::MetricProfile::round_r(scale);
  } else if (preset == "poly") {
    c.data.metric = geom::MetricProfile::regular_poly(coeffs, scale);
  } else if (preset == "sinpoly") {
    c.data.metric = geom::MetricProfile::sin_poly(coeffs, scale);
  } else if (preset == "table") {
    const auto file = get("metric.file");
    if (!file) throw UsageError("config: preset 'table' needs metric.file");
    std::filesystem::path p(*file);
    if (p.is_relative()) p = base_dir / p;
    c.data.metric = geom::MetricProfile::load_table(p);
  } else {
    throw UsageError("config: unknown metric preset '" + preset + "'");
  }

  if (auto v = get("extrinsic.alpha")) c.data.alpha = init::Polynomial(parse_list(*v));
  if (auto v = get("extrinsic.beta")) c.data.beta = init::TrigPoly(parse_terms(*v));
  if (auto v = get("extrinsic.warp")) c.data.warp = init::Warp(parse_terms(*v));
  if (auto v = get("surface.f")) c.surface_f = parse_list(*v);
  if (auto v = get("surface.c")) c.c = to_double("surface.c", *v);

  SolverSettings& s = c.solver;
  if (auto v = get("solver.n")) s.n = to_int("solver.n", *v);
  if (auto v = get("solver.m_max")) s.m_max = to_int("solver.m_max", *v);
  if (auto v = get("solver.quad_n")) s.quad_n = to_int("solver.quad_n", *v);
  if (auto v = get("solver.newton_tol")) s.newton_tol = to_double("solver.newton_tol", *v);
  if (auto v = get("solver.max_iters")) s.max_iters = to_int("solver.max_iters", *v);
  if (auto v = get("solver.spectral_tol")) s.spectral_tol = to_double("solver.spectral_tol", *v);
  if (auto v = get("solver.coef_bound")) s.coef_bound = to_double("solver.coef_bound", *v);
  if (auto v = get("solver.basis")) s.basis = to_int("solver.basis", *v);
  if (auto v = get("solver.f_bound")) s.f_bound = to_double("solver.f_bound", *v);
  if (auto v = get("model.weakly_outermost")) c.weakly_outermost = to_bool("model.weakly_outermost", *v);

  check_resolution(s.n);
  if (s.m_max < 0 || s.m_max > 64) throw UsageError("config: solver.m_max outside [0, 64]");
  if (s.quad_n < 32 || s.quad_n > 8192) throw UsageError("config: solver.quad_n outside [32, 8192]");
  if (!(s.newton_tol > 0.0) || !(s.spectral_tol > 0.0) || !(s.coef_bound > 0.0) || !(s.f_bound > 0.0))
    throw UsageError("config: tolerances and bounds must be positive");
  if (s.max_iters < 1) throw UsageError("config: solver.max_iters must be at least 1");
  if (s.basis < 1) throw UsageError("config: solver.basis must be at least 1");

  c.data.validate();
  return c;
}

ModelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

}  // namespace mots::cfg
