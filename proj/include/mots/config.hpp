#pragma once

// INI model files. Recognised keys (anything else is rejected):
//
//   [metric]    preset = round | round_r | poly | sinpoly | table
//               scale, coeffs = c0, c1, ...   file = profile.txt
//   [extrinsic] alpha = a0, a1, ...           (K_tt as a polynomial in t)
//               beta  = coef:p:q, ...         (sum coef sin^p cos^q)
//               warp  = coef:p:q, ...         (sigma = sum coef t^p cos^q)
//   [surface]   f = c0, c1, ...               (f = sum c_k cos k theta)
//               c = <energy bound>
//   [solver]    n, m_max, quad_n, newton_tol, max_iters, spectral_tol,
//               coef_bound, basis, f_bound
//   [model]     weakly_outermost = true | false

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mots/initdata.hpp"

namespace mots::cfg {

struct SolverSettings {
  int n = 128;
  int m_max = 8;
  int quad_n = 512;
  double newton_tol = 1e-10;
  int max_iters = 25;
  double spectral_tol = 1e-7;
  double coef_bound = 1.0;
  int basis = 4;
  double f_bound = 10.0;
};

struct ModelConfig {
  init::ProductData data;
  std::vector<double> surface_f;  // cosine coefficients; empty means f = 0
  std::optional<double> c;
  SolverSettings solver;
  bool weakly_outermost = false;
};

/// Throws UsageError on syntax errors, unknown sections or keys and bad
/// values; relative table paths resolve against base_dir.
ModelConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ModelConfig load_config(const std::filesystem::path& path);

std::vector<double> parse_list(const std::string& text);
std::vector<init::Term> parse_terms(const std::string& text);

/// Grid resolution bounds shared by every command.
void check_resolution(int n);

}  // namespace mots::cfg
