#pragma once

// Rotationally symmetric geometry on S^2.
//
// A metric profile describes g = r^2 (dtheta^2 + rhohat(theta)^2 dphi^2) on
// theta in [0, pi]. The shape function rhohat carries the pole conditions
// rhohat(0) = rhohat(pi) = 0, rhohat'(0) = 1, rhohat'(pi) = -1; the scale r
// fixes the size (r = 1 is the usual d theta^2 + rho^2 d phi^2 form).

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mots/common.hpp"

namespace mots::geom {

inline constexpr double kDefaultPoleTol = 1e-6;

/// How integrals against the area element are evaluated on the grid nodes.
enum class AreaRule {
  /// Fejer's first rule in x = cos(theta). Exact for polynomials in cos(theta)
  /// of degree < n integrated against sin(theta); spectrally accurate for
  /// smooth integrands that vanish like sin(theta) at the poles.
  fejer,
  /// Composite midpoint, second order. Matches the finite-difference grid.
  midpoint,
};

/// Midpoint-offset uniform grid theta_j = (j - 1/2) pi / n, j = 1..n.
/// Poles are never nodes; cell faces sit at j pi / n, j = 0..n.
class ThetaGrid {
 public:
  explicit ThetaGrid(int n, AreaRule rule = AreaRule::fejer);

  int size() const { return n_; }
  double spacing() const { return h_; }
  AreaRule rule() const { return rule_; }

  std::span<const double> nodes() const { return nodes_; }
  double node(int j) const { return nodes_[static_cast<std::size_t>(j)]; }
  /// Face k lies between nodes k-1 and k (0-based); faces 0 and n are poles.
  double face(int k) const { return k * h_; }

  /// Uniform midpoint weights; they sum to pi.
  std::span<const double> weights() const { return weights_; }
  /// Weights for integrands carrying an area-element factor (vanishing at
  /// both poles). Depends on rule().
  std::span<const double> area_weights() const { return area_weights_; }

  /// Midpoint sum of samples.
  double integrate(std::span<const double> f) const;
  /// Sum against area_weights(); f must vanish at the poles.
  double integrate_pole_vanishing(std::span<const double> f) const;

 private:
  int n_;
  double h_;
  AreaRule rule_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> area_weights_;
};

/// Shape function value with theta-derivatives.
struct ProfileJet {
  double rho;
  double drho;
  double d2rho;
};

struct RegularityReport {
  double drho_north;  // rhohat'(0), should be 1
  double drho_south;  // rhohat'(pi), should be -1
  double d2rho_north;
  double d2rho_south;
  double d4rho_north;  // NaN when not checkable (tabulated)
  double d4rho_south;
  double min_interior_rho;
  bool regular;
  std::string message;
};

/// Immutable description of a rotationally symmetric metric on S^2.
class MetricProfile {
 public:
  /// rhohat = sin(theta).
  static MetricProfile round();
  /// Round sphere of radius r (curvature 1/r^2).
  static MetricProfile round_r(double r);
  /// rhohat = sin(theta) * (1 + (1 - cos^2 theta) * sum_k c_k cos^k theta).
  /// Regular at both poles for every coefficient vector.
  static MetricProfile regular_poly(std::vector<double> coeffs, double scale = 1.0);
  /// rhohat = sin(theta) * sum_k p_k cos^k theta. Pole regularity holds only
  /// when sum p_k = 1 and sum (-1)^k p_k = 1; not validated here.
  static MetricProfile sin_poly(std::vector<double> coeffs, double scale = 1.0);
  /// Cubic spline through (theta_i, rho_i), theta strictly increasing in
  /// [0, pi]. Pole samples (0,0) and (pi,0) are added when missing.
  static MetricProfile tabulated(std::vector<double> theta, std::vector<double> rho);
  /// Two-column text file "theta rho"; '#' starts a comment.
  static MetricProfile load_table(const std::filesystem::path& path);

  const std::string& id() const { return id_; }
  double scale() const { return scale_; }
  bool analytic() const { return !table_; }

  /// rhohat and its theta-derivatives.
  ProfileJet shape(double theta) const;
  /// Physical circumference radius r * rhohat(theta).
  double rho(double theta) const { return scale_ * shape(theta).rho; }
  /// Area density per d theta d phi: r^2 rhohat(theta).
  double area_density(double theta) const { return scale_ * scale_ * shape(theta).rho; }

  RegularityReport regularity(double pole_tol = kDefaultPoleTol) const;
  /// Throws DomainError when regularity(pole_tol) fails.
  void validate(double pole_tol = kDefaultPoleTol) const;

 private:
  struct Table;
  MetricProfile() = default;
  MetricProfile renamed(std::string id) &&;

  std::string id_;
  double scale_ = 1.0;
  std::vector<double> poly_;  // P(x) coefficients, rhohat = sin * P(cos)
  std::shared_ptr<const Table> table_;
};

/// Registry lookup: "round", "round_r" {r}, "poly" {c0, c1, ...} (regular
/// family), "sinpoly" {p0, p1, ...}. Throws UsageError for unknown ids.
MetricProfile make_profile(const std::string& id, const std::vector<double>& params = {});

/// kappa(theta_j) = -rho''/rho per node (curvature of the scaled metric).
Field gaussian_curvature(const MetricProfile& m, const ThetaGrid& grid);

/// 2 pi * integral of the area density.
double area(const MetricProfile& m, const ThetaGrid& grid);

/// Integral of kappa dA minus 4 pi.
double gauss_bonnet_defect(const MetricProfile& m, const ThetaGrid& grid);

/// Axisymmetric graph t = f(theta) over a base profile, stored as node samples
/// of f, f' and f'' (theta-derivatives).
class GraphSurface {
 public:
  static GraphSurface constant(const MetricProfile& base, const ThetaGrid& grid, double c);
  /// f = sum_k c_k cos(k theta), exact derivatives.
  static GraphSurface cosine_series(const MetricProfile& base, const ThetaGrid& grid,
                                    const std::vector<double>& coeffs);
  /// Node samples; derivatives by centered differences with even reflection
  /// across the poles.
  static GraphSurface from_samples(const MetricProfile& base, const ThetaGrid& grid, Field f,
                                   bool validate = true, double pole_tol = kDefaultPoleTol);

  const MetricProfile& base() const { return base_; }
  int size() const { return static_cast<int>(f_.size()); }
  std::span<const double> values() const { return f_; }
  std::span<const double> slopes() const { return df_; }
  std::span<const double> curvatures() const { return d2f_; }

  /// True when f' vanishes at every node (within tol): the graph is a slice.
  bool is_slice(double tol = 1e-14) const;
  /// One-sided estimates of f'(0) and f'(pi) from the four nodes nearest each
  /// pole.
  std::pair<double, double> pole_slopes(const ThetaGrid& grid) const;

 private:
  GraphSurface(MetricProfile base, Field f, Field df, Field d2f);
  MetricProfile base_;
  Field f_, df_, d2f_;
};

/// Area density of a graph over a product slice, per d theta d phi:
/// sqrt(r^2 + f'^2) * r * rhohat. For r = 1 this is sqrt(1 + f'^2) rho.
Field graph_area_element(const GraphSurface& s, const ThetaGrid& grid);

}  // namespace mots::geom
