#pragma once

// Leaves of constant outward null expansion near a MOTS t = 0, as graphs
// t = f(theta). The map
//
//   Theta(f, k) = (theta+(f) - k, int f dA_0, 0)
//
// is solved for (f, k) at prescribed mean offset s by Newton's method. The
// third component is zero because unknowns are axisymmetric from the start.
// dA_0 is the area element of the s = 0 leaf (the slice t = 0), for every s.

#include <vector>

#include <Eigen/Dense>

#include "mots/common.hpp"
#include "mots/geomcore.hpp"
#include "mots/initdata.hpp"

namespace mots::fol {

struct FoliationOptions {
  double newton_tol = 1e-10;
  int max_iters = 25;
  double f_bound = 10.0;  // |f| beyond this leaves the chart
};

/// 2 pi w_j dA_0(theta_j): the quadrature row for int f dA_0.
Field mean_weights(const init::ProductData& d, const geom::ThetaGrid& grid);

struct ThetaMapValue {
  Field residual;  // theta+(f) - k per node
  double mean;     // int f dA_0
  double zero;     // projection onto non-axisymmetric modes, identically 0
};

/// theta+ of the graph uses centered differences with even reflection at the
/// poles. Throws DomainError when |f| exceeds f_bound.
ThetaMapValue theta_map(const init::ProductData& d, const Field& f, double k,
                        const geom::ThetaGrid& grid, double f_bound = FoliationOptions{}.f_bound);

/// Exact derivative of the discrete theta+(f) (tridiagonal), by forward AD.
Eigen::MatrixXd theta_jacobian(const init::ProductData& d, const Field& f,
                               const geom::ThetaGrid& grid);

struct FoliationLeaf {
  double s = 0.0;
  Field f;
  double k = 0.0;
  int newton_iters = 0;
  double residual = 0.0;    // max |theta+ - k|
  double mean_error = 0.0;  // |int f dA_0 - s|
  double area = 0.0;        // area of the graph
  double min_singular_value = 0.0;
  std::vector<double> residual_history;
};

FoliationLeaf newton_leaf(const init::ProductData& d, double s, const FoliationLeaf& seed,
                          const geom::ThetaGrid& grid, const FoliationOptions& opts = {});

struct FoliationChart {
  std::vector<FoliationLeaf> leaves;
  std::vector<Field> lapse;             // between leaves i and i+1, normal speed per unit s
  std::vector<Field> normalized_lapse;  // lapse divided by its area mean
  double min_gap = 0.0;                 // min over pairs and nodes of f_{i+1} - f_i
  bool weakly_outermost_claimed = false;
  bool weakly_outermost_contradiction = false;  // k(s) < 0 for some s > 0
};

/// Leaves at s_i = i s_max / n_leaves, i = 0..n_leaves, by continuation.
FoliationChart build_chart(const init::ProductData& d, double s_max, int n_leaves,
                           const geom::ThetaGrid& grid, const FoliationOptions& opts = {},
                           bool weakly_outermost = false);

}  // namespace mots::fol
