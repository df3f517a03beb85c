#include "mots/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/AutoDiff>

#include "mots/errors.hpp"

namespace mots::fol {

namespace {

using AD = Eigen::AutoDiffScalar<Eigen::Vector3d>;

std::size_t idx(int j) { return static_cast<std::size_t>(j); }

struct Stencil {
  int jm, jc, jp;
};

Stencil stencil(int j, int n) { return {j == 0 ? 0 : j - 1, j, j == n - 1 ? n - 1 : j + 1}; }

template <class T>
T theta_plus_at(const init::ProductData& d, double th, const T& fm, const T& fc, const T& fp,
                double h) {
  const T df = (fp - fm) * (0.5 / h);
  const T d2f = (fp - fc * 2.0 + fm) * (1.0 / (h * h));
  return init::surface_point<T>(d, th, fc, df, d2f).theta_plus;
}

void check_bound(const Field& f, double f_bound) {
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (!std::isfinite(f[j]) || std::abs(f[j]) > f_bound) {
      std::ostringstream msg;
      msg << "graph leaves the chart at node " << j << ": |f| = " << std::abs(f[j])
          << " exceeds f_bound = " << f_bound;
      throw DomainError(msg.str());
    }
  }
}

double graph_area(const init::ProductData& d, const Field& f, const geom::ThetaGrid& grid) {
  const geom::GraphSurface s = geom::GraphSurface::from_samples(d.metric, grid, f, false);
  const init::SurfaceQuantities q = init::surface_quantities(d, s, grid);
  return kTwoPi * grid.integrate_pole_vanishing(q.density);
}

double dot(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

}  // namespace

Field mean_weights(const init::ProductData& d, const geom::ThetaGrid& grid) {
  const int n = grid.size();
  Field w(idx(n));
  for (int j = 0; j < n; ++j) {
    const init::AmbientPoint<double> A = init::ambient(d, 0.0, grid.node(j));
    w[idx(j)] = kTwoPi * grid.area_weights()[idx(j)] * std::sqrt(A.a * A.b);
  }
  return w;
}

ThetaMapValue theta_map(const init::ProductData& d, const Field& f, double k,
                        const geom::ThetaGrid& grid, double f_bound) {
  const int n = grid.size();
  if (static_cast<int>(f.size()) != n) throw UsageError("theta_map: f does not match the grid");
  check_bound(f, f_bound);
  ThetaMapValue v{Field(idx(n)), dot(mean_weights(d, grid), f), 0.0};
  for (int j = 0; j < n; ++j) {
    const Stencil st = stencil(j, n);
    v.residual[idx(j)] = theta_plus_at<double>(d, grid.node(j), f[idx(st.jm)], f[idx(st.jc)],
                                               f[idx(st.jp)], grid.spacing()) -
                         k;
  }
  return v;
}

Eigen::MatrixXd theta_jacobian(const init::ProductData& d, const Field& f,
                               const geom::ThetaGrid& grid) {
  const int n = grid.size();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const Stencil st = stencil(j, n);
    const AD fm(f[idx(st.jm)], 3, 0), fc(f[idx(st.jc)], 3, 1), fp(f[idx(st.jp)], 3, 2);
    const AD tp = theta_plus_at<AD>(d, grid.node(j), fm, fc, fp, grid.spacing());
    J(j, st.jm) += tp.derivatives()[0];
    J(j, st.jc) += tp.derivatives()[1];
    J(j, st.jp) += tp.derivatives()[2];
  }
  return J;
}

FoliationLeaf newton_leaf(const init::ProductData& d, double s, const FoliationLeaf& seed,
                          const geom::ThetaGrid& grid, const FoliationOptions& opts) {
  const int n = grid.size();
  if (static_cast<int>(seed.f.size()) != n) throw UsageError("newton_leaf: seed does not match the grid");
  const Field w0 = mean_weights(d, grid);

  FoliationLeaf leaf;
  leaf.s = s;
  leaf.f = seed.f;
  leaf.k = seed.k;

  for (int it = 0;; ++it) {
    const ThetaMapValue v = theta_map(d, leaf.f, leaf.k, grid, opts.f_bound);
    double res = 0.0;
    for (double r : v.residual) res = std::max(res, std::isfinite(r) ? std::abs(r) : HUGE_VAL);
    leaf.residual = res;
    leaf.mean_error = std::abs(v.mean - s);
    const double total = std::max(res, leaf.mean_error);
    leaf.residual_history.push_back(total);
    if (!std::isfinite(total)) throw NumericalFailure("newton_leaf: residual is not finite");

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + 1, n + 1);
    J.topLeftCorner(n, n) = theta_jacobian(d, leaf.f, grid);
    J.topRightCorner(n, 1).setConstant(-1.0);
    for (int j = 0; j < n; ++j) J(n, j) = w0[idx(j)];
    const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXd>(J).singularValues();
    leaf.min_singular_value = sv.minCoeff();

    if (total <= opts.newton_tol) {
      leaf.newton_iters = it;
      leaf.area = graph_area(d, leaf.f, grid);
      return leaf;
    }
    if (it >= opts.max_iters) {
      std::ostringstream msg;
      msg << "newton_leaf: no convergence at s = " << s << " after " << it
          << " iterations; residual history:";
      for (double r : leaf.residual_history) msg << ' ' << r;
      throw NumericalFailure(msg.str());
    }
    if (leaf.min_singular_value <= 1e-13 * sv.maxCoeff()) {
      std::ostringstream msg;
      msg << "newton_leaf: bordered Jacobian is numerically singular at s = " << s
          << " (smallest singular value " << leaf.min_singular_value << ")";
      throw NumericalFailure(msg.str());
    }

    Eigen::VectorXd G(n + 1);
    for (int j = 0; j < n; ++j) G[j] = v.residual[idx(j)];
    G[n] = v.mean - s;
    const Eigen::VectorXd delta = J.partialPivLu().solve(G);
    for (int j = 0; j < n; ++j) leaf.f[idx(j)] -= delta[j];
    leaf.k -= delta[n];
  }
}

FoliationChart build_chart(const init::ProductData& d, double s_max, int n_leaves,
                           const geom::ThetaGrid& grid, const FoliationOptions& opts,
                           bool weakly_outermost) {
  if (!(s_max > 0.0)) throw UsageError("build_chart: s_max must be positive");
  if (n_leaves < 1) throw UsageError("build_chart: need at least one leaf beyond s = 0");
  const int n = grid.size();

  FoliationLeaf zero;
  zero.f.assign(idx(n), 0.0);
  const ThetaMapValue v0 = theta_map(d, zero.f, 0.0, grid, opts.f_bound);
  double r0 = 0.0;
  for (double r : v0.residual) r0 = std::max(r0, std::abs(r));
  if (r0 > opts.newton_tol) {
    std::ostringstream msg;
    msg << "build_chart: the slice t = 0 is not a MOTS (max |theta+| = " << r0 << ")";
    throw DomainError(msg.str());
  }

  FoliationChart chart;
  chart.weakly_outermost_claimed = weakly_outermost;
  chart.leaves.push_back(newton_leaf(d, 0.0, zero, grid, opts));
  const double area0 = chart.leaves.front().area;
  const double ds = s_max / n_leaves;

  auto shifted = [&](const FoliationLeaf& from, double target) {
    FoliationLeaf seed = from;
    for (double& v : seed.f) v += (target - from.s) / area0;
    return seed;
  };

  for (int i = 1; i <= n_leaves; ++i) {
    const double s = i * ds;
    const FoliationLeaf& prev = chart.leaves.back();
    FoliationLeaf seed;
    if (chart.leaves.size() >= 2) {
      const FoliationLeaf& pp = chart.leaves[chart.leaves.size() - 2];
      seed = prev;
      for (int j = 0; j < n; ++j) seed.f[idx(j)] = 2.0 * prev.f[idx(j)] - pp.f[idx(j)];
      seed.k = 2.0 * prev.k - pp.k;
    } else {
      seed = shifted(prev, s);
    }
    FoliationLeaf leaf;
    try {
      leaf = newton_leaf(d, s, seed, grid, opts);
    } catch (const std::runtime_error&) {
      const FoliationLeaf mid = newton_leaf(d, s - 0.5 * ds, shifted(prev, s - 0.5 * ds), grid, opts);
      leaf = newton_leaf(d, s, shifted(mid, s), grid, opts);
    }
    chart.leaves.push_back(std::move(leaf));
  }

  chart.min_gap = HUGE_VAL;
  const double h = grid.spacing();
  for (std::size_t i = 0; i + 1 < chart.leaves.size(); ++i) {
    const FoliationLeaf& a = chart.leaves[i];
    const FoliationLeaf& b = chart.leaves[i + 1];
    Field lapse(idx(n));
    for (int j = 0; j < n; ++j) {
      const double gap = b.f[idx(j)] - a.f[idx(j)];
      if (!(gap > 0.0)) {
        std::ostringstream msg;
        msg << "build_chart: leaves s = " << a.s << " and s = " << b.s << " cross at node " << j
            << " (gap " << gap << ")";
        throw NumericalFailure(msg.str());
      }
      chart.min_gap = std::min(chart.min_gap, gap);
      const Stencil st = stencil(j, n);
      const double slope =
          0.25 * ((a.f[idx(st.jp)] - a.f[idx(st.jm)]) + (b.f[idx(st.jp)] - b.f[idx(st.jm)])) / h;
      const init::AmbientPoint<double> A =
          init::ambient(d, 0.5 * (a.f[idx(j)] + b.f[idx(j)]), grid.node(j));
      const double N = std::sqrt(1.0 + slope * slope / A.a);
      lapse[idx(j)] = gap / (b.s - a.s) / N;
    }
    const Field w0 = mean_weights(d, grid);
    const double mean = dot(w0, lapse) / area0;
    Field normalized(lapse);
    for (double& v : normalized) v /= mean;
    chart.lapse.push_back(std::move(lapse));
    chart.normalized_lapse.push_back(std::move(normalized));
  }

  if (weakly_outermost)
    for (const FoliationLeaf& l : chart.leaves)
      if (l.s > 0.0 && l.k < -opts.newton_tol) chart.weakly_outermost_contradiction = true;
  return chart;
}

}  // namespace mots::fol
