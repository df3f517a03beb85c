#include "mots/nariai.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include <gsl/gsl_integration.h>

#include "mots/errors.hpp"

namespace mots::nariai {

namespace {

struct TableDeleter {
  void operator()(gsl_integration_glfixed_table* t) const { gsl_integration_glfixed_table_free(t); }
};

using Table = std::unique_ptr<gsl_integration_glfixed_table, TableDeleter>;

/// Tables are built once per node count and shared read-only.
const gsl_integration_glfixed_table* table_for(int n) {
  static std::mutex mu;
  static std::map<int, Table> tables;
  const std::lock_guard<std::mutex> lock(mu);
  Table& t = tables[n];
  if (!t) {
    t.reset(gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n)));
    if (!t) throw NumericalFailure("could not allocate Gauss-Legendre table");
  }
  return t.get();
}

template <class F>
double gauss_legendre(F&& f, double lo, double hi, int n) {
  if (n < 32) throw UsageError("quadrature needs at least 32 Gauss-Legendre nodes");
  const gsl_integration_glfixed_table* t = table_for(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = 0.0, w = 0.0;
    gsl_integration_glfixed_point(lo, hi, static_cast<std::size_t>(i), &x, &w, t);
    sum += w * f(x);
  }
  return sum;
}

void check_ell(double ell) {
  if (!(ell > 0.0) || !std::isfinite(ell)) throw DomainError("ell must be positive and finite");
}

}  // namespace

double a_max(double ell) {
  check_ell(ell);
  return (2.0 - std::sqrt(3.0)) * ell;
}

double rc_squared(double a, double ell) {
  check_ell(ell);
  const double amax = a_max(ell);
  if (!(a >= 0.0) || !(a < amax)) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "rotation parameter a = " << a << " outside [0, a_max); the discriminant "
        << "(1 - eps^2)^2 - 12 eps^2 vanishes at a_max = " << amax / ell << " ell";
    throw DomainError(msg.str());
  }
  const double e2 = (a / ell) * (a / ell);
  const double disc = (1.0 - e2) * (1.0 - e2) - 12.0 * e2;
  return ell * ell * (1.0 - e2 + std::sqrt(disc)) / 6.0;
}

double area_sigma(double a, double ell) {
  const double rc2 = rc_squared(a, ell);
  return 4.0 * kPi * (rc2 + a * a) / (1.0 + a * a / (ell * ell));
}

double omega_nariai(double a, double ell, int quad_n) {
  const double rc2 = rc_squared(a, ell);
  const double q = a * a / rc2, e2 = a * a / (ell * ell);
  const double I = gauss_legendre(
      [&](double th) {
        const double c = std::cos(th), s = std::sin(th);
        const double den = 1.0 + q * c * c;
        return (1.0 + e2 * c * c) * s * s * s / (den * den * den);
      },
      0.0, kPi, quad_n);
  return a * a / (2.0 * rc2 * rc2) * I;
}

double omega_definitional(double a, double ell, int quad_n) {
  const double rc2 = rc_squared(a, ell);
  const double Lambda = 3.0 / (ell * ell);
  const double density = (rc2 + a * a) / (1.0 + Lambda * a * a / 3.0);
  auto x2 = [&](double th) {
    const double c = std::cos(th), s = std::sin(th);
    const double den = rc2 + a * a * c * c;
    return a * a * s * s / (den * den * den) * (rc2 + Lambda * a * a * rc2 * c * c / 3.0);
  };
  const double integral =
      kTwoPi * gauss_legendre([&](double th) { return x2(th) * density * std::sin(th); }, 0.0, kPi,
                              quad_n);
  const double area =
      kTwoPi * gauss_legendre([&](double th) { return density * std::sin(th); }, 0.0, kPi, quad_n);
  return integral / area;
}

NariaiReport nariai_point(double a, double ell, int quad_n) {
  NariaiReport r{};
  r.a = a;
  r.ell = ell;
  r.eps = a / ell;
  r.Lambda = 3.0 / (ell * ell);
  r.rc2 = rc_squared(a, ell);
  r.area = area_sigma(a, ell);
  r.omega = omega_nariai(a, ell, quad_n);
  r.omega_definitional = omega_definitional(a, ell, quad_n);
  r.bound = 4.0 * kPi / (r.Lambda + r.omega);
  r.gap = r.bound - r.area;
  r.refinement_delta = std::abs(omega_nariai(a, ell, 2 * quad_n) - r.omega);
  r.quad_n = quad_n;
  return r;
}

EpsExpansion eps_expansion(double a, double ell, int quad_n) {
  EpsExpansion x{};
  const double eps = a / ell, e2 = eps * eps;
  x.eps = eps;
  x.in_window = eps <= 0.15;
  x.rc2 = rc_squared(a, ell);
  x.rc2_trunc = ell * ell / 3.0 * (1.0 - 4.0 * e2);
  x.a2_over_rc2 = a * a / x.rc2;
  x.a2_over_rc2_trunc = 3.0 * e2;
  x.omega = omega_nariai(a, ell, quad_n);
  x.omega_trunc = 2.0 / 3.0 * a * a / (x.rc2 * x.rc2) * (1.0 - 1.6 * e2);
  x.area = area_sigma(a, ell);
  x.bound = 4.0 * kPi / (3.0 / (ell * ell) + x.omega);
  x.common_trunc = 4.0 * kPi * x.rc2 * (1.0 + 2.0 * e2);

  // C(e) = (3 r_c^2 / ell^2 - 1 + 4 e^2) / e^4 = c4 + c6 e^2 + ...; one
  // Richardson step removes c6.
  auto C = [](double e) {
    const double r = 3.0 * rc_squared(e, 1.0);
    return (r - 1.0 + 4.0 * e * e) / (e * e * e * e);
  };
  x.rc2_eps4_coefficient = (4.0 * C(0.01) - C(0.02)) / 3.0;
  return x;
}

std::vector<SweepRow> sweep(const std::vector<double>& a_values, double ell, int quad_n,
                            Execution exec) {
  std::vector<SweepRow> rows(a_values.size());
  auto row = [&](std::size_t i) {
    const double a = a_values[i];
    const double area = area_sigma(a, ell);
    const double omega = omega_nariai(a, ell, quad_n);
    const double bound = 4.0 * kPi / (3.0 / (ell * ell) + omega);
    const double eps = a / ell;
    const double gap = bound - area;
    rows[i] = {eps,   rc_squared(a, ell), area, omega, bound, gap,
               eps > 0.0 ? gap / (eps * eps * eps * eps) : std::numeric_limits<double>::quiet_NaN()};
  };
  const auto n = static_cast<long>(a_values.size());
  if (exec == Execution::parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      try {
        row(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(mots_sweep_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (long i = 0; i < n; ++i) row(static_cast<std::size_t>(i));
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("loglog_slope needs matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope needs positive samples");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace mots::nariai
