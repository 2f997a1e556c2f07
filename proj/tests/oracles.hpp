// Independent reference computations for the tests. Nothing here calls
// into the library's numerics; formulas are transcribed from the model
// equations directly.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using V3 = std::array<double, 3>;

// Model ids follow the library numbering: 0 = Tyc0, 1..3 FHMS, 4..6 FHMH.
inline double g(int model, double x, double d) {
  switch (model % 3) {
    case 1: return x;                   // Models 1, 4
    case 2: return x / (x + d);         // Models 2, 5
    default: return x * std::sqrt(x);   // Models 3, 6
  }
}

inline V3 rhs(int model, double beta, double delta, double k, const V3& x, double mu, double eta1, double eta2,
              double d1 = 1.0, double d2 = 1.0) {
  const double f = x[0], m = x[1], s = x[2];
  if (model == 0) {
    const double l = 1.0 - (f + m + s) / k;
    return {0.5 * f * m * beta * l - delta * f, (0.5 * f * m + f * s) * beta * l - delta * m, mu - delta * s};
  }
  const double l = 1.0 - (f + m) / k;
  const double sign = model <= 3 ? 1.0 : -1.0;
  return {0.5 * beta * f * m * l - delta * f - eta1 * g(model, f, d1),
          0.5 * beta * f * m * l - delta * m + sign * eta2 * g(model, m, d2), 0.0};
}

// Central differences of a vector field; column j holds d F / d x_j.
inline std::array<V3, 3> fd_jacobian(const std::function<V3(const V3&)>& fn, const V3& x, int dim = 3,
                                       double h = 1e-6) {
  std::array<V3, 3> j{};
  for (int c = 0; c < dim; ++c) {
    V3 xp = x, xm = x;
    const double step = h * std::max(1.0, std::abs(x[c]));
    xp[c] += step;
    xm[c] -= step;
    const V3 fp = fn(xp), fm = fn(xm);
    for (int r = 0; r < 3; ++r) j[r][c] = (fp[r] - fm[r]) / (2.0 * step);
  }
  return j;
}

// Positive real roots of a cubic by sign-change bisection on a fine scan,
// plus local minima of |p| that touch zero (double roots).
inline std::vector<double> scan_positive_roots(double a, double b, double c, double d, double hi, int n = 200000) {
  auto p = [&](double x) { return ((a * x + b) * x + c) * x + d; };
  std::vector<double> roots;
  double x0 = 0.0, p0 = p(0.0);
  for (int i = 1; i <= n; ++i) {
    const double x1 = hi * i / n, p1 = p(x1);
    if ((p0 < 0.0) != (p1 < 0.0) && p0 != 0.0) {
      double lo = x0, up = x1, plo = p0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + up), pm = p(mid);
        if ((pm < 0.0) == (plo < 0.0)) {
          lo = mid;
          plo = pm;
        } else {
          up = mid;
        }
      }
      roots.push_back(0.5 * (lo + up));
    }
    x0 = x1;
    p0 = p1;
  }
  return roots;
}

// Classical RK4 with constant controls, fully independent of the library.
inline V3 rk4_endpoint(int model, double beta, double delta, double k, V3 x, double mu, double eta1, double eta2,
                       double t_end, int n) {
  const double h = t_end / n;
  auto f = [&](const V3& y) { return rhs(model, beta, delta, k, y, mu, eta1, eta2); };
  auto axpy = [](const V3& y, double a, const V3& z) { return V3{y[0] + a * z[0], y[1] + a * z[1], y[2] + a * z[2]}; };
  for (int i = 0; i < n; ++i) {
    const V3 k1 = f(x), k2 = f(axpy(x, h / 2, k1)), k3 = f(axpy(x, h / 2, k2)), k4 = f(axpy(x, h, k3));
    for (int c = 0; c < 3; ++c) x[c] += h / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
  }
  return x;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace oracle
