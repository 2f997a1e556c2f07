#include "tyc/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tyc::poly {

double real_cbrt(double x) noexcept { return std::cbrt(x); }

std::array<Complex, 2> quadratic_roots(double a, double b, double c) {
  const double disc = b * b - 4.0 * a * c;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b));
    if (q == 0.0) return {Complex(0.0), Complex(0.0)};
    const double r1 = q / a;
    const double r2 = c / q;
    return {Complex(std::min(r1, r2)), Complex(std::max(r1, r2))};
  }
  const double re = -b / (2.0 * a);
  const double im = std::sqrt(-disc) / (2.0 * std::abs(a));
  return {Complex(re, -im), Complex(re, im)};
}

namespace {

// One real root of the monic cubic x^3 + p2 x^2 + p1 x + p0.
double one_real_root(double p2, double p1, double p0) {
  // Depressed cubic t^3 + p t + q with x = t - p2/3.
  const double shift = p2 / 3.0;
  const double p = p1 - p2 * shift;
  const double q = 2.0 * shift * shift * shift - p1 * shift + p0;
  double t;
  const double disc = (q * q) / 4.0 + (p * p * p) / 27.0;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double u = real_cbrt(-q / 2.0 + (q < 0.0 ? sq : -sq));
    t = (u != 0.0) ? u - p / (3.0 * u) : 0.0;
  } else if (p < 0.0) {
    const double r = std::sqrt(-p / 3.0);
    const double arg = std::clamp(-q / (2.0 * r * r * r), -1.0, 1.0);
    t = 2.0 * r * std::cos(std::acos(arg) / 3.0);
  } else {
    t = real_cbrt(-q);
  }
  double x = t - shift;

  // Newton polish; keep the best iterate in case roundoff makes it wander.
  auto eval = [&](double v) { return ((v + p2) * v + p1) * v + p0; };
  double best = x;
  double best_val = std::abs(eval(x));
  for (int it = 0; it < 8 && best_val > 0.0; ++it) {
    const double fx = eval(x);
    const double dfx = (3.0 * x + 2.0 * p2) * x + p1;
    if (dfx == 0.0) break;
    x -= fx / dfx;
    const double v = std::abs(eval(x));
    if (v < best_val) {
      best = x;
      best_val = v;
    }
  }
  return best;
}

}  // namespace

std::array<Complex, 3> cubic_roots(double a, double b, double c, double d) {
  const double p2 = b / a;
  const double p1 = c / a;
  const double p0 = d / a;
  const double r = one_real_root(p2, p1, p0);
  // Deflate: x^3 + p2 x^2 + p1 x + p0 = (x - r)(x^2 + e1 x + e0). When |r| is
  // large the lower coefficient is taken from p0 for stability.
  const double e1 = p2 + r;
  const double e0 = (std::abs(r) > 1.0 && r != 0.0) ? -p0 / r : p1 + r * e1;
  const auto pair = quadratic_roots(1.0, e1, e0);
  std::array<Complex, 3> roots{Complex(r), pair[0], pair[1]};
  std::sort(roots.begin(), roots.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return roots;
}

std::vector<double> real_cubic_roots(double a, double b, double c, double d, double imag_tol) {
  const auto roots = cubic_roots(a, b, c, d);
  double scale = 0.0;
  for (const auto& z : roots) scale = std::max(scale, std::abs(z));
  std::vector<double> out;
  for (const auto& z : roots) {
    if (std::abs(z.imag()) <= imag_tol * std::max(1.0, scale)) out.push_back(z.real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace tyc::poly
