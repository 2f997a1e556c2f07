#pragma once

#include <array>
#include <complex>
#include <vector>

namespace tyc::poly {

using Complex = std::complex<double>;

/// Roots of a*x^2 + b*x + c with a != 0, computed with the cancellation-free
/// form of the quadratic formula.
std::array<Complex, 2> quadratic_roots(double a, double b, double c);

/// Roots of a*x^3 + b*x^2 + c*x + d with a != 0. One real root comes from the
/// trigonometric/Cardano closed form and is polished with Newton steps; the
/// remaining pair comes from the deflated quadratic.
std::array<Complex, 3> cubic_roots(double a, double b, double c, double d);

/// Real roots (imaginary part below `imag_tol` relative to the root scale),
/// sorted ascending.
std::vector<double> real_cubic_roots(double a, double b, double c, double d, double imag_tol = 1e-9);

/// Cube root preserving sign.
double real_cbrt(double x) noexcept;

}  // namespace tyc::poly
