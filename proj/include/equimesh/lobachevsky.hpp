#pragma once
#include <span>

namespace equimesh {

// Lobachevsky function and its first two derivatives.
//
//   lob(x)        = -integral_0^x ln|2 sin t| dt
//   lob_deriv(x)  = -ln|2 sin x|
//   lob_second(x) = -cot x
//
// lob is odd and pi-periodic and is defined for all finite reals. The
// derivatives have poles at integer multiples of pi. Per-triangle corner
// angles live in the open interval (0, pi); callers guarantee that, these
// functions only check their own domain.
//
// Evaluation reduces the argument to [0, pi/2] and sums
//   x - x ln(2x) + sum_{n>=1} zeta(2n) x^(2n+1) / (n (2n+1) pi^(2n)),
// truncating once a term falls below 1e-16. Absolute error on [0, pi] is
// below 1e-13.

double lob(double x);
double lob_deriv(double x);
double lob_second(double x);

namespace detail {

// Series coefficients c_n = zeta(2n) / (n (2n+1) pi^(2n)), n = 1..size().
// Shared with the batched kernels so both lanes use identical constants.
std::span<const double> lob_series_coeffs();

// lob on the reduced domain t in [0, pi/2], no argument checks.
double lob_reduced(double t);

}  // namespace detail
}  // namespace equimesh
