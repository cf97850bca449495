#pragma once

namespace spdelab {

/// Si(t) = int_0^t sin(x)/x dx.
///
/// |t| <= 4: Taylor series. 4 < |t| <= 40: Si(4) plus adaptive quadrature.
/// |t| > 40: pi/2 - f(t) cos t - g(t) sin t with the asymptotic series for
/// the auxiliary functions. Absolute accuracy ~1e-14 throughout.
double sine_integral(double t);

}  // namespace spdelab
