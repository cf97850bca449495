#include "spdelab/special.hpp"

#include <cmath>

#include "spdelab/quadrature.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {
namespace {

double si_series(double t) {
  // sum_n (-1)^n t^{2n+1} / ((2n+1) (2n+1)!)
  const double t2 = t * t;
  double power = t;  // t^{2n+1} / (2n+1)!
  double sum = t;
  for (int n = 1; n < 60; ++n) {
    power *= -t2 / ((2.0 * n) * (2.0 * n + 1.0));
    const double term = power / (2.0 * n + 1.0);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double si_asymptotic(double t) {
  // f ~ (1/t) sum (-1)^n (2n)!/t^{2n}, g ~ (1/t^2) sum (-1)^n (2n+1)!/t^{2n};
  // both truncated at the smallest term.
  const double inv2 = 1.0 / (t * t);
  double f = 0.0;
  double g = 0.0;
  double ft = 1.0;
  double gt = 1.0;
  double prev = 1e300;
  for (int n = 0; n < 200; ++n) {
    if (n > 0) {
      ft *= -(2.0 * n - 1.0) * (2.0 * n) * inv2;
      gt *= -(2.0 * n) * (2.0 * n + 1.0) * inv2;
    }
    const double size = std::abs(ft) + std::abs(gt);
    if (size > prev || size < 1e-20) break;
    f += ft;
    g += gt;
    prev = size;
  }
  f /= t;
  g *= inv2;
  return 0.5 * kPi - f * std::cos(t) - g * std::sin(t);
}

const double kSiFour = si_series(4.0);

}  // namespace

double sine_integral(double t) {
  if (t < 0.0) return -sine_integral(-t);
  if (t <= 4.0) return si_series(t);
  if (t > 40.0) return si_asymptotic(t);
  const auto tail = integrate_adaptive([](double x) { return std::sin(x) / x; }, 4.0, t, 1e-15,
                                       0.0, 500);
  return kSiFour + tail.value;
}

}  // namespace spdelab
