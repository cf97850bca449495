#pragma once

#include <string>

#include "spdelab/nonlin.hpp"
#include "spdelab/schemes.hpp"

namespace spdelab {

enum class LambdaMethod { quadrature, closed_form };

std::string to_string(LambdaMethod m);

/// The correction constant Lambda for one (scheme, nu).
struct LambdaResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::string scheme;
  double nu = 1.0;
  LambdaMethod method = LambdaMethod::quadrature;
};

/// Lambda = 1/(2 pi nu) sum_i w_i int_0^inf (1 - cos(y_i t)) h^2(t) / (t^2 f(t)) dt.
///
/// Panels split at the symbols' breakpoints; the region where h^2/f is a
/// known constant c is integrated in closed form through Si:
///   int_T^inf (1 - cos yt)/t^2 dt = (1 - cos yT)/T + |y| (pi/2 - Si(|y| T)).
/// Throws ConvergenceError (carrying the partial estimate) if the error
/// estimate cannot be brought below `tol`.
LambdaResult lambda_quadrature(const Scheme& s, double nu, double tol);

enum class BuiltinScheme { identity, finite_difference, galerkin };

/// Closed forms for mu = (delta_a - delta_{-b})/(a+b):
///   identity, finite difference (integer a, b): (a - b) / (4 nu (a + b))
///   Galerkin: [cos(pi a) + pi a Si(pi a) - cos(pi b) - pi b Si(pi b)] / (2 pi^2 nu (a + b))
LambdaResult lambda_closed_form(BuiltinScheme builtin, double a, double b, double nu);

/// Integer modes k with eps^{-gamma} < k < eps^{-chi}, as an inclusive range.
struct ModeBand {
  int lo = 1;
  int hi = 0;
  bool empty() const { return hi < lo; }
};

ModeBand chaos_band(double eps, double gamma, double chi);

struct LambdaEpsResult {
  double value = 0.0;
  bool empty_range = false;
};

/// sum over the chaos band of (1 - cos(eps k y)) h^2(eps k) / (2 pi eps (1 + nu k^2 f(eps k))).
LambdaEpsResult lambda_eps_y(const Scheme& s, double eps, double gamma, double chi, double nu,
                             double y);

/// sum_i w_i lambda_eps_y(..., y_i).
LambdaEpsResult lambda_eps(const Scheme& s, double eps, double gamma, double chi, double nu);

/// F - Lambda * laplacian(G).
PolynomialMap corrected_drift(const PolynomialMap& f, const PolynomialMap& g, double lambda);

}  // namespace spdelab
