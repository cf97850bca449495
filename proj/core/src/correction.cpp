#include "spdelab/correction.hpp"

#include <algorithm>
#include <cmath>

#include "spdelab/errors.hpp"
#include "spdelab/quadrature.hpp"
#include "spdelab/special.hpp"

namespace spdelab {
namespace {

// 1 - cos(x) without cancellation.
double one_minus_cos(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;
}

// int_T^inf (1 - cos(y t)) / t^2 dt, T > 0.
double oscillatory_tail(double y, double t0) {
  const double ay = std::abs(y);
  if (ay == 0.0) return 0.0;
  return one_minus_cos(ay * t0) / t0 + ay * (0.5 * kPi - sine_integral(ay * t0));
}

// Where h^2/f becomes a known constant, and that constant.
struct TailModel {
  double start = kInfinity;
  double value = 0.0;
};

TailModel tail_model(const Scheme& s) {
  const Symbol& f = s.f();
  const Symbol& h = s.h();
  TailModel m;
  if (h.has_tail() && h.tail_value() == 0.0) m.start = std::min(m.start, h.tail_start());
  if (f.has_tail() && std::isinf(f.tail_value())) m.start = std::min(m.start, f.tail_start());
  if (m.start < kInfinity) return m;
  if (f.has_tail() && h.has_tail()) {
    m.start = std::max(f.tail_start(), h.tail_start());
    m.value = h.tail_value() * h.tail_value() / f.tail_value();
  }
  return m;
}

double h2_over_f(const Scheme& s, double t) {
  const double ft = s.f()(t);
  if (std::isinf(ft)) return 0.0;
  const double ht = s.h()(t);
  return ht * ht / ft;
}

bool is_integer(double x) { return std::floor(x) == x; }

double snap_to_integer(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : x;
}

}  // namespace

std::string to_string(LambdaMethod m) {
  return m == LambdaMethod::quadrature ? "quadrature" : "closed_form";
}

LambdaResult lambda_quadrature(const Scheme& s, double nu, double tol) {
  s.require_valid();
  if (!(nu > 0.0)) throw ValidationError("lambda_quadrature: nu must be > 0");
  if (!(tol > 0.0)) throw ValidationError("lambda_quadrature: tol must be > 0");

  const TailModel tail = tail_model(s);
  if (!(tail.start < kInfinity)) {
    throw ConvergenceError("lambda_quadrature: scheme '" + s.name() +
                               "' has no constant-tail model for h^2/f",
                           0.0, kInfinity);
  }
  // Integrate numerically at least over [0, 1] so the closed-form tail is
  // never the whole answer.
  const double t_end = std::max(tail.start, 1.0);
  std::vector<double> edges = {0.0};
  for (const auto* sym : {&s.f(), &s.h()}) {
    for (double b : sym->breakpoints()) {
      if (b > 0.0 && b < t_end) edges.push_back(b);
    }
  }
  if (tail.start > 0.0 && tail.start < t_end) edges.push_back(tail.start);
  edges.push_back(t_end);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  double weight_sum = 0.0;
  for (const Atom& a : s.mu()) weight_sum += std::abs(a.weight);
  const double prefactor = 1.0 / (kTwoPi * nu);
  // Split the budget evenly over atoms and panels, with a factor 4 margin.
  const double panel_tol = tol / (4.0 * prefactor * weight_sum * static_cast<double>(edges.size()));

  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  for (const Atom& atom : s.mu()) {
    const double y = atom.location;
    if (y == 0.0 || atom.weight == 0.0) continue;
    auto integrand = [&s, y](double t) {
      if (t == 0.0) return 0.5 * y * y * h2_over_f(s, 0.0);
      return one_minus_cos(y * t) / (t * t) * h2_over_f(s, t);
    };
    double integral = 0.0;
    double integral_err = 0.0;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
      const auto r = integrate_adaptive(integrand, edges[i], edges[i + 1], panel_tol, 0.0, 4000);
      integral += r.value;
      integral_err += r.abs_error;
      converged = converged && r.converged;
    }
    if (tail.value != 0.0) {
      integral += tail.value * oscillatory_tail(y, t_end);
      integral_err += 1e-14 * std::abs(tail.value) * (1.0 / t_end + std::abs(y));
    }
    value += atom.weight * integral;
    error += std::abs(atom.weight) * integral_err;
  }
  value *= prefactor;
  error *= prefactor;
  if (!converged && error > tol) {
    throw ConvergenceError("lambda_quadrature: tolerance not reached for scheme '" + s.name() + "'",
                           value, error);
  }
  return {value, error, s.name(), nu, LambdaMethod::quadrature};
}

LambdaResult lambda_closed_form(BuiltinScheme builtin, double a, double b, double nu) {
  if (!(a >= 0.0 && b >= 0.0)) throw ValidationError("lambda_closed_form: need a, b >= 0");
  if (!(a + b > 0.0)) throw ValidationError("lambda_closed_form: a + b must be > 0");
  if (!(nu > 0.0)) throw ValidationError("lambda_closed_form: nu must be > 0");
  LambdaResult r;
  r.nu = nu;
  r.method = LambdaMethod::closed_form;
  switch (builtin) {
    case BuiltinScheme::finite_difference:
      if (!is_integer(a) || !is_integer(b)) {
        throw ValidationError("finite-difference closed form needs integer a, b");
      }
      r.scheme = "finite_difference";
      r.value = (a - b) / (4.0 * nu * (a + b));
      break;
    case BuiltinScheme::identity:
      r.scheme = "identity";
      r.value = (a - b) / (4.0 * nu * (a + b));
      break;
    case BuiltinScheme::galerkin: {
      r.scheme = "galerkin";
      const double pa = kPi * a;
      const double pb = kPi * b;
      r.value = (std::cos(pa) + pa * sine_integral(pa) - std::cos(pb) - pb * sine_integral(pb)) /
                (2.0 * kPi * kPi * nu * (a + b));
      r.abs_error_estimate = 1e-14 * (1.0 + std::abs(r.value));
      break;
    }
  }
  return r;
}

ModeBand chaos_band(double eps, double gamma, double chi) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("chaos_band: eps must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < chi)) throw ValidationError("chaos_band: need 0 < gamma < chi");
  const double lower = snap_to_integer(std::pow(eps, -gamma));
  const double upper = snap_to_integer(std::pow(eps, -chi));
  ModeBand band;
  band.lo = static_cast<int>(std::floor(lower)) + 1;
  band.hi = static_cast<int>(std::ceil(upper)) - 1;
  return band;
}

LambdaEpsResult lambda_eps_y(const Scheme& s, double eps, double gamma, double chi, double nu,
                             double y) {
  if (!(nu > 0.0)) throw ValidationError("lambda_eps_y: nu must be > 0");
  const ModeBand band = chaos_band(eps, gamma, chi);
  LambdaEpsResult r;
  if (band.empty()) {
    r.empty_range = true;
    return r;
  }
  for (int k = band.lo; k <= band.hi; ++k) {
    const double t = eps * k;
    const double ft = s.f()(t);
    if (std::isinf(ft)) continue;
    const double ht = s.h()(t);
    r.value += one_minus_cos(t * y) * ht * ht /
               (kTwoPi * eps * (1.0 + nu * static_cast<double>(k) * k * ft));
  }
  return r;
}

LambdaEpsResult lambda_eps(const Scheme& s, double eps, double gamma, double chi, double nu) {
  LambdaEpsResult total;
  for (const Atom& a : s.mu()) {
    const auto part = lambda_eps_y(s, eps, gamma, chi, nu, a.location);
    total.value += a.weight * part.value;
    total.empty_range = part.empty_range;
  }
  return total;
}

PolynomialMap corrected_drift(const PolynomialMap& f, const PolynomialMap& g, double lambda) {
  if (f.dimension() != g.dimension()) throw ValidationError("corrected_drift: dimension mismatch");
  PolynomialMap out = f;
  PolynomialMap lap = laplacian(g);
  std::vector<Polynomial> scaled;
  for (const auto& p : lap.components()) scaled.push_back(lambda * p);
  out -= PolynomialMap(std::move(scaled));
  return out;
}

}  // namespace spdelab
