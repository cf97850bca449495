#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "spdelab/spectral.hpp"

namespace spdelab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A real function on [0, inf) used as a Fourier symbol (f or h).
///
/// Carries the structural facts the quadrature needs: interior breakpoints
/// (jumps or kinks) and, when known, a point beyond which the symbol is a
/// constant (possibly +inf).
class Symbol {
 public:
  Symbol(std::string name, std::function<double(double)> fn,
         std::vector<double> breakpoints = {}, double tail_start = kInfinity,
         double tail_value = 0.0);

  double operator()(double t) const { return t >= tail_start_ ? tail_value_ : fn_(t); }

  const std::string& name() const { return name_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  /// +inf when no constant tail is known.
  double tail_start() const { return tail_start_; }
  double tail_value() const { return tail_value_; }
  bool has_tail() const { return tail_start_ < kInfinity; }

  /// f = h = 1.
  static Symbol one(std::string name = "one");
  /// f(t) = 4 sin^2(t/2)/t^2 on [0, pi), +inf beyond.
  static Symbol finite_difference();
  /// f(t) = 1 on [0, pi), +inf beyond.
  static Symbol galerkin();
  /// h = 1_{[0, pi)}.
  static Symbol indicator_pi();
  /// Piecewise-linear interpolant through (t_i, v_i), constant
  /// `extrapolation` for t > t_last. Requires strictly increasing t_i, t_0 = 0.
  static Symbol table(std::string name, std::vector<double> t, std::vector<double> v,
                      double extrapolation);

 private:
  std::string name_;
  std::function<double(double)> fn_;
  std::vector<double> breakpoints_;
  double tail_start_;
  double tail_value_;
};

/// Point mass of a finite atomic signed measure.
struct Atom {
  double location;
  double weight;
};

/// mu = (delta_a - delta_{-b}) / (a + b).
std::vector<Atom> asymmetric_measure(double a, double b);

struct ValidationCheck {
  std::string name;
  bool passed;
  double measured;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const;
  std::string to_string() const;
};

/// Discretization triple (f, h, mu) with the claimed lower bound q of f.
/// Immutable; validated on construction and carries its report.
class Scheme {
 public:
  Scheme(std::string name, Symbol f, Symbol h, std::vector<Atom> mu, double q);

  static Scheme identity(double a, double b);
  static Scheme finite_difference(double a, double b);
  static Scheme galerkin(double a, double b);

  const std::string& name() const { return name_; }
  const Symbol& f() const { return f_; }
  const Symbol& h() const { return h_; }
  const std::vector<Atom>& mu() const { return mu_; }
  double q() const { return q_; }

  const ValidationReport& report() const { return report_; }
  bool is_valid() const { return report_.passed(); }
  /// Throws ValidationError carrying the report when any check failed.
  const Scheme& require_valid() const;

 private:
  std::string name_;
  Symbol f_;
  Symbol h_;
  std::vector<Atom> mu_;
  double q_;
  ValidationReport report_;
};

/// Runs every structural check on (f, h, mu, q).
ValidationReport validate(const Scheme& s);

/// int e^{i kappa y} mu(dy) = i kappa g(kappa).
cplx derivative_symbol(const Scheme& s, double kappa);

/// D_eps: mode k times (1/eps) sum_i w_i e^{i k eps y_i}.
SpectralField apply_D_eps(const Scheme& s, const SpectralField& u, double eps);

/// Delta_eps: mode k times -k^2 f(eps |k|). Throws InfiniteSymbolError if a
/// nonzero mode meets f = +inf.
SpectralField apply_Delta_eps(const Scheme& s, const SpectralField& u, double eps);

/// Q_eps: mode k times h(eps |k|).
SpectralField apply_Q_eps(const Scheme& s, const SpectralField& u, double eps);

/// One-sided difference quotient (u(. + delta) - u) / delta.
SpectralField apply_hatD(const SpectralField& u, double delta);

/// Undivided shift difference u(. + shift) - u (well defined at shift = 0).
SpectralField shift_difference(const SpectralField& u, double shift);

/// Parses the key = value scheme description. Table paths are resolved
/// relative to `base_dir`.
Scheme parse_scheme(const std::string& text, const std::filesystem::path& base_dir = {});
Scheme load_scheme(const std::filesystem::path& path);

}  // namespace spdelab
