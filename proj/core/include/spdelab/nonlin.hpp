#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "spdelab/spectral.hpp"

namespace spdelab {

/// Real polynomial in n variables u1..un, sparse monomial form.
class Polynomial {
 public:
  using Exponents = std::vector<int>;

  explicit Polynomial(int variables = 1) : variables_(variables) {}
  static Polynomial constant(int variables, double c);
  /// The monomial u_{j+1} (0-based j).
  static Polynomial variable(int variables, int j);

  /// Parses `coef*u1^a*u2^b + ...`; bare numbers and `u1` are allowed.
  static Polynomial parse(const std::string& text, int variables);

  int variables() const { return variables_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  const std::map<Exponents, double>& terms() const { return terms_; }

  void add_term(const Exponents& e, double coef);
  double evaluate(std::span<const double> v) const;
  /// d/du_{j+1}.
  Polynomial derivative(int j) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  bool operator==(const Polynomial&) const = default;

  std::string to_string() const;

 private:
  int variables_;
  std::map<Exponents, double> terms_;
};

/// R^n -> R^n with polynomial components.
class PolynomialMap {
 public:
  explicit PolynomialMap(std::vector<Polynomial> components);
  static PolynomialMap zero(int n);
  /// u -> u.
  static PolynomialMap identity(int n);

  int dimension() const { return static_cast<int>(components_.size()); }
  int degree() const;
  const Polynomial& operator[](int i) const { return components_[static_cast<size_t>(i)]; }
  const std::vector<Polynomial>& components() const { return components_; }

  std::vector<double> evaluate(std::span<const double> v) const;

  PolynomialMap& operator-=(const PolynomialMap& o);
  bool operator==(const PolynomialMap&) const = default;

 private:
  std::vector<Polynomial> components_;
};

/// Entry (i, j) = dP_i / du_j.
using PolynomialMatrix = std::vector<std::vector<Polynomial>>;

PolynomialMatrix jacobian(const PolynomialMap& p);

/// Componentwise sum_j d^2 P_i / du_j^2.
PolynomialMap laplacian(const PolynomialMap& p);

/// Grid size used for pseudospectral products: smallest odd >= pad (2K+1).
int padded_grid_size(int max_mode, double pad);

/// P(u(x)) evaluated on the padded grid and truncated back to K modes.
SpectralField apply_pointwise(const PolynomialMap& p, const SpectralField& u, double pad);

/// x -> J(u(x)) w(x) on the padded grid, truncated to K modes.
SpectralField apply_bilinear(const PolynomialMatrix& jac, const SpectralField& u,
                             const SpectralField& w, double pad);

}  // namespace spdelab
