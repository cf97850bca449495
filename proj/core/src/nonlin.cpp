#include "spdelab/nonlin.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "spdelab/errors.hpp"

namespace spdelab {
namespace {

double int_pow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

class PolynomialParser {
 public:
  PolynomialParser(const std::string& text, int variables) : s_(text), n_(variables) {}

  Polynomial parse() {
    Polynomial p(n_);
    skip_space();
    if (at_end()) throw error("empty polynomial");
    bool first = true;
    while (!at_end()) {
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = (peek() == '-') ? -1.0 : 1.0;
        ++pos_;
        skip_space();
      } else if (!first) {
        throw error("expected '+' or '-'");
      }
      parse_term(p, sign);
      first = false;
      skip_space();
    }
    return p;
  }

 private:
  void parse_term(Polynomial& p, double sign) {
    double coef = sign;
    Polynomial::Exponents e(static_cast<size_t>(n_), 0);
    while (true) {
      skip_space();
      if (peek() == 'u') {
        ++pos_;
        const int j = static_cast<int>(parse_unsigned());
        if (j < 1 || j > n_) throw error("variable u" + std::to_string(j) + " out of range");
        int power = 1;
        skip_space();
        if (peek() == '^') {
          ++pos_;
          skip_space();
          power = static_cast<int>(parse_unsigned());
        }
        e[static_cast<size_t>(j - 1)] += power;
      } else {
        coef *= parse_number();
      }
      skip_space();
      if (peek() != '*') break;
      ++pos_;
    }
    p.add_term(e, coef);
  }

  double parse_number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw error("expected number or variable");
    pos_ += static_cast<size_t>(end - begin);
    return v;
  }

  long parse_unsigned() {
    size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) throw error("expected integer");
    return std::stol(s_.substr(start, pos_ - start));
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  ValidationError error(const std::string& what) const {
    return ValidationError("polynomial '" + s_ + "' at " + std::to_string(pos_) + ": " + what);
  }

  const std::string& s_;
  int n_;
  size_t pos_ = 0;
};

// Transforms every field to the padded grid, applies `pointwise` at each
// grid point (inputs: one value per field per component), and returns the
// K-band truncation of the n_out-component result.
template <class Fn>
SpectralField pseudospectral(std::span<const SpectralField* const> fields, int n_out, double pad,
                             Fn&& pointwise) {
  const int kmax = fields.front()->max_mode();
  const int m = padded_grid_size(kmax, pad);
  std::vector<std::vector<double>> grids;
  grids.reserve(fields.size());
  for (const SpectralField* f : fields) grids.push_back(evaluate_on_grid(*f, m));

  const size_t mm = static_cast<size_t>(m);
  std::vector<double> out(mm * static_cast<size_t>(n_out));
  std::vector<std::vector<double>> point(fields.size());
  for (size_t f = 0; f < fields.size(); ++f) {
    point[f].resize(static_cast<size_t>(fields[f]->components()));
  }
  std::vector<double> result(static_cast<size_t>(n_out));
  for (size_t j = 0; j < mm; ++j) {
    for (size_t f = 0; f < fields.size(); ++f) {
      for (size_t c = 0; c < point[f].size(); ++c) point[f][c] = grids[f][c * mm + j];
    }
    pointwise(point, result);
    for (size_t c = 0; c < result.size(); ++c) out[c * mm + j] = result[c];
  }
  return from_grid(GridField(m, n_out, std::move(out)), kmax);
}

}  // namespace

Polynomial Polynomial::constant(int variables, double c) {
  Polynomial p(variables);
  p.add_term(Exponents(static_cast<size_t>(variables), 0), c);
  return p;
}

Polynomial Polynomial::variable(int variables, int j) {
  Polynomial p(variables);
  Exponents e(static_cast<size_t>(variables), 0);
  e[static_cast<size_t>(j)] = 1;
  p.add_term(e, 1.0);
  return p;
}

Polynomial Polynomial::parse(const std::string& text, int variables) {
  return PolynomialParser(text, variables).parse();
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int x : e) s += x;
    d = std::max(d, s);
  }
  return d;
}

void Polynomial::add_term(const Exponents& e, double coef) {
  if (static_cast<int>(e.size()) != variables_) {
    throw ValidationError("monomial arity mismatch");
  }
  if (!std::isfinite(coef)) throw ValidationError("non-finite polynomial coefficient");
  const double v = (terms_[e] += coef);
  if (v == 0.0) terms_.erase(e);
}

double Polynomial::evaluate(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != variables_) {
    throw ResolutionError("polynomial evaluated at a point of wrong dimension");
  }
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (size_t j = 0; j < e.size(); ++j) {
      if (e[j] != 0) m *= int_pow(v[j], e[j]);
    }
    sum += m;
  }
  return sum;
}

Polynomial Polynomial::derivative(int j) const {
  Polynomial d(variables_);
  for (const auto& [e, c] : terms_) {
    const int power = e[static_cast<size_t>(j)];
    if (power == 0) continue;
    Exponents lowered = e;
    lowered[static_cast<size_t>(j)] = power - 1;
    d.add_term(lowered, c * power);
  }
  return d;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.variables_ != variables_) throw ValidationError("polynomial arity mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.variables_ != variables_) throw ValidationError("polynomial arity mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    os << std::abs(c);
    for (size_t j = 0; j < e.size(); ++j) {
      if (e[j] == 0) continue;
      os << "*u" << (j + 1);
      if (e[j] != 1) os << "^" << e[j];
    }
    first = false;
  }
  return os.str();
}

PolynomialMap::PolynomialMap(std::vector<Polynomial> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ValidationError("polynomial map needs >= 1 component");
  for (const auto& p : components_) {
    if (p.variables() != dimension()) {
      throw ValidationError("polynomial map: component arity must equal dimension");
    }
  }
}

PolynomialMap PolynomialMap::zero(int n) {
  return PolynomialMap(std::vector<Polynomial>(static_cast<size_t>(n), Polynomial(n)));
}

PolynomialMap PolynomialMap::identity(int n) {
  std::vector<Polynomial> c;
  for (int j = 0; j < n; ++j) c.push_back(Polynomial::variable(n, j));
  return PolynomialMap(std::move(c));
}

int PolynomialMap::degree() const {
  int d = 0;
  for (const auto& p : components_) d = std::max(d, p.degree());
  return d;
}

std::vector<double> PolynomialMap::evaluate(std::span<const double> v) const {
  std::vector<double> out;
  out.reserve(components_.size());
  for (const auto& p : components_) out.push_back(p.evaluate(v));
  return out;
}

PolynomialMap& PolynomialMap::operator-=(const PolynomialMap& o) {
  if (o.dimension() != dimension()) throw ValidationError("polynomial map dimension mismatch");
  for (size_t i = 0; i < components_.size(); ++i) components_[i] -= o.components_[i];
  return *this;
}

PolynomialMatrix jacobian(const PolynomialMap& p) {
  const int n = p.dimension();
  PolynomialMatrix j(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) j[static_cast<size_t>(i)].push_back(p[i].derivative(k));
  }
  return j;
}

PolynomialMap laplacian(const PolynomialMap& p) {
  const int n = p.dimension();
  std::vector<Polynomial> out;
  for (int i = 0; i < n; ++i) {
    Polynomial sum(n);
    for (int j = 0; j < n; ++j) sum += p[i].derivative(j).derivative(j);
    out.push_back(std::move(sum));
  }
  return PolynomialMap(std::move(out));
}

int padded_grid_size(int max_mode, double pad) {
  if (!(pad >= 1.0)) throw ValidationError("padding ratio must be >= 1");
  return smallest_odd_at_least(pad * (2.0 * max_mode + 1.0));
}

SpectralField apply_pointwise(const PolynomialMap& p, const SpectralField& u, double pad) {
  if (p.dimension() != u.components()) throw ResolutionError("apply_pointwise: dimension mismatch");
  const SpectralField* inputs[] = {&u};
  return pseudospectral(std::span<const SpectralField* const>(inputs), p.dimension(), pad,
                        [&p](const auto& point, std::vector<double>& out) {
                          for (int i = 0; i < p.dimension(); ++i) {
                            out[static_cast<size_t>(i)] = p[i].evaluate(point[0]);
                          }
                        });
}

SpectralField apply_bilinear(const PolynomialMatrix& jac, const SpectralField& u,
                             const SpectralField& w, double pad) {
  const int n = u.components();
  if (static_cast<int>(jac.size()) != n || w.components() != n ||
      w.max_mode() != u.max_mode()) {
    throw ResolutionError("apply_bilinear: dimension mismatch");
  }
  const SpectralField* inputs[] = {&u, &w};
  return pseudospectral(std::span<const SpectralField* const>(inputs), n, pad,
                        [&jac, n](const auto& point, std::vector<double>& out) {
                          for (int i = 0; i < n; ++i) {
                            double s = 0.0;
                            for (int j = 0; j < n; ++j) {
                              const auto& entry = jac[static_cast<size_t>(i)][static_cast<size_t>(j)];
                              if (!entry.is_zero()) {
                                s += entry.evaluate(point[0]) * point[1][static_cast<size_t>(j)];
                              }
                            }
                            out[static_cast<size_t>(i)] = s;
                          }
                        });
}

}  // namespace spdelab
