#include "spdelab/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spdelab/errors.hpp"
#include "spdelab/keyvalue.hpp"

namespace spdelab {
namespace {

// (sin(t/2)/(t/2))^2, exact at t = 0.
double sinc_half_squared(double t) {
  const double x = 0.5 * t;
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 45.0;
  }
  const double s = std::sin(x) / x;
  return s * s;
}

// Sample points for the structural checks: log grid on [1e-6, 1e3] plus a
// uniform grid on [0, 4 pi] that straddles the indicator edges.
std::vector<double> sample_points() {
  std::vector<double> t;
  const int n_log = 4000;
  for (int i = 0; i < n_log; ++i) {
    t.push_back(std::pow(10.0, -6.0 + 9.0 * i / (n_log - 1)));
  }
  const int n_lin = 2001;
  for (int i = 0; i < n_lin; ++i) t.push_back(4.0 * kPi * i / (n_lin - 1));
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

struct SlopeAtZero {
  double coarse;      // (g(1e-3) - g(0)) / 1e-3
  double fine;        // (g(1e-4) - g(0)) / 1e-4
  double richardson;  // first-order bias removed
};

SlopeAtZero slope_at_zero(const Symbol& g) {
  const double g0 = g(0.0);
  SlopeAtZero s{};
  s.coarse = (g(1e-3) - g0) / 1e-3;
  s.fine = (g(1e-4) - g0) / 1e-4;
  s.richardson = (10.0 * s.fine - s.coarse) / 9.0;
  return s;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Symbol::Symbol(std::string name, std::function<double(double)> fn,
               std::vector<double> breakpoints, double tail_start, double tail_value)
    : name_(std::move(name)),
      fn_(std::move(fn)),
      breakpoints_(std::move(breakpoints)),
      tail_start_(tail_start),
      tail_value_(tail_value) {}

Symbol Symbol::one(std::string name) {
  return Symbol(std::move(name), [](double) { return 1.0; }, {}, 0.0, 1.0);
}

Symbol Symbol::finite_difference() {
  return Symbol("finite_difference", sinc_half_squared, {}, kPi, kInfinity);
}

Symbol Symbol::galerkin() {
  return Symbol("galerkin", [](double) { return 1.0; }, {}, kPi, kInfinity);
}

Symbol Symbol::indicator_pi() {
  return Symbol("indicator_pi", [](double) { return 1.0; }, {}, kPi, 0.0);
}

Symbol Symbol::table(std::string name, std::vector<double> t, std::vector<double> v,
                     double extrapolation) {
  if (t.size() < 2 || t.size() != v.size()) {
    throw ValidationError("table '" + name + "': need >= 2 (t, value) rows");
  }
  if (t.front() != 0.0) throw ValidationError("table '" + name + "': first t must be 0");
  for (size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      throw ValidationError("table '" + name + "': t must be strictly increasing");
    }
  }
  const double last = t.back();
  std::vector<double> interior(t.begin() + 1, t.end() - 1);
  auto fn = [t = std::move(t), v = std::move(v)](double x) {
    auto it = std::upper_bound(t.begin(), t.end(), x);
    if (it == t.begin()) return v.front();
    if (it == t.end()) return v.back();
    const size_t i = static_cast<size_t>(it - t.begin()) - 1;
    const double a = v[i];
    const double b = v[i + 1];
    if (std::isinf(a) || std::isinf(b)) return (x == t[i]) ? a : (std::isinf(b) ? b : a);
    const double s = (x - t[i]) / (t[i + 1] - t[i]);
    return a + s * (b - a);
  };
  // The value at t_last belongs to the interpolant; the tail starts after it.
  return Symbol(std::move(name), std::move(fn), std::move(interior),
                std::nextafter(last, kInfinity), extrapolation);
}

std::vector<Atom> asymmetric_measure(double a, double b) {
  if (!(a + b > 0.0)) throw ValidationError("asymmetric measure needs a + b > 0");
  const double w = 1.0 / (a + b);
  if (b == 0.0) return {{a, w}, {0.0, -w}};
  return {{a, w}, {-b, -w}};
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "  ok   " : "  FAIL ") << c.name << " = " << fmt(c.measured);
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << '\n';
  }
  return os.str();
}

ValidationReport validate(const Scheme& s) {
  ValidationReport r;
  auto add = [&r](std::string name, bool ok, double measured, std::string detail = {}) {
    r.checks.push_back({std::move(name), ok, measured, std::move(detail)});
  };

  // Measure: zero mass, unit first moment, finite fourth moment.
  double mass = 0.0;
  double total_variation = 0.0;
  double first = 0.0;
  double fourth = 0.0;
  bool finite_atoms = !s.mu().empty();
  for (const Atom& a : s.mu()) {
    finite_atoms = finite_atoms && std::isfinite(a.location) && std::isfinite(a.weight);
    mass += a.weight;
    total_variation += std::abs(a.weight);
    first += a.weight * a.location;
    fourth += std::abs(a.weight) * std::pow(std::abs(a.location), 4);
  }
  add("mu_atoms_finite", finite_atoms, static_cast<double>(s.mu().size()));
  add("mu_zero_mass", std::abs(mass) <= 1e-12 * std::max(1.0, total_variation), mass,
      "sum w_i = 0");
  add("mu_unit_first_moment", std::abs(first - 1.0) <= 1e-12, first, "sum w_i y_i = 1");
  add("mu_finite_fourth_moment", std::isfinite(fourth), fourth);

  // f: f(0) = 1, f'(0) = 0, f >= q > 0 where finite.
  const Symbol& f = s.f();
  const Symbol& h = s.h();
  const double f0 = f(0.0);
  add("f_at_zero", std::abs(f0 - 1.0) <= 1e-12, f0, "f(0) = 1");
  const auto fs = slope_at_zero(f);
  add("f_slope_at_zero",
      std::abs(fs.coarse) < 1e-4 && std::abs(fs.fine) < 1e-4 && std::abs(fs.richardson) < 1e-4,
      fs.richardson,
      "one-sided steps 1e-3: " + fmt(fs.coarse) + ", 1e-4: " + fmt(fs.fine));

  const auto ts = sample_points();
  double f_min = kInfinity;
  double h_max = 0.0;
  double h_on_infinite_f = 0.0;
  double variation = 0.0;
  double prev_ratio = 0.0;
  bool first_sample = true;
  bool f_nonnegative = true;
  for (double t : ts) {
    const double ft = f(t);
    const double ht = h(t);
    f_nonnegative = f_nonnegative && ft >= 0.0;
    if (std::isfinite(ft)) f_min = std::min(f_min, ft);
    h_max = std::max(h_max, std::abs(ht));
    if (std::isinf(ft)) h_on_infinite_f = std::max(h_on_infinite_f, std::abs(ht));
    const double ratio = std::isinf(ft) ? 0.0 : ht * ht / ft;
    if (!first_sample) variation += std::abs(ratio - prev_ratio);
    prev_ratio = ratio;
    first_sample = false;
  }
  add("q_in_unit_interval", s.q() > 0.0 && s.q() <= 1.0, s.q(), "0 < q <= 1");
  add("f_lower_bound", f_nonnegative && f_min >= s.q() * (1.0 - 1e-12), f_min,
      "sampled min of finite f vs q = " + fmt(s.q()));

  // h: bounded, h(0) = 1, h'(0) = 0, h = 0 where f = inf.
  add("h_bounded", std::isfinite(h_max), h_max, "sampled sup |h|");
  const double h0 = h(0.0);
  add("h_at_zero", std::abs(h0 - 1.0) <= 1e-12, h0, "h(0) = 1");
  const auto hs = slope_at_zero(h);
  add("h_slope_at_zero",
      std::abs(hs.coarse) < 1e-4 && std::abs(hs.fine) < 1e-4 && std::abs(hs.richardson) < 1e-4,
      hs.richardson,
      "one-sided steps 1e-3: " + fmt(hs.coarse) + ", 1e-4: " + fmt(hs.fine));
  add("h_zero_where_f_infinite", h_on_infinite_f == 0.0, h_on_infinite_f);
  // Sampled only; a finite value is not a proof of bounded variation.
  add("h2_over_f_sampled_variation", std::isfinite(variation), variation,
      "sampled total variation of h^2/f");
  return r;
}

Scheme::Scheme(std::string name, Symbol f, Symbol h, std::vector<Atom> mu, double q)
    : name_(std::move(name)), f_(std::move(f)), h_(std::move(h)), mu_(std::move(mu)), q_(q) {
  report_ = validate(*this);
}

Scheme Scheme::identity(double a, double b) {
  return Scheme("identity", Symbol::one("identity"), Symbol::one(), asymmetric_measure(a, b), 1.0);
}

Scheme Scheme::finite_difference(double a, double b) {
  return Scheme("finite_difference", Symbol::finite_difference(), Symbol::indicator_pi(),
                asymmetric_measure(a, b), 4.0 / (kPi * kPi));
}

Scheme Scheme::galerkin(double a, double b) {
  return Scheme("galerkin", Symbol::galerkin(), Symbol::indicator_pi(), asymmetric_measure(a, b),
                1.0);
}

const Scheme& Scheme::require_valid() const {
  if (!is_valid()) {
    throw ValidationError("scheme '" + name_ + "' failed validation:\n" + report_.to_string());
  }
  return *this;
}

cplx derivative_symbol(const Scheme& s, double kappa) {
  cplx sum{};
  for (const Atom& a : s.mu()) sum += a.weight * std::polar(1.0, kappa * a.location);
  return sum;
}

SpectralField apply_D_eps(const Scheme& s, const SpectralField& u, double eps) {
  if (!(eps > 0.0)) throw ValidationError("apply_D_eps: eps must be > 0");
  s.require_valid();
  return u.multiply([&](int k) { return derivative_symbol(s, eps * k) / eps; });
}

SpectralField apply_Delta_eps(const Scheme& s, const SpectralField& u, double eps) {
  if (!(eps > 0.0)) throw ValidationError("apply_Delta_eps: eps must be > 0");
  for (int c = 0; c < u.components(); ++c) {
    for (int k = 1; k <= u.max_mode(); ++k) {
      if (std::isinf(s.f()(eps * k)) && u.coeff(k, c) != cplx{}) {
        throw InfiniteSymbolError("apply_Delta_eps: active mode " + std::to_string(k) +
                                  " has f = +inf; project first");
      }
    }
  }
  return u.multiply([&](int k) {
    if (k == 0) return cplx{};
    const double fk = s.f()(eps * k);
    return std::isinf(fk) ? cplx{} : cplx(-static_cast<double>(k) * k * fk);
  });
}

SpectralField apply_Q_eps(const Scheme& s, const SpectralField& u, double eps) {
  if (!(eps > 0.0)) throw ValidationError("apply_Q_eps: eps must be > 0");
  return u.multiply([&](int k) { return cplx(s.h()(eps * k)); });
}

SpectralField apply_hatD(const SpectralField& u, double delta) {
  if (delta == 0.0) throw ValidationError("apply_hatD: delta must be nonzero");
  return u.multiply([delta](int k) { return (std::polar(1.0, k * delta) - 1.0) / delta; });
}

SpectralField shift_difference(const SpectralField& u, double shift) {
  return u.multiply([shift](int k) { return std::polar(1.0, k * shift) - 1.0; });
}

namespace {

Symbol load_table(const std::string& name, const std::filesystem::path& path) {
  const std::string text = read_text_file(path.string());
  std::vector<double> t;
  std::vector<double> v;
  double extrapolation = 0.0;
  bool have_extrapolation = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    line = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 2) {
      throw ValidationError("table " + path.string() + ": expected 't,value' rows");
    }
    if (fields[0] == "extrapolate") {
      extrapolation = parse_real(fields[1]);
      have_extrapolation = true;
      continue;
    }
    t.push_back(parse_real(fields[0]));
    v.push_back(parse_real(fields[1]));
  }
  if (!have_extrapolation) {
    throw ValidationError("table " + path.string() + ": missing 'extrapolate,<value>' row");
  }
  return Symbol::table(name, std::move(t), std::move(v), extrapolation);
}

std::vector<Atom> parse_measure(const std::string& text) {
  std::vector<Atom> mu;
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    if (item.front() != '(' || item.back() != ')') {
      throw ValidationError("mu atom '" + item + "' must look like (y,w)");
    }
    const auto parts = split(std::string_view(item).substr(1, item.size() - 2), ',');
    if (parts.size() != 2) throw ValidationError("mu atom '" + item + "' must look like (y,w)");
    mu.push_back({parse_real(parts[0]), parse_real(parts[1])});
  }
  return mu;
}

}  // namespace

Scheme parse_scheme(const std::string& text, const std::filesystem::path& base_dir) {
  const auto doc = parse_key_value(text);
  const std::string section = doc.has("", "f") ? "" : "scheme";
  const std::string name = doc.get_or(section, "name", "custom");
  const std::string f_spec = doc.get(section, "f");
  const std::string h_spec = doc.get(section, "h");

  auto resolve = [&](const std::string& spec) { return base_dir / spec.substr(6); };

  double default_q = 1.0;
  Symbol f = Symbol::one("identity");
  if (f_spec == "identity") {
    f = Symbol::one("identity");
  } else if (f_spec == "finite_difference") {
    f = Symbol::finite_difference();
    default_q = 4.0 / (kPi * kPi);
  } else if (f_spec == "galerkin") {
    f = Symbol::galerkin();
  } else if (f_spec.rfind("table:", 0) == 0) {
    f = load_table("f:" + f_spec.substr(6), resolve(f_spec));
  } else {
    throw ValidationError("unknown f '" + f_spec + "'");
  }

  Symbol h = Symbol::one();
  if (h_spec == "one") {
    h = Symbol::one();
  } else if (h_spec == "indicator_pi") {
    h = Symbol::indicator_pi();
  } else if (h_spec.rfind("table:", 0) == 0) {
    h = load_table("h:" + h_spec.substr(6), resolve(h_spec));
  } else {
    throw ValidationError("unknown h '" + h_spec + "'");
  }

  const auto mu = parse_measure(doc.get(section, "mu"));
  const double q = doc.has(section, "q") ? parse_real(doc.get(section, "q")) : default_q;
  return Scheme(name, std::move(f), std::move(h), mu, q);
}

Scheme load_scheme(const std::filesystem::path& path) {
  return parse_scheme(read_text_file(path.string()), path.parent_path());
}

}  // namespace spdelab
