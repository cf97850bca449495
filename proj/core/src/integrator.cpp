#include "spdelab/integrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "spdelab/errors.hpp"
#include "spdelab/keyvalue.hpp"

namespace spdelab {
namespace {

const double kSqrtTwoPi = std::sqrt(kTwoPi);

bool all_finite(const SpectralField& u) {
  for (int c = 0; c < u.components(); ++c) {
    for (const cplx& z : u.half(c)) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  }
  return true;
}

std::vector<std::vector<double>> split_components(const std::vector<double>& values, int n, int m) {
  std::vector<std::vector<double>> out(static_cast<size_t>(n));
  for (int c = 0; c < n; ++c) {
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(c) * m;
    out[static_cast<size_t>(c)].assign(first, first + m);
  }
  return out;
}

std::vector<double> join_components(const std::vector<std::vector<double>>& parts) {
  std::vector<double> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

double grid_qv(const SpectralField& u, int m) {
  const auto values = evaluate_on_grid(u, m);
  double sum = 0.0;
  for (int c = 0; c < u.components(); ++c) {
    const double* v = values.data() + static_cast<size_t>(c) * static_cast<size_t>(m);
    for (int j = 0; j < m; ++j) {
      const double d = v[(j + 1) % m] - v[j];
      sum += d * d;
    }
  }
  return sum;
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::approximate: return "approximate";
    case Variant::limit_corrected: return "limit_corrected";
    case Variant::limit_uncorrected: return "limit_uncorrected";
  }
  return "unknown";
}

InitialSpec InitialSpec::parse(const std::string& text, int component) {
  InitialSpec spec;
  for (const auto& item : split(text, ';')) {
    const std::string term = trim(item);
    if (term.empty() || term == "0") continue;
    std::vector<std::string> words;
    for (const auto& w : split(term, ' ')) {
      if (!trim(w).empty()) words.push_back(trim(w));
    }
    InitialTerm t;
    t.component = component;
    if (words.size() == 2 && words[0] == "const") {
      t.kind = InitialTerm::Kind::constant;
      t.amplitude = parse_real(words[1]);
    } else if (words.size() == 3 && (words[0] == "cos" || words[0] == "sin")) {
      t.kind = words[0] == "cos" ? InitialTerm::Kind::cosine : InitialTerm::Kind::sine;
      t.mode = static_cast<int>(parse_integer(words[1]));
      t.amplitude = parse_real(words[2]);
      if (t.mode < 1) throw ValidationError("v0: cos/sin mode must be >= 1");
    } else {
      throw ValidationError("v0 term '" + term + "' must be `const a`, `cos k a` or `sin k a`");
    }
    spec.terms.push_back(t);
  }
  return spec;
}

SpectralField InitialSpec::build(int max_mode, int components) const {
  std::vector<cplx> half(static_cast<size_t>(components) * static_cast<size_t>(max_mode + 1));
  for (const InitialTerm& t : terms) {
    if (t.component < 0 || t.component >= components) throw ValidationError("v0: component out of range");
    if (t.mode > max_mode) throw ValidationError("v0: mode exceeds K");
    cplx& slot = half[static_cast<size_t>(t.component) * static_cast<size_t>(max_mode + 1) +
                      static_cast<size_t>(t.mode)];
    switch (t.kind) {
      case InitialTerm::Kind::constant: slot += t.amplitude * kSqrtTwoPi; break;
      case InitialTerm::Kind::cosine: slot += 0.5 * t.amplitude * kSqrtTwoPi; break;
      case InitialTerm::Kind::sine: slot += cplx(0.0, -0.5 * t.amplitude * kSqrtTwoPi); break;
    }
  }
  return SpectralField::from_half(max_mode, components, half);
}

void SimConfig::validate() const {
  if (!(nu > 0.0)) throw ValidationError("nu must be > 0");
  if (components < 1) throw ValidationError("components must be >= 1");
  if (F.dimension() != components || G.dimension() != components) {
    throw ValidationError("F and G must have one component per field component");
  }
  if (max_mode < 1) throw ValidationError("K must be >= 1");
  if (!(pad >= 1.0)) throw ValidationError("pad must be >= 1");
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  if (refine_level < 0 || refine_level > 16) throw ValidationError("refine level must lie in [0, 16]");
  if (!(horizon >= dt)) throw ValidationError("T must be >= dt");
  if (!(eps > 0.0)) throw ValidationError("eps must be > 0");
  if (!std::isfinite(alpha)) throw ValidationError("alpha must be finite");
  base_steps();
  base_steps_per_sample();
  scheme.require_valid();
  v0.build(max_mode, components);
}

long long SimConfig::base_steps() const {
  const double ratio = horizon / dt;
  const long long n = std::llround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
    throw ValidationError("T / dt must be an integer");
  }
  return n;
}

long long SimConfig::base_steps_per_sample() const {
  const double ratio = sample_interval / dt;
  const long long n = std::llround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
    throw ValidationError("sample interval must be a positive multiple of dt");
  }
  if (base_steps() % n != 0) throw ValidationError("T must be a multiple of the sample interval");
  return n;
}

LambdaResult closed_form_for(const Scheme& s, double nu) {
  const std::string f = s.f().name();
  const std::string h = s.h().name();
  BuiltinScheme tag;
  if (f == "identity" && h == "one") {
    tag = BuiltinScheme::identity;
  } else if (f == "finite_difference" && h == "indicator_pi") {
    tag = BuiltinScheme::finite_difference;
  } else if (f == "galerkin" && h == "indicator_pi") {
    tag = BuiltinScheme::galerkin;
  } else {
    throw ValidationError("no closed form for scheme '" + s.name() + "' (f = " + f + ", h = " + h + ")");
  }
  if (s.mu().size() != 2) throw ValidationError("closed form needs a two-atom measure");
  Atom pos = s.mu()[0];
  Atom neg = s.mu()[1];
  if (pos.weight < 0.0) std::swap(pos, neg);
  const double a = pos.location;
  const double b = -neg.location;
  if (!(a >= 0.0 && b >= 0.0 && a + b > 0.0) || std::abs(pos.weight - 1.0 / (a + b)) > 1e-12 ||
      std::abs(neg.weight + 1.0 / (a + b)) > 1e-12) {
    throw ValidationError("closed form needs mu = (delta_a - delta_{-b}) / (a + b)");
  }
  LambdaResult r = lambda_closed_form(tag, a, b, nu);
  r.scheme = s.name();
  return r;
}

LambdaResult resolve_lambda(const SimConfig& cfg) {
  switch (cfg.lambda_mode) {
    case LambdaMode::quadrature: return lambda_quadrature(cfg.scheme, cfg.nu, cfg.lambda_tol);
    case LambdaMode::closed_form: return closed_form_for(cfg.scheme, cfg.nu);
    case LambdaMode::explicit_value:
      return {cfg.lambda_value, 0.0, cfg.scheme.name(), cfg.nu, LambdaMethod::closed_form};
    case LambdaMode::zero: return {0.0, 0.0, cfg.scheme.name(), cfg.nu, LambdaMethod::closed_form};
  }
  return {};
}

std::pair<SpectralField, SpectralField> initial_conditions(const SimConfig& cfg,
                                                           const CoupledStationaryPair& pair) {
  const SpectralField v0 = cfg.v0.build(cfg.max_mode, cfg.components);
  return {v0 + pair.psi_tilde, v0 + pair.psi};
}

Stepper::Stepper(const SimConfig& cfg, Variant variant, double lambda)
    : variant_(variant),
      max_mode_(cfg.max_mode),
      components_(cfg.components),
      grid_(padded_grid_size(cfg.max_mode, cfg.pad)),
      dt_(cfg.step_size()) {
  const bool approx = variant == Variant::approximate;
  const size_t nk = static_cast<size_t>(max_mode_) + 1;
  decay_.resize(nk);
  phi_dt_.resize(nk);
  noise_.resize(nk);
  killed_.assign(nk, false);
  derivative_.resize(nk);
  for (int k = 0; k <= max_mode_; ++k) {
    const size_t i = static_cast<size_t>(k);
    const double t = cfg.eps * k;
    const double fk = approx ? cfg.scheme.f()(t) : 1.0;
    const double mk = approx ? cfg.scheme.h()(t) : 1.0;
    derivative_[i] = approx ? derivative_symbol(cfg.scheme, t) / cfg.eps : cplx(0.0, k);
    if (std::isinf(fk)) {
      killed_[i] = true;
      continue;
    }
    const double rate = cfg.nu * static_cast<double>(k) * k * fk;
    const double z = rate * dt_;
    decay_[i] = std::exp(-z);
    if (z > 0.0) {
      phi_dt_[i] = -std::expm1(-z) / rate;
      noise_[i] = mk * std::sqrt(-std::expm1(-2.0 * z) / (2.0 * z));
    } else {
      phi_dt_[i] = dt_;
      noise_[i] = mk;
    }
  }

  const PolynomialMap drift =
      (variant == Variant::limit_corrected && lambda != 0.0) ? corrected_drift(cfg.F, cfg.G, lambda)
                                                             : cfg.F;
  for (const auto& p : drift.components()) drift_.push_back(compile(p));
  if (approx) {
    for (const auto& row : jacobian(cfg.G)) {
      std::vector<Compiled> compiled_row;
      for (const auto& entry : row) compiled_row.push_back(compile(entry));
      jacobian_.push_back(std::move(compiled_row));
    }
  } else {
    for (const auto& p : cfg.G.components()) flux_.push_back(compile(p));
  }
}

Stepper::Compiled Stepper::compile(const Polynomial& p) {
  Compiled out;
  for (const auto& [exponents, coef] : p.terms()) {
    CompiledTerm t{coef, {}};
    for (size_t j = 0; j < exponents.size(); ++j) {
      if (exponents[j] > 0) t.powers.emplace_back(static_cast<int>(j), exponents[j]);
    }
    out.push_back(std::move(t));
  }
  return out;
}

void Stepper::accumulate(const Compiled& p, const std::vector<std::vector<double>>& u,
                         std::vector<double>& out, const std::vector<double>* weight) {
  const size_t m = out.size();
  std::vector<double> term(m);
  for (const CompiledTerm& t : p) {
    std::fill(term.begin(), term.end(), t.coef);
    for (const auto& [var, power] : t.powers) {
      const std::vector<double>& x = u[static_cast<size_t>(var)];
      for (int e = 0; e < power; ++e) {
        for (size_t j = 0; j < m; ++j) term[j] *= x[j];
      }
    }
    if (weight != nullptr) {
      for (size_t j = 0; j < m; ++j) out[j] += term[j] * (*weight)[j];
    } else {
      for (size_t j = 0; j < m; ++j) out[j] += term[j];
    }
  }
}

SpectralField Stepper::nonlinearity(const SpectralField& u) const {
  if (u.max_mode() != max_mode_ || u.components() != components_) {
    throw ResolutionError("Stepper: state shape does not match the configuration");
  }
  const int n = components_;
  const size_t m = static_cast<size_t>(grid_);
  const auto ug = split_components(evaluate_on_grid(u, grid_), n, grid_);
  std::vector<std::vector<double>> out(static_cast<size_t>(n), std::vector<double>(m, 0.0));
  for (int i = 0; i < n; ++i) accumulate(drift_[static_cast<size_t>(i)], ug, out[static_cast<size_t>(i)], nullptr);

  if (variant_ == Variant::approximate) {
    const SpectralField w = u.multiply([this](int k) { return derivative_[static_cast<size_t>(k)]; });
    const auto wg = split_components(evaluate_on_grid(w, grid_), n, grid_);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        accumulate(jacobian_[static_cast<size_t>(i)][static_cast<size_t>(j)], ug,
                   out[static_cast<size_t>(i)], &wg[static_cast<size_t>(j)]);
      }
    }
    return from_grid(GridField(grid_, n, join_components(out)), max_mode_);
  }

  std::vector<std::vector<double>> flux(static_cast<size_t>(n), std::vector<double>(m, 0.0));
  for (int i = 0; i < n; ++i) accumulate(flux_[static_cast<size_t>(i)], ug, flux[static_cast<size_t>(i)], nullptr);
  const SpectralField drift = from_grid(GridField(grid_, n, join_components(out)), max_mode_);
  const SpectralField g = from_grid(GridField(grid_, n, join_components(flux)), max_mode_);
  return drift + g.multiply([](int k) { return cplx(0.0, k); });
}

SpectralField Stepper::step(const SpectralField& u, const SpectralField& dw) const {
  const SpectralField nl = nonlinearity(u);
  if (dw.max_mode() != max_mode_ || dw.components() != components_) {
    throw ResolutionError("Stepper: increment shape does not match the configuration");
  }
  SpectralField next = SpectralField::generate(max_mode_, components_, [&](int k, int c) {
    const size_t i = static_cast<size_t>(k);
    if (killed_[i]) return cplx{};
    return decay_[i] * u.coeff(k, c) + phi_dt_[i] * nl.coeff(k, c) + noise_[i] * dw.coeff(k, c);
  });
  if (!all_finite(next)) {
    throw BlowUpError("non-finite value in " + to_string(variant_) + " step",
                      std::numeric_limits<double>::quiet_NaN());
  }
  return next;
}

SpectralField step(const SpectralField& u, Variant variant, const SimConfig& cfg,
                   const SpectralField& dw, double lambda) {
  return Stepper(cfg, variant, lambda).step(u, dw);
}

void run_variant(const SimConfig& cfg, Variant variant, double lambda, const SpectralField& u0,
                 std::uint64_t replicate,
                 const std::function<void(int, double, const SpectralField&)>& on_sample) {
  const Stepper stepper(cfg, variant, lambda);
  const WienerPath path(cfg.seed, replicate, cfg.max_mode, cfg.components, cfg.dt, cfg.refine_level);
  const long long steps = cfg.base_steps();
  const long long per_sample = cfg.base_steps_per_sample();
  const double h = stepper.dt();
  const int sub = path.substeps();
  SpectralField u = u0;
  on_sample(0, 0.0, u);
  long long fine_step = 0;
  for (long long i = 0; i < steps; ++i) {
    const auto increments = path.increments(static_cast<std::uint64_t>(i));
    for (int s = 0; s < sub; ++s) {
      try {
        u = stepper.step(u, increments[static_cast<size_t>(s)]);
      } catch (const BlowUpError& e) {
        throw BlowUpError(e.what(), static_cast<double>(fine_step) * h);
      }
      ++fine_step;
    }
    if ((i + 1) % per_sample == 0) {
      on_sample(static_cast<int>((i + 1) / per_sample), static_cast<double>(i + 1) * cfg.dt, u);
    }
  }
}

MeanStderr mean_stderr(const std::vector<double>& values) {
  MeanStderr r;
  r.n = static_cast<int>(values.size());
  if (values.empty()) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / r.n;
  if (r.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.stderr_ = std::sqrt(ss / (r.n - 1) / r.n);
  }
  return r;
}

int EnsembleResult::valid_count(size_t e) const {
  int n = 0;
  for (const auto& rec : records[e]) n += rec.blew_up ? 0 : 1;
  return n;
}

MeanStderr EnsembleResult::column(size_t e, size_t i,
                                  std::vector<double> TrajectoryRecord::*member) const {
  std::vector<double> values;
  for (const auto& rec : records[e]) {
    if (!rec.blew_up) values.push_back((rec.*member)[i]);
  }
  return mean_stderr(values);
}

MeanStderr EnsembleResult::initial_sup_diff(size_t e) const {
  std::vector<double> values;
  for (const auto& rec : records[e]) values.push_back(rec.initial_sup_diff);
  return mean_stderr(values);
}

void parallel_for(int n, int workers, const std::function<void(int)>& task) {
  if (n <= 0) return;
  const int threads = std::max(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        task(i);
      } catch (...) {
        errors[static_cast<size_t>(i)] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

EnsembleResult run_coupled(const SimConfig& cfg, const std::vector<double>& eps_list,
                           int replicates, int workers) {
  cfg.validate();
  if (eps_list.empty()) throw ValidationError("run_coupled: empty eps list");
  if (replicates < 1) throw ValidationError("run_coupled: replicates must be >= 1");
  for (double e : eps_list) {
    if (!(e > 0.0)) throw ValidationError("run_coupled: eps must be > 0");
  }

  EnsembleResult result;
  result.eps = eps_list;
  result.replicates = replicates;
  result.lambda = resolve_lambda(cfg).value;
  const long long per_sample = cfg.base_steps_per_sample();
  const int n_samples = static_cast<int>(cfg.base_steps() / per_sample) + 1;
  for (int i = 0; i < n_samples; ++i) result.times.push_back(static_cast<double>(i * per_sample) * cfg.dt);

  const SpectralField v0 = cfg.v0.build(cfg.max_mode, cfg.components);
  auto draw_for = [&](int r) {
    RandomEngine rng = derive_stream(cfg.seed, static_cast<std::uint64_t>(r), "initial");
    return ModeGaussianDraw(cfg.max_mode, cfg.components, rng);
  };

  // Phase 1: limit runs, snapshots kept at the sample times.
  struct LimitRun {
    std::vector<SpectralField> corrected;
    std::vector<SpectralField> uncorrected;
    bool blew_up = false;
    double blow_up_time = 0.0;
    std::string variant;
  };
  std::vector<LimitRun> limits(static_cast<size_t>(replicates));
  result.limit_qv.assign(static_cast<size_t>(replicates), std::numeric_limits<double>::quiet_NaN());
  parallel_for(replicates, workers, [&](int r) {
    LimitRun& run = limits[static_cast<size_t>(r)];
    const ModeGaussianDraw draw = draw_for(r);
    const SpectralField psi = draw.scaled([&](int k) { return stationary_sigma(cfg.nu, k); });
    const SpectralField u0 = v0 + psi;
    run.corrected.resize(static_cast<size_t>(n_samples));
    run.uncorrected.resize(static_cast<size_t>(n_samples));
    for (Variant v : {Variant::limit_corrected, Variant::limit_uncorrected}) {
      auto& store = v == Variant::limit_corrected ? run.corrected : run.uncorrected;
      try {
        run_variant(cfg, v, result.lambda, u0, static_cast<std::uint64_t>(r),
                    [&store](int i, double, const SpectralField& u) { store[static_cast<size_t>(i)] = u; });
      } catch (const BlowUpError& e) {
        run.blew_up = true;
        run.blow_up_time = e.last_valid_time();
        run.variant = to_string(v);
        return;
      }
    }
    result.limit_qv[static_cast<size_t>(r)] = grid_qv(run.corrected.back(), 2 * cfg.max_mode + 1);
  });

  // Phase 2: one approximate run per (replicate, eps).
  const int n_eps = static_cast<int>(eps_list.size());
  result.records.assign(eps_list.size(), std::vector<TrajectoryRecord>(static_cast<size_t>(replicates)));
  parallel_for(replicates * n_eps, workers, [&](int task) {
    const int r = task / n_eps;
    const int e = task % n_eps;
    SimConfig local = cfg;
    local.eps = eps_list[static_cast<size_t>(e)];
    TrajectoryRecord& rec = result.records[static_cast<size_t>(e)][static_cast<size_t>(r)];
    rec.eps = local.eps;
    rec.replicate = r;
    const ModeGaussianDraw draw = draw_for(r);
    const CoupledStationaryPair pair = sample_stationary_pair(local.scheme, local.eps, local.nu, draw);
    rec.initial_sup_diff = sup_norm(pair.psi_tilde - pair.psi);
    const LimitRun& lim = limits[static_cast<size_t>(r)];
    if (lim.blew_up) {
      rec.blew_up = true;
      rec.blow_up_time = lim.blow_up_time;
      rec.blow_up_variant = lim.variant;
      return;
    }
    const SpectralField u_eps0 = initial_conditions(local, pair).first;
    try {
      run_variant(local, Variant::approximate, 0.0, u_eps0, static_cast<std::uint64_t>(r),
                  [&](int i, double t, const SpectralField& u) {
                    const SpectralField dc = u - lim.corrected[static_cast<size_t>(i)];
                    const SpectralField du = u - lim.uncorrected[static_cast<size_t>(i)];
                    rec.times.push_back(t);
                    rec.sup_err_corrected.push_back(sup_norm(dc));
                    rec.sup_err_uncorrected.push_back(sup_norm(du));
                    rec.halpha_err_corrected.push_back(sobolev_norm(dc, local.alpha));
                    rec.halpha_err_uncorrected.push_back(sobolev_norm(du, local.alpha));
                  });
    } catch (const BlowUpError& err) {
      rec.blew_up = true;
      rec.blow_up_time = err.last_valid_time();
      rec.blow_up_variant = to_string(Variant::approximate);
    }
  });
  return result;
}

}  // namespace spdelab
