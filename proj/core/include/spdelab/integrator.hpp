#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spdelab/correction.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/nonlin.hpp"
#include "spdelab/schemes.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

enum class Variant { approximate, limit_corrected, limit_uncorrected };
std::string to_string(Variant v);

enum class LambdaMode { quadrature, closed_form, explicit_value, zero };

/// Smooth initial datum: a finite sum of constants, cosines and sines.
struct InitialTerm {
  enum class Kind { constant, cosine, sine };
  int component = 0;
  Kind kind = Kind::constant;
  int mode = 0;
  double amplitude = 0.0;
};

struct InitialSpec {
  std::vector<InitialTerm> terms;

  /// `cos 1 0.5; sin 2 0.25; const 0.1` for one component; empty or `0`
  /// gives the zero datum.
  static InitialSpec parse(const std::string& text, int component);
  SpectralField build(int max_mode, int components) const;
};

struct SimConfig {
  double nu = 1.0;
  int components = 1;
  int max_mode = 128;
  double pad = 2.0;
  double dt = 2.5e-4;
  /// Effective step is dt / 2^refine_level; the Wiener path is refined by
  /// Brownian bridges so runs at different levels share one path.
  int refine_level = 0;
  double horizon = 0.5;
  double sample_interval = 0.05;
  double eps = 0.1;
  Scheme scheme = Scheme::identity(1.0, 0.0);
  PolynomialMap F = PolynomialMap::zero(1);
  PolynomialMap G = PolynomialMap::zero(1);
  LambdaMode lambda_mode = LambdaMode::quadrature;
  double lambda_value = 0.0;
  double lambda_tol = 1e-10;
  InitialSpec v0;
  std::uint64_t seed = 0;
  Variant variant = Variant::approximate;
  /// Sobolev index of the recorded H^alpha error.
  double alpha = 0.75;

  /// Throws ValidationError on inconsistent settings.
  void validate() const;
  double step_size() const { return dt / static_cast<double>(1 << refine_level); }
  /// Number of base (unrefined) steps to the horizon.
  long long base_steps() const;
  /// Base steps between samples.
  long long base_steps_per_sample() const;
};

/// Lambda according to cfg.lambda_mode.
LambdaResult resolve_lambda(const SimConfig& cfg);

/// Closed form for a scheme built from the builtin symbols with a two-atom
/// measure (delta_a - delta_{-b})/(a+b). Throws ValidationError otherwise.
LambdaResult closed_form_for(const Scheme& s, double nu);

/// (u_eps(0), u_bar(0)) = (v0 + psi_tilde(0), v0 + psi(0)).
std::pair<SpectralField, SpectralField> initial_conditions(const SimConfig& cfg,
                                                           const CoupledStationaryPair& pair);

/// Exponential Euler for one variant with precomputed per-mode factors.
class Stepper {
 public:
  /// `lambda` is only used by Variant::limit_corrected.
  Stepper(const SimConfig& cfg, Variant variant, double lambda);

  /// u <- e^{-l dt} u + phi1(-l dt) dt N(u) + m q dW, per mode, with
  /// q = sqrt((1 - e^{-2 l dt}) / (2 l dt)) and m = h(eps k) for the
  /// approximate variant. Modes with l = +inf are zeroed.
  SpectralField step(const SpectralField& u, const SpectralField& dw) const;

  /// Drift N(u) of the variant.
  SpectralField nonlinearity(const SpectralField& u) const;

  double dt() const { return dt_; }

 private:
  struct CompiledTerm {
    double coef;
    std::vector<std::pair<int, int>> powers;
  };
  using Compiled = std::vector<CompiledTerm>;
  static Compiled compile(const Polynomial& p);
  static void accumulate(const Compiled& p, const std::vector<std::vector<double>>& u,
                         std::vector<double>& out, const std::vector<double>* weight);

  Variant variant_;
  int max_mode_;
  int components_;
  int grid_;
  double dt_;
  std::vector<double> decay_;
  std::vector<double> phi_dt_;
  std::vector<double> noise_;
  std::vector<bool> killed_;
  std::vector<cplx> derivative_;
  std::vector<Compiled> drift_;
  std::vector<Compiled> flux_;
  std::vector<std::vector<Compiled>> jacobian_;
};

/// Stateless form of one step (builds a Stepper; prefer Stepper in loops).
SpectralField step(const SpectralField& u, Variant variant, const SimConfig& cfg,
                   const SpectralField& dw, double lambda);

/// Runs one variant from u0 along the replicate's Wiener path. `on_sample`
/// is called at t = 0 and every sample_interval (sample index, time,
/// state). Throws BlowUpError with the last finite time.
void run_variant(const SimConfig& cfg, Variant variant, double lambda, const SpectralField& u0,
                 std::uint64_t replicate,
                 const std::function<void(int, double, const SpectralField&)>& on_sample);

struct TrajectoryRecord {
  double eps = 0.0;
  int replicate = 0;
  bool blew_up = false;
  double blow_up_time = 0.0;
  std::string blow_up_variant;
  std::vector<double> times;
  std::vector<double> sup_err_corrected;
  std::vector<double> sup_err_uncorrected;
  std::vector<double> halpha_err_corrected;
  std::vector<double> halpha_err_uncorrected;
  /// ||psi_tilde(0) - psi(0)||_sup for this replicate and eps.
  double initial_sup_diff = 0.0;
};

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  int n = 0;
};

MeanStderr mean_stderr(const std::vector<double>& values);

struct EnsembleResult {
  std::vector<double> eps;
  int replicates = 0;
  double lambda = 0.0;
  std::vector<double> times;
  /// records[e][r].
  std::vector<std::vector<TrajectoryRecord>> records;
  /// Quadratic variation (grid 2K+1) of the corrected limit at t = T, per
  /// replicate; NaN when the replicate blew up.
  std::vector<double> limit_qv;

  int valid_count(size_t e) const;
  /// Ensemble mean and standard error of a column at sample index i, over
  /// replicates that did not blow up.
  MeanStderr column(size_t e, size_t i,
                    std::vector<double> TrajectoryRecord::*member) const;
  MeanStderr final_column(size_t e, std::vector<double> TrajectoryRecord::*member) const {
    return column(e, times.size() - 1, member);
  }
  MeanStderr initial_sup_diff(size_t e) const;
};

/// For each replicate: corrected and uncorrected limit runs, then one
/// approximate run per eps, all on the replicate's Wiener path. Tasks run
/// on `workers` threads; results do not depend on the worker count.
EnsembleResult run_coupled(const SimConfig& cfg, const std::vector<double>& eps_list,
                           int replicates, int workers);

/// Runs task(i) for i in [0, n) on up to `workers` threads. Exceptions are
/// rethrown on the caller (first by index).
void parallel_for(int n, int workers, const std::function<void(int)>& task);

}  // namespace spdelab
