#pragma once

#include <cstdint>
#include <vector>

#include "spdelab/estimators.hpp"
#include "spdelab/integrator.hpp"
#include "spdelab/schemes.hpp"

namespace spdelab {

// Monte-Carlo drivers behind the CLI subcommands. Every sample draws from
// its own derived stream and results are reduced in sample order, so the
// worker count never changes a number.

struct ChaosSettings {
  std::vector<double> eps = {0.04, 0.02, 0.01, 0.005};
  double gamma = kDefaultGamma;
  double chi = kDefaultChi;
  double nu = 1.0;
  double alpha = kDefaultAlpha;
  int components = 1;
  int samples = 200;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct AtomChaos {
  double y = 0.0;
  double weight = 0.0;
  double lambda_eps_y = 0.0;
  /// Spatial mean of the diagonal entries of Xi^y, pooled over components.
  MeanStderr xi_mean;
  /// Largest |mean| / stderr over off-diagonal entries (0 when n = 1).
  double offdiag_max_z = 0.0;
};

struct ChaosRow {
  double eps = 0.0;
  ModeBand band;
  /// Max mode actually sampled (modes above carry sigma_tilde = 0).
  int max_mode = 0;
  double lambda_eps = 0.0;
  std::vector<AtomChaos> atoms;
  /// ||Lambda_eps I - Xi_eps(psi_tilde^{gamma chi})||_{-alpha}.
  MeanStderr distance;
};

struct ChaosReport {
  std::vector<ChaosRow> rows;
  /// Slope of the mean distance against eps (NaN with < 3 rows).
  double distance_slope = 0.0;
};

/// psi_tilde restricted to eps^{-gamma} < |k| < eps^{-chi}.
SpectralField sample_band_limited_psi_tilde(const Scheme& s, double eps, double gamma, double chi,
                                            double nu, int components, RandomEngine& rng);

ChaosReport run_chaos(const Scheme& s, const ChaosSettings& settings);

struct QvReport {
  double nu = 1.0;
  int max_mode = 0;
  int grid_size = 0;
  MeanStderr monte_carlo;
  double exact = 0.0;
  double limit = 0.0;
};

/// Quadratic variation of stationary psi samples (component 0) against the
/// exact finite sum and pi / nu.
QvReport run_qv(double nu, int max_mode, int grid_size, int samples, std::uint64_t seed,
                int workers);

struct PsiScalingRow {
  double eps = 0.0;
  MeanStderr sup_diff;
};

struct PsiScalingReport {
  std::vector<PsiScalingRow> rows;
  double slope = 0.0;
};

/// E ||psi_tilde(0) - psi(0)||_sup from shared draws, one draw per sample
/// reused across all eps.
PsiScalingReport run_psi_scaling(const Scheme& s, const std::vector<double>& eps, int max_mode,
                                 double nu, int samples, std::uint64_t seed, int workers);

}  // namespace spdelab
