#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "spdelab/schemes.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

/// Engine behind every random stream. Seeded through std::seed_seq from the
/// stream key, so streams never depend on scheduling.
using RandomEngine = std::mt19937_64;

/// Stream for (seed, replicate, purpose[, index]). Distinct keys give
/// independent streams; equal keys give bit-identical ones.
RandomEngine derive_stream(std::uint64_t seed, std::uint64_t replicate, std::string_view purpose,
                           std::uint64_t index = 0);

/// Standard normal draws. Uses its own distribution object per call site so
/// no cached state leaks between streams.
double standard_normal(RandomEngine& rng);

/// One complex standard Gaussian per mode k = 0..K and component:
/// zeta_k = (a + i b)/sqrt(2) for k >= 1 (E|zeta_k|^2 = 1), zeta_0 = a real.
class ModeGaussianDraw {
 public:
  ModeGaussianDraw(int max_mode, int components, RandomEngine& rng);

  int max_mode() const { return max_mode_; }
  int components() const { return components_; }
  cplx zeta(int k, int c) const {
    return values_[static_cast<size_t>(c) * static_cast<size_t>(max_mode_ + 1) + static_cast<size_t>(k)];
  }

  /// Field with coefficient sigma(k) * zeta_k.
  SpectralField scaled(const std::function<double(int)>& sigma) const;

 private:
  int max_mode_;
  int components_;
  std::vector<cplx> values_;
};

/// (2 (1 + nu k^2))^{-1/2}.
double stationary_sigma(double nu, int k);

/// h(eps k) (2 (1 + nu k^2 f(eps k)))^{-1/2}; 0 where f = +inf.
double stationary_sigma_tilde(const Scheme& s, double eps, double nu, int k);

struct CoupledStationaryPair {
  SpectralField psi;
  SpectralField psi_tilde;
};

/// psi and psi_tilde built from one shared draw.
CoupledStationaryPair sample_stationary_pair(const Scheme& s, double eps, double nu,
                                             const ModeGaussianDraw& draw);
CoupledStationaryPair sample_stationary_pair(const Scheme& s, double eps, double nu, int max_mode,
                                             int components, RandomEngine& rng);

/// Cylindrical Wiener increment over dt: E|dW_k|^2 = dt per component.
SpectralField wiener_increment(int max_mode, int components, double dt, RandomEngine& rng);

/// Wiener path on a uniform base grid of step `base_dt`, refinable by
/// Brownian bridges. The increments of base step i come from their own
/// stream, so any base step can be regenerated independently, and the
/// level-L increments sum exactly (up to round-off) to the level-0 ones.
class WienerPath {
 public:
  WienerPath(std::uint64_t seed, std::uint64_t replicate, int max_mode, int components,
             double base_dt, int refine_level);

  int substeps() const { return 1 << refine_level_; }
  double dt() const { return base_dt_ / substeps(); }

  /// The 2^L increments covering base step i, in time order.
  std::vector<SpectralField> increments(std::uint64_t base_step) const;

 private:
  std::uint64_t seed_;
  std::uint64_t replicate_;
  int max_mode_;
  int components_;
  double base_dt_;
  int refine_level_;
};

}  // namespace spdelab
