#pragma once

#include <string>
#include <vector>

#include "spdelab/schemes.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

/// Exponent defaults used by the chaos diagnostics.
inline constexpr double kDefaultAlpha = 0.75;
inline constexpr double kDefaultGamma = 1.0 / 3.0;
inline constexpr double kDefaultChi = 1.5;

/// sum_i |w_i| ||(u(. + eps y_i) - u) / eps||^2_{L^2}. The undivided form
/// makes atoms at y = 0 contribute nothing.
double theta_eps(const SpectralField& u, const Scheme& s, double eps);

/// n x n tensor field, entry (i, j) stored row-major as one-component fields.
struct XiMatrixField {
  int n = 0;
  std::vector<SpectralField> entries;
  std::string scheme;
  double eps = 0.0;

  const SpectralField& at(int i, int j) const {
    return entries[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)];
  }
  /// Spatial mean of entry (i, j).
  double mean(int i, int j) const { return spatial_mean(at(i, j)); }
};

/// sum_i w_i (1/(2 eps)) d_i (x) d_i, d_i = u(. + eps y_i) - u, formed on a
/// grid padded by `pad` and truncated to u's band.
XiMatrixField xi_eps(const SpectralField& u, const Scheme& s, double eps, double pad = 2.0);

/// Single-atom version (weight 1): (1/(2 eps)) d (x) d with d = u(. + eps y) - u.
XiMatrixField xi_eps_atom(const SpectralField& u, double y, double eps, double pad = 2.0);

/// sum_j |u(x_{j+1}) - u(x_j)|^2 over the periodic M-point grid, per component.
std::vector<double> quadratic_variation(const SpectralField& u, int grid_size);

/// Exact E of quadratic_variation for the stationary psi (per component):
/// (M / 2 pi) sum_{|k| <= K} (2 - 2 cos(2 pi k / M)) / (2 (1 + nu k^2)).
double expected_qv(double nu, int max_mode, int grid_size);

/// Frobenius aggregate of the H^{-alpha} norms of (c I - A)_{ij}.
double negative_sobolev_distance(const XiMatrixField& a, double c, double alpha);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual in log space.
  double residual = 0.0;
};

/// Least-squares line through (log eps, log err). Needs >= 3 positive pairs.
RateFit rate_fit(const std::vector<double>& eps, const std::vector<double>& errors);

}  // namespace spdelab
