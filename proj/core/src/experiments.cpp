#include "spdelab/experiments.hpp"

#include <cmath>
#include <limits>

#include "spdelab/correction.hpp"
#include "spdelab/errors.hpp"
#include "spdelab/noise.hpp"

namespace spdelab {
namespace {

// Largest k <= hi whose sigma_tilde can be nonzero.
int effective_max_mode(const Scheme& s, double eps, int hi) {
  int k = hi;
  while (k > 1) {
    const double t = eps * k;
    if (!std::isinf(s.f()(t)) && s.h()(t) != 0.0) break;
    --k;
  }
  return std::max(k, 1);
}

double slope_or_nan(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  for (double v : y) {
    if (!(v > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  }
  return rate_fit(x, y).slope;
}

}  // namespace

SpectralField sample_band_limited_psi_tilde(const Scheme& s, double eps, double gamma, double chi,
                                            double nu, int components, RandomEngine& rng) {
  const ModeBand band = chaos_band(eps, gamma, chi);
  if (band.empty()) throw ValidationError("chaos band is empty at eps = " + std::to_string(eps));
  const int kmax = effective_max_mode(s, eps, band.hi);
  const ModeGaussianDraw draw(kmax, components, rng);
  const SpectralField psi_tilde =
      draw.scaled([&](int k) { return stationary_sigma_tilde(s, eps, nu, k); });
  return band_project(psi_tilde, band.lo - 1, band.hi);
}

ChaosReport run_chaos(const Scheme& s, const ChaosSettings& settings) {
  s.require_valid();
  if (settings.samples < 2) throw ValidationError("chaos: need >= 2 samples");
  ChaosReport report;
  const int n = settings.components;
  const size_t n_atoms = s.mu().size();
  for (size_t e = 0; e < settings.eps.size(); ++e) {
    const double eps = settings.eps[e];
    ChaosRow row;
    row.eps = eps;
    row.band = chaos_band(eps, settings.gamma, settings.chi);
    row.max_mode = effective_max_mode(s, eps, row.band.hi);
    row.lambda_eps = lambda_eps(s, eps, settings.gamma, settings.chi, settings.nu).value;

    // Per sample: diagonal means per atom (pooled), off-diagonal means per
    // atom, and the distance of the combined tensor.
    const size_t n_off = static_cast<size_t>(n * (n - 1));
    std::vector<std::vector<double>> diag(n_atoms, std::vector<double>(static_cast<size_t>(settings.samples)));
    std::vector<std::vector<double>> off(n_atoms * n_off, std::vector<double>(static_cast<size_t>(settings.samples)));
    std::vector<double> distance(static_cast<size_t>(settings.samples));
    parallel_for(settings.samples, settings.workers, [&](int i) {
      RandomEngine rng = derive_stream(settings.seed, static_cast<std::uint64_t>(i), "chaos", e);
      const SpectralField u = sample_band_limited_psi_tilde(s, eps, settings.gamma, settings.chi,
                                                            settings.nu, n, rng);
      XiMatrixField combined;
      for (size_t a = 0; a < n_atoms; ++a) {
        const Atom atom = s.mu()[a];
        const XiMatrixField xi = xi_eps_atom(u, atom.location, eps);
        double d = 0.0;
        size_t o = 0;
        for (int p = 0; p < n; ++p) {
          for (int q = 0; q < n; ++q) {
            if (p == q) {
              d += xi.mean(p, q);
            } else {
              off[a * n_off + o++][static_cast<size_t>(i)] = xi.mean(p, q);
            }
          }
        }
        diag[a][static_cast<size_t>(i)] = d / n;
        if (a == 0) {
          combined = xi;
          for (auto& entry : combined.entries) entry *= atom.weight;
        } else {
          for (size_t j = 0; j < combined.entries.size(); ++j) {
            combined.entries[j] += atom.weight * xi.entries[j];
          }
        }
      }
      distance[static_cast<size_t>(i)] =
          negative_sobolev_distance(combined, row.lambda_eps, settings.alpha);
    });

    for (size_t a = 0; a < n_atoms; ++a) {
      AtomChaos ac;
      ac.y = s.mu()[a].location;
      ac.weight = s.mu()[a].weight;
      ac.lambda_eps_y =
          lambda_eps_y(s, eps, settings.gamma, settings.chi, settings.nu, ac.y).value;
      ac.xi_mean = mean_stderr(diag[a]);
      for (size_t o = 0; o < n_off; ++o) {
        const MeanStderr m = mean_stderr(off[a * n_off + o]);
        if (m.stderr_ > 0.0) ac.offdiag_max_z = std::max(ac.offdiag_max_z, std::abs(m.mean) / m.stderr_);
      }
      row.atoms.push_back(ac);
    }
    row.distance = mean_stderr(distance);
    report.rows.push_back(std::move(row));
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : report.rows) {
    xs.push_back(r.eps);
    ys.push_back(r.distance.mean);
  }
  report.distance_slope = slope_or_nan(xs, ys);
  return report;
}

QvReport run_qv(double nu, int max_mode, int grid_size, int samples, std::uint64_t seed,
                int workers) {
  if (samples < 2) throw ValidationError("qv: need >= 2 samples");
  if (max_mode < 1) throw ValidationError("qv: K must be >= 1");
  QvReport r;
  r.nu = nu;
  r.max_mode = max_mode;
  r.grid_size = grid_size;
  r.exact = expected_qv(nu, max_mode, grid_size);
  r.limit = kPi / nu;
  std::vector<double> qv(static_cast<size_t>(samples));
  parallel_for(samples, workers, [&](int i) {
    RandomEngine rng = derive_stream(seed, static_cast<std::uint64_t>(i), "qv");
    const ModeGaussianDraw draw(max_mode, 1, rng);
    const SpectralField psi = draw.scaled([nu](int k) { return stationary_sigma(nu, k); });
    qv[static_cast<size_t>(i)] = quadratic_variation(psi, grid_size)[0];
  });
  r.monte_carlo = mean_stderr(qv);
  return r;
}

PsiScalingReport run_psi_scaling(const Scheme& s, const std::vector<double>& eps, int max_mode,
                                 double nu, int samples, std::uint64_t seed, int workers) {
  s.require_valid();
  if (samples < 2) throw ValidationError("psi scaling: need >= 2 samples");
  std::vector<std::vector<double>> sup(eps.size(), std::vector<double>(static_cast<size_t>(samples)));
  parallel_for(samples, workers, [&](int i) {
    RandomEngine rng = derive_stream(seed, static_cast<std::uint64_t>(i), "psi_scaling");
    const ModeGaussianDraw draw(max_mode, 1, rng);
    for (size_t e = 0; e < eps.size(); ++e) {
      const auto pair = sample_stationary_pair(s, eps[e], nu, draw);
      sup[e][static_cast<size_t>(i)] = sup_norm(pair.psi_tilde - pair.psi);
    }
  });
  PsiScalingReport report;
  std::vector<double> means;
  for (size_t e = 0; e < eps.size(); ++e) {
    report.rows.push_back({eps[e], mean_stderr(sup[e])});
    means.push_back(report.rows.back().sup_diff.mean);
  }
  report.slope = slope_or_nan(eps, means);
  return report;
}

}  // namespace spdelab
