#include "spdelab/estimators.hpp"

#include <cmath>

#include "spdelab/errors.hpp"
#include "spdelab/nonlin.hpp"

namespace spdelab {
namespace {

// Accumulates weight/(2 eps) * d (x) d for every (y, weight) pair into an
// n x n grid tensor, then truncates each entry to u's band.
XiMatrixField xi_from_atoms(const SpectralField& u, const std::vector<Atom>& atoms, double eps,
                            double pad, std::string name) {
  if (!(eps > 0.0)) throw ValidationError("xi_eps: eps must be > 0");
  const int n = u.components();
  const int kmax = u.max_mode();
  const int m = padded_grid_size(kmax, pad);
  const size_t mm = static_cast<size_t>(m);
  std::vector<std::vector<double>> acc(static_cast<size_t>(n * n), std::vector<double>(mm, 0.0));
  for (const Atom& a : atoms) {
    if (a.weight == 0.0 || a.location == 0.0) continue;
    const auto d = evaluate_on_grid(shift_difference(u, eps * a.location), m);
    const double scale = a.weight / (2.0 * eps);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        auto& out = acc[static_cast<size_t>(i * n + j)];
        const double* di = d.data() + static_cast<size_t>(i) * mm;
        const double* dj = d.data() + static_cast<size_t>(j) * mm;
        for (size_t x = 0; x < mm; ++x) out[x] += scale * di[x] * dj[x];
      }
    }
  }
  XiMatrixField xi;
  xi.n = n;
  xi.scheme = std::move(name);
  xi.eps = eps;
  for (auto& entry : acc) xi.entries.push_back(from_grid(GridField(m, 1, std::move(entry)), kmax));
  return xi;
}

}  // namespace

double theta_eps(const SpectralField& u, const Scheme& s, double eps) {
  if (!(eps > 0.0)) throw ValidationError("theta_eps: eps must be > 0");
  double total = 0.0;
  for (const Atom& a : s.mu()) {
    if (a.location == 0.0) continue;
    const double norm = sobolev_norm(shift_difference(u, eps * a.location), 0.0) / eps;
    total += std::abs(a.weight) * norm * norm;
  }
  return total;
}

XiMatrixField xi_eps(const SpectralField& u, const Scheme& s, double eps, double pad) {
  return xi_from_atoms(u, s.mu(), eps, pad, s.name());
}

XiMatrixField xi_eps_atom(const SpectralField& u, double y, double eps, double pad) {
  return xi_from_atoms(u, {{y, 1.0}}, eps, pad, "atom");
}

std::vector<double> quadratic_variation(const SpectralField& u, int grid_size) {
  if (grid_size < 2) throw ResolutionError("quadratic_variation: need M >= 2");
  const auto values = evaluate_on_grid(u, grid_size);
  const size_t m = static_cast<size_t>(grid_size);
  std::vector<double> qv(static_cast<size_t>(u.components()), 0.0);
  for (size_t c = 0; c < qv.size(); ++c) {
    const double* v = values.data() + c * m;
    for (size_t j = 0; j < m; ++j) {
      const double d = v[(j + 1) % m] - v[j];
      qv[c] += d * d;
    }
  }
  return qv;
}

double expected_qv(double nu, int max_mode, int grid_size) {
  if (!(nu > 0.0)) throw ValidationError("expected_qv: nu must be > 0");
  if (grid_size < 2 || max_mode < 0) throw ResolutionError("expected_qv: need M >= 2, K >= 0");
  const double h = kTwoPi / grid_size;
  double sum = 0.0;
  for (int k = 1; k <= max_mode; ++k) {
    // Both signs of k, written as 4 sin^2(kh/2) to avoid cancellation.
    const double s = std::sin(0.5 * k * h);
    sum += 2.0 * (4.0 * s * s) / (2.0 * (1.0 + nu * static_cast<double>(k) * k));
  }
  return sum * grid_size / kTwoPi;
}

double negative_sobolev_distance(const XiMatrixField& a, double c, double alpha) {
  double total = 0.0;
  const double c0 = c * std::sqrt(kTwoPi);
  for (int i = 0; i < a.n; ++i) {
    for (int j = 0; j < a.n; ++j) {
      const SpectralField& e = a.at(i, j);
      const double target = (i == j) ? c0 : 0.0;
      const SpectralField diff = e.multiply([](int) { return cplx(-1.0); }) +
                                 SpectralField::generate(e.max_mode(), 1, [target](int k, int) {
                                   return k == 0 ? cplx(target) : cplx{};
                                 });
      const double norm = sobolev_norm(diff, -alpha);
      total += norm * norm;
    }
  }
  return std::sqrt(total);
}

RateFit rate_fit(const std::vector<double>& eps, const std::vector<double>& errors) {
  if (eps.size() != errors.size() || eps.size() < 3) {
    throw ValidationError("rate_fit: need >= 3 (eps, error) pairs");
  }
  const double n = static_cast<double>(eps.size());
  double sx = 0.0;
  double sy = 0.0;
  for (size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !(errors[i] > 0.0)) throw ValidationError("rate_fit: values must be > 0");
    sx += std::log(eps[i]);
    sy += std::log(errors[i]);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (size_t i = 0; i < eps.size(); ++i) {
    const double dx = std::log(eps[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  if (sxx == 0.0) throw ValidationError("rate_fit: eps values are all equal");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (size_t i = 0; i < eps.size(); ++i) {
    const double r = std::log(errors[i]) - (fit.intercept + fit.slope * std::log(eps[i]));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace spdelab
