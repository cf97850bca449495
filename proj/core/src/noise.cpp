#include "spdelab/noise.hpp"

#include <cmath>

#include "spdelab/errors.hpp"

namespace spdelab {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

// Real coordinates of one field: k = 0 carries one, k >= 1 carries two.
size_t real_coordinates(int max_mode, int components) {
  return static_cast<size_t>(components) * (2 * static_cast<size_t>(max_mode) + 1);
}

// Coordinates laid out as [c][0, re1, im1, re2, im2, ...], unit variance
// per coordinate, mapped to coefficients with E|z_k|^2 = 1.
SpectralField field_from_coordinates(int max_mode, int components, const double* x, double scale) {
  const size_t per = 2 * static_cast<size_t>(max_mode) + 1;
  const double r = std::sqrt(0.5);
  return SpectralField::generate(max_mode, components, [&](int k, int c) {
    const double* base = x + static_cast<size_t>(c) * per;
    if (k == 0) return cplx(scale * base[0], 0.0);
    const size_t i = 2 * static_cast<size_t>(k) - 1;
    return cplx(scale * r * base[i], scale * r * base[i + 1]);
  });
}

}  // namespace

RandomEngine derive_stream(std::uint64_t seed, std::uint64_t replicate, std::string_view purpose,
                           std::uint64_t index) {
  const std::uint64_t tag = fnv1a(purpose);
  std::seed_seq seq{lo32(seed),  hi32(seed), lo32(replicate), hi32(replicate),
                    lo32(tag),   hi32(tag),  lo32(index),     hi32(index)};
  return RandomEngine(seq);
}

double standard_normal(RandomEngine& rng) {
  std::normal_distribution<double> normal;
  return normal(rng);
}

ModeGaussianDraw::ModeGaussianDraw(int max_mode, int components, RandomEngine& rng)
    : max_mode_(max_mode), components_(components) {
  if (max_mode < 0 || components < 1) throw ValidationError("ModeGaussianDraw: bad shape");
  std::normal_distribution<double> normal;
  const double r = std::sqrt(0.5);
  values_.resize(static_cast<size_t>(components) * static_cast<size_t>(max_mode + 1));
  size_t i = 0;
  for (int c = 0; c < components; ++c) {
    values_[i++] = cplx(normal(rng), 0.0);
    for (int k = 1; k <= max_mode; ++k) {
      const double a = normal(rng);
      const double b = normal(rng);
      values_[i++] = cplx(r * a, r * b);
    }
  }
}

SpectralField ModeGaussianDraw::scaled(const std::function<double(int)>& sigma) const {
  std::vector<double> s(static_cast<size_t>(max_mode_) + 1);
  for (int k = 0; k <= max_mode_; ++k) s[static_cast<size_t>(k)] = sigma(k);
  return SpectralField::generate(max_mode_, components_, [&](int k, int c) {
    return s[static_cast<size_t>(k)] * zeta(k, c);
  });
}

double stationary_sigma(double nu, int k) {
  return 1.0 / std::sqrt(2.0 * (1.0 + nu * static_cast<double>(k) * k));
}

double stationary_sigma_tilde(const Scheme& s, double eps, double nu, int k) {
  const double t = eps * k;
  const double ft = s.f()(t);
  if (std::isinf(ft)) return 0.0;
  return s.h()(t) / std::sqrt(2.0 * (1.0 + nu * static_cast<double>(k) * k * ft));
}

CoupledStationaryPair sample_stationary_pair(const Scheme& s, double eps, double nu,
                                             const ModeGaussianDraw& draw) {
  if (!(nu > 0.0) || !(eps > 0.0)) throw ValidationError("sample_stationary_pair: need nu, eps > 0");
  return {draw.scaled([nu](int k) { return stationary_sigma(nu, k); }),
          draw.scaled([&](int k) { return stationary_sigma_tilde(s, eps, nu, k); })};
}

CoupledStationaryPair sample_stationary_pair(const Scheme& s, double eps, double nu, int max_mode,
                                             int components, RandomEngine& rng) {
  if (max_mode < 1) throw ValidationError("sample_stationary_pair: K must be >= 1");
  return sample_stationary_pair(s, eps, nu, ModeGaussianDraw(max_mode, components, rng));
}

SpectralField wiener_increment(int max_mode, int components, double dt, RandomEngine& rng) {
  if (!(dt > 0.0)) throw ValidationError("wiener_increment: dt must be > 0");
  const double scale = std::sqrt(dt);
  return ModeGaussianDraw(max_mode, components, rng).scaled([scale](int) { return scale; });
}

WienerPath::WienerPath(std::uint64_t seed, std::uint64_t replicate, int max_mode, int components,
                       double base_dt, int refine_level)
    : seed_(seed),
      replicate_(replicate),
      max_mode_(max_mode),
      components_(components),
      base_dt_(base_dt),
      refine_level_(refine_level) {
  if (!(base_dt > 0.0)) throw ValidationError("WienerPath: dt must be > 0");
  if (refine_level < 0 || refine_level > 16) throw ValidationError("WienerPath: refine level out of range");
}

std::vector<SpectralField> WienerPath::increments(std::uint64_t base_step) const {
  RandomEngine rng = derive_stream(seed_, replicate_, "wiener", base_step);
  std::normal_distribution<double> normal;
  const size_t p = real_coordinates(max_mode_, components_);

  // Unit-rate Brownian increments per real coordinate, refined level by level.
  std::vector<double> incs(p);
  const double sq = std::sqrt(base_dt_);
  for (double& v : incs) v = sq * normal(rng);
  double dt = base_dt_;
  for (int level = 1; level <= refine_level_; ++level) {
    const size_t pieces = incs.size() / p;
    std::vector<double> finer(2 * incs.size());
    const double half_sd = 0.5 * std::sqrt(dt);
    for (size_t j = 0; j < pieces; ++j) {
      const double* parent = incs.data() + j * p;
      double* left = finer.data() + 2 * j * p;
      double* right = left + p;
      for (size_t i = 0; i < p; ++i) {
        const double bridge = half_sd * normal(rng);
        left[i] = 0.5 * parent[i] + bridge;
        right[i] = 0.5 * parent[i] - bridge;
      }
    }
    incs = std::move(finer);
    dt *= 0.5;
  }

  std::vector<SpectralField> out;
  out.reserve(static_cast<size_t>(substeps()));
  for (int j = 0; j < substeps(); ++j) {
    out.push_back(field_from_coordinates(max_mode_, components_,
                                         incs.data() + static_cast<size_t>(j) * p, 1.0));
  }
  return out;
}

}  // namespace spdelab
