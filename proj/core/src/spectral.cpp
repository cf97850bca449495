#include "spdelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "spdelab/errors.hpp"
#include "spdelab/fft.hpp"

namespace spdelab {
namespace {

const double kInvSqrtTwoPi = 1.0 / std::sqrt(kTwoPi);
const double kSqrtTwoPi = std::sqrt(kTwoPi);

void require_shape(int max_mode, int components) {
  if (max_mode < 0) throw ResolutionError("max mode must be >= 0");
  if (components < 1) throw ResolutionError("component count must be >= 1");
}

void require_grid(const SpectralField& u, int grid_size) {
  if (grid_size % 2 == 0) {
    throw ResolutionError("grid size " + std::to_string(grid_size) + " must be odd");
  }
  if (grid_size < 2 * u.max_mode() + 1) {
    throw ResolutionError("grid size " + std::to_string(grid_size) +
                          " below 2K+1 = " + std::to_string(2 * u.max_mode() + 1));
  }
}

}  // namespace

SpectralField::SpectralField(int max_mode, int components)
    : max_mode_(max_mode), components_(components) {
  require_shape(max_mode, components);
  data_.assign(stride() * static_cast<size_t>(components), cplx{});
}

SpectralField SpectralField::from_half(int max_mode, int components,
                                       std::span<const cplx> half) {
  SpectralField u(max_mode, components);
  const size_t nk = static_cast<size_t>(max_mode) + 1;
  if (half.size() != nk * static_cast<size_t>(components)) {
    throw ResolutionError("from_half: expected " + std::to_string(nk * components) +
                          " coefficients, got " + std::to_string(half.size()));
  }
  for (int c = 0; c < components; ++c) {
    cplx* row = u.data_.data() + static_cast<size_t>(c) * u.stride();
    const cplx* src = half.data() + static_cast<size_t>(c) * nk;
    row[max_mode] = cplx(src[0].real(), 0.0);
    for (int k = 1; k <= max_mode; ++k) {
      row[max_mode + k] = src[k];
      row[max_mode - k] = std::conj(src[k]);
    }
  }
  return u;
}

SpectralField SpectralField::from_two_sided(int max_mode, int components,
                                            std::span<const cplx> two_sided,
                                            double tol) {
  const size_t stride = 2 * static_cast<size_t>(max_mode) + 1;
  if (two_sided.size() != stride * static_cast<size_t>(components)) {
    throw ResolutionError("from_two_sided: size mismatch");
  }
  double scale = 0.0;
  for (const cplx& z : two_sided) scale = std::max(scale, std::abs(z));
  const double bound = tol * std::max(scale, 1.0);
  std::vector<cplx> half(static_cast<size_t>(max_mode + 1) * static_cast<size_t>(components));
  for (int c = 0; c < components; ++c) {
    const cplx* row = two_sided.data() + static_cast<size_t>(c) * stride;
    if (std::abs(row[max_mode].imag()) > bound) {
      throw ValidationError("reality condition violated: Im coeffs[0] != 0");
    }
    for (int k = 1; k <= max_mode; ++k) {
      if (std::abs(row[max_mode - k] - std::conj(row[max_mode + k])) > bound) {
        throw ValidationError("reality condition violated at mode " + std::to_string(k));
      }
    }
    for (int k = 0; k <= max_mode; ++k) {
      half[static_cast<size_t>(c) * static_cast<size_t>(max_mode + 1) + static_cast<size_t>(k)] =
          row[max_mode + k];
    }
  }
  return from_half(max_mode, components, half);
}

SpectralField SpectralField::generate(int max_mode, int components,
                                      const std::function<cplx(int, int)>& fn) {
  std::vector<cplx> half(static_cast<size_t>(max_mode + 1) * static_cast<size_t>(components));
  for (int c = 0; c < components; ++c) {
    for (int k = 0; k <= max_mode; ++k) {
      half[static_cast<size_t>(c) * static_cast<size_t>(max_mode + 1) + static_cast<size_t>(k)] =
          fn(k, c);
    }
  }
  return from_half(max_mode, components, half);
}

SpectralField SpectralField::multiply(const std::function<cplx(int)>& m) const {
  SpectralField out(max_mode_, components_);
  std::vector<cplx> symbol(static_cast<size_t>(max_mode_) + 1);
  for (int k = 0; k <= max_mode_; ++k) symbol[static_cast<size_t>(k)] = m(k);
  for (int c = 0; c < components_; ++c) {
    const cplx* src = data_.data() + static_cast<size_t>(c) * stride();
    cplx* dst = out.data_.data() + static_cast<size_t>(c) * stride();
    dst[max_mode_] = cplx((src[max_mode_] * symbol[0]).real(), 0.0);
    for (int k = 1; k <= max_mode_; ++k) {
      const cplx v = src[max_mode_ + k] * symbol[static_cast<size_t>(k)];
      dst[max_mode_ + k] = v;
      dst[max_mode_ - k] = std::conj(v);
    }
  }
  return out;
}

SpectralField SpectralField::resized(int max_mode) const {
  SpectralField out(max_mode, components_);
  const int kk = std::min(max_mode, max_mode_);
  for (int c = 0; c < components_; ++c) {
    for (int k = -kk; k <= kk; ++k) {
      out.data_[static_cast<size_t>(c) * out.stride() + static_cast<size_t>(k + max_mode)] =
          data_[static_cast<size_t>(c) * stride() + static_cast<size_t>(k + max_mode_)];
    }
  }
  return out;
}

void SpectralField::check_same_shape(const SpectralField& o) const {
  if (o.max_mode_ != max_mode_ || o.components_ != components_) {
    throw ResolutionError("field shape mismatch");
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  check_same_shape(o);
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  check_same_shape(o);
  for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (cplx& z : data_) z *= s;
  return *this;
}

GridField::GridField(int grid_size, int components, std::vector<double> values)
    : grid_size_(grid_size), components_(components), values_(std::move(values)) {
  if (grid_size < 1 || grid_size % 2 == 0) {
    throw ResolutionError("grid size must be odd and positive");
  }
  if (values_.size() != static_cast<size_t>(grid_size) * static_cast<size_t>(components)) {
    throw ResolutionError("grid values size mismatch");
  }
}

int smallest_odd_at_least(double x) {
  int m = static_cast<int>(std::ceil(x));
  if (m < 1) m = 1;
  return (m % 2 == 0) ? m + 1 : m;
}

GridField to_grid(const SpectralField& u, int grid_size) {
  require_grid(u, grid_size);
  return GridField(grid_size, u.components(), evaluate_on_grid(u, grid_size));
}

GridField to_grid_reference(const SpectralField& u, int grid_size) {
  require_grid(u, grid_size);
  const int kmax = u.max_mode();
  const size_t m = static_cast<size_t>(grid_size);
  std::vector<double> values(m * static_cast<size_t>(u.components()));
  for (int c = 0; c < u.components(); ++c) {
    double magnitude = 0.0;
    for (int k = -kmax; k <= kmax; ++k) magnitude += std::abs(u.coeff(k, c));
    for (size_t j = 0; j < m; ++j) {
      cplx sum{};
      for (int k = -kmax; k <= kmax; ++k) {
        const double phase = kTwoPi * static_cast<double>((static_cast<long long>(k) * static_cast<long long>(j)) %
                                                          static_cast<long long>(grid_size)) /
                             grid_size;
        sum += u.coeff(k, c) * cplx(std::cos(phase), std::sin(phase));
      }
      sum *= kInvSqrtTwoPi;
      if (std::abs(sum.imag()) > 1e-10 * std::max(magnitude, 1.0)) {
        throw Error("to_grid_reference: imaginary residue exceeds tolerance");
      }
      values[static_cast<size_t>(c) * m + j] = sum.real();
    }
  }
  return GridField(grid_size, u.components(), std::move(values));
}

std::vector<double> evaluate_on_grid(const SpectralField& u, int grid_size) {
  if (grid_size < 1) throw ResolutionError("grid size must be positive");
  const size_t m = static_cast<size_t>(grid_size);
  const size_t nh = m / 2 + 1;
  std::vector<double> values(m * static_cast<size_t>(u.components()));
  std::vector<cplx> folded(nh);
  for (int c = 0; c < u.components(); ++c) {
    std::fill(folded.begin(), folded.end(), cplx{});
    const auto coeffs = u.two_sided(c);
    const int kmax = u.max_mode();
    if (2 * kmax + 1 <= grid_size) {
      for (int k = 0; k <= kmax; ++k) folded[static_cast<size_t>(k)] = coeffs[static_cast<size_t>(kmax + k)];
    } else {
      // Fold every mode k onto its residue r = k mod M, keeping r <= M/2 via
      // conjugate symmetry of the full DFT array.
      std::vector<cplx> full(m);
      for (int k = -kmax; k <= kmax; ++k) {
        const long long r = ((static_cast<long long>(k) % grid_size) + grid_size) % grid_size;
        full[static_cast<size_t>(r)] += coeffs[static_cast<size_t>(k + kmax)];
      }
      for (size_t r = 0; r < nh; ++r) folded[r] = full[r];
    }
    for (cplx& z : folded) z *= kInvSqrtTwoPi;
    fft::backward(folded, std::span<double>(values.data() + static_cast<size_t>(c) * m, m));
  }
  return values;
}

SpectralField from_grid(const GridField& g, int max_mode) {
  if (g.grid_size() < 2 * max_mode + 1) {
    throw ResolutionError("from_grid: grid size below 2K+1");
  }
  const size_t m = static_cast<size_t>(g.grid_size());
  const size_t nk = static_cast<size_t>(max_mode) + 1;
  std::vector<cplx> spectrum(m / 2 + 1);
  std::vector<cplx> half(nk * static_cast<size_t>(g.components()));
  const double scale = kSqrtTwoPi / static_cast<double>(m);
  for (int c = 0; c < g.components(); ++c) {
    fft::forward(g.component(c), spectrum);
    for (size_t k = 0; k < nk; ++k) half[static_cast<size_t>(c) * nk + k] = spectrum[k] * scale;
  }
  return SpectralField::from_half(max_mode, g.components(), half);
}

SpectralField project(const SpectralField& u, int cutoff) {
  return u.multiply([cutoff](int k) { return k <= cutoff ? cplx(1.0) : cplx(0.0); });
}

SpectralField band_project(const SpectralField& u, int lo, int hi) {
  return u.multiply([lo, hi](int k) { return (k > lo && k <= hi) ? cplx(1.0) : cplx(0.0); });
}

double sobolev_norm(const SpectralField& u, double s) {
  double sum = 0.0;
  const int kmax = u.max_mode();
  for (int c = 0; c < u.components(); ++c) {
    for (int k = -kmax; k <= kmax; ++k) {
      const double w = std::pow(1.0 + static_cast<double>(k) * k, s);
      sum += std::norm(u.coeff(k, c)) * w;
    }
  }
  return std::sqrt(sum);
}

double l2_inner(const SpectralField& u, const SpectralField& v) {
  if (u.max_mode() != v.max_mode() || u.components() != v.components()) {
    throw ResolutionError("l2_inner: shape mismatch");
  }
  double sum = 0.0;
  const int kmax = u.max_mode();
  for (int c = 0; c < u.components(); ++c) {
    for (int k = -kmax; k <= kmax; ++k) sum += (std::conj(u.coeff(k, c)) * v.coeff(k, c)).real();
  }
  return sum;
}

double sup_norm(const SpectralField& u) {
  const int m = smallest_odd_at_least(4.0 * (2.0 * u.max_mode() + 1.0));
  const auto values = evaluate_on_grid(u, m);
  double best = 0.0;
  for (double v : values) best = std::max(best, std::abs(v));
  return best;
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  if (a.max_mode() != b.max_mode() || a.components() != b.components()) {
    throw ResolutionError("max_abs_diff: shape mismatch");
  }
  double best = 0.0;
  for (int c = 0; c < a.components(); ++c) {
    const auto x = a.two_sided(c);
    const auto y = b.two_sided(c);
    for (size_t i = 0; i < x.size(); ++i) best = std::max(best, std::abs(x[i] - y[i]));
  }
  return best;
}

SpectralField constant_field(int max_mode, std::span<const double> value) {
  return SpectralField::generate(max_mode, static_cast<int>(value.size()), [&](int k, int c) {
    return k == 0 ? cplx(value[static_cast<size_t>(c)] * kSqrtTwoPi, 0.0) : cplx{};
  });
}

void write_csv(std::ostream& os, const GridField& g) {
  os << "x";
  for (int c = 0; c < g.components(); ++c) os << ",comp" << c;
  os << '\n';
  const auto old_precision = os.precision(17);
  for (int j = 0; j < g.grid_size(); ++j) {
    os << g.x(j);
    for (int c = 0; c < g.components(); ++c) os << ',' << g.value(j, c);
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace spdelab
