#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace spdelab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Band-limited R^n-valued function on the torus [0, 2pi).
///
/// u(x) = sum_{|k|<=K} coeffs[k] e_k(x),  e_k(x) = (2pi)^{-1/2} e^{ikx}.
///
/// Coefficients are stored two-sided, component-major. The reality condition
/// coeffs[-k] = conj(coeffs[k]) (and Im coeffs[0] = 0) holds exactly: every
/// constructor builds the negative half by mirroring.
class SpectralField {
 public:
  SpectralField() : SpectralField(0, 1) {}

  /// Zero field.
  SpectralField(int max_mode, int components);

  /// Builds from the non-negative half: half[c * (K+1) + k], k = 0..K.
  /// The imaginary part of every k = 0 entry is discarded.
  static SpectralField from_half(int max_mode, int components,
                                 std::span<const cplx> half);

  /// Builds from a two-sided array laid out as [c][k + K]. Throws
  /// ValidationError if the array violates the reality condition by more
  /// than `tol` (relative to its largest entry).
  static SpectralField from_two_sided(int max_mode, int components,
                                      std::span<const cplx> two_sided,
                                      double tol = 1e-12);

  /// Field whose coefficient for mode k >= 0, component c is fn(k, c).
  static SpectralField generate(int max_mode, int components,
                                const std::function<cplx(int, int)>& fn);

  int max_mode() const { return max_mode_; }
  int components() const { return components_; }

  cplx coeff(int k, int c = 0) const {
    return data_[static_cast<size_t>(c) * stride() + static_cast<size_t>(k + max_mode_)];
  }

  /// Modes 0..K of component c.
  std::span<const cplx> half(int c) const {
    return {data_.data() + static_cast<size_t>(c) * stride() + static_cast<size_t>(max_mode_),
            static_cast<size_t>(max_mode_) + 1};
  }

  /// Modes -K..K of component c.
  std::span<const cplx> two_sided(int c) const {
    return {data_.data() + static_cast<size_t>(c) * stride(), stride()};
  }

  /// Multiplies mode k by m(k) for k >= 0 and by conj(m(k)) for -k.
  SpectralField multiply(const std::function<cplx(int)>& m) const;

  /// Restriction/extension to a different band (zero-fills new modes).
  SpectralField resized(int max_mode) const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  bool operator==(const SpectralField&) const = default;

 private:
  size_t stride() const { return 2 * static_cast<size_t>(max_mode_) + 1; }
  void check_same_shape(const SpectralField& o) const;

  int max_mode_;
  int components_;
  std::vector<cplx> data_;
};

/// Samples on the uniform grid x_j = 2pi j / M, component-major [c][j].
class GridField {
 public:
  /// Requires odd M >= 1.
  GridField(int grid_size, int components, std::vector<double> values);

  int grid_size() const { return grid_size_; }
  int components() const { return components_; }
  double x(int j) const { return kTwoPi * j / grid_size_; }
  double value(int j, int c = 0) const {
    return values_[static_cast<size_t>(c) * static_cast<size_t>(grid_size_) + static_cast<size_t>(j)];
  }
  std::span<const double> component(int c) const {
    return {values_.data() + static_cast<size_t>(c) * static_cast<size_t>(grid_size_),
            static_cast<size_t>(grid_size_)};
  }

 private:
  int grid_size_;
  int components_;
  std::vector<double> values_;
};

/// Smallest odd integer >= x.
int smallest_odd_at_least(double x);

/// Evaluates u on the M-point grid (FFT path). Throws ResolutionError unless
/// M is odd and M >= 2K+1.
GridField to_grid(const SpectralField& u, int grid_size);

/// Direct O(K*M) evaluation of the defining sum; checks that the imaginary
/// residue stays below 1e-10 times the field magnitude. Reference path.
GridField to_grid_reference(const SpectralField& u, int grid_size);

/// Discrete Fourier coefficients of grid samples, modes |k| <= K kept.
/// Requires M >= 2K+1; for M > 2K+1 the higher modes are discarded.
SpectralField from_grid(const GridField& g, int max_mode);

/// Point values of u at x_j = 2pi j / M for any M >= 1. Modes that alias on
/// coarse grids are folded. Returns component-major [c][j].
std::vector<double> evaluate_on_grid(const SpectralField& u, int grid_size);

/// Keeps |k| <= cutoff.
SpectralField project(const SpectralField& u, int cutoff);

/// Keeps lo < |k| <= hi.
SpectralField band_project(const SpectralField& u, int lo, int hi);

/// (sum_k |coeffs[k]|^2 (1 + k^2)^s)^{1/2}, Euclidean norm over components.
double sobolev_norm(const SpectralField& u, double s);

/// Real L^2([0,2pi]) pairing <u, v> summed over components.
double l2_inner(const SpectralField& u, const SpectralField& v);

/// Max over components of max_j |u(x_j)| on an oversampled grid of
/// M = smallest odd >= 4(2K+1) points. Approximates the true sup norm.
double sup_norm(const SpectralField& u);

/// Largest absolute coefficient difference.
double max_abs_diff(const SpectralField& a, const SpectralField& b);

/// Spatial mean (1/2pi) int u dx of component c.
inline double spatial_mean(const SpectralField& u, int c = 0) {
  return u.coeff(0, c).real() / std::sqrt(kTwoPi);
}

/// Constant field with value `value` in every listed component.
SpectralField constant_field(int max_mode, std::span<const double> value);

/// CSV dump `x,comp0[,comp1,...]`, 17 significant digits.
void write_csv(std::ostream& os, const GridField& g);

}  // namespace spdelab
