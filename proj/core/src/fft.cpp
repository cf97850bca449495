#include "spdelab/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>

#include "spdelab/errors.hpp"

namespace spdelab::fft {
namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// FFTW's planner is not thread-safe; all planning goes through this mutex.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const Plans& plans_for(int m) {
  static std::map<int, Plans> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  auto* r = fftw_alloc_real(static_cast<size_t>(m));
  auto* c = fftw_alloc_complex(static_cast<size_t>(m / 2 + 1));
  Plans p;
  p.r2c = fftw_plan_dft_r2c_1d(m, r, c, FFTW_ESTIMATE);
  p.c2r = fftw_plan_dft_c2r_1d(m, c, r, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  fftw_free(r);
  fftw_free(c);
  return cache.emplace(m, p).first->second;
}

// Per-thread scratch with FFTW alignment; grows monotonically.
struct Scratch {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  size_t real_cap = 0;
  size_t cplx_cap = 0;

  ~Scratch() {
    if (real) fftw_free(real);
    if (cplx) fftw_free(cplx);
  }

  void reserve(size_t m) {
    if (real_cap < m) {
      if (real) fftw_free(real);
      real = fftw_alloc_real(m);
      real_cap = m;
    }
    const size_t mc = m / 2 + 1;
    if (cplx_cap < mc) {
      if (cplx) fftw_free(cplx);
      cplx = fftw_alloc_complex(mc);
      cplx_cap = mc;
    }
  }
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

}  // namespace

void forward(std::span<const double> in, std::span<std::complex<double>> out) {
  const int m = static_cast<int>(in.size());
  if (m < 1 || out.size() < static_cast<size_t>(m / 2 + 1)) {
    throw ResolutionError("fft::forward: output too short");
  }
  const Plans& p = plans_for(m);
  Scratch& s = scratch();
  s.reserve(static_cast<size_t>(m));
  std::copy(in.begin(), in.end(), s.real);
  fftw_execute_dft_r2c(p.r2c, s.real, s.cplx);
  for (size_t k = 0; k < static_cast<size_t>(m / 2 + 1); ++k) out[k] = {s.cplx[k][0], s.cplx[k][1]};
}

void backward(std::span<const std::complex<double>> in, std::span<double> out) {
  const int m = static_cast<int>(out.size());
  if (m < 1 || in.size() < static_cast<size_t>(m / 2 + 1)) {
    throw ResolutionError("fft::backward: input too short");
  }
  const Plans& p = plans_for(m);
  Scratch& s = scratch();
  s.reserve(static_cast<size_t>(m));
  for (size_t k = 0; k < static_cast<size_t>(m / 2 + 1); ++k) {
    s.cplx[k][0] = in[k].real();
    s.cplx[k][1] = in[k].imag();
  }
  fftw_execute_dft_c2r(p.c2r, s.cplx, s.real);
  std::copy(s.real, s.real + m, out.begin());
}

}  // namespace spdelab::fft
