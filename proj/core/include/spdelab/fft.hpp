#pragma once

#include <complex>
#include <span>

namespace spdelab::fft {

// Thin wrapper around FFTW real transforms. Plans are created once per size
// with FFTW_ESTIMATE (deterministic plan choice) and shared between threads;
// execution uses per-thread aligned scratch buffers.
//
// Conventions (unnormalized):
//   forward:  out[k] = sum_j in[j] e^{-2 pi i k j / M},  k = 0..M/2
//   backward: out[j] = sum_k in[k] e^{+2 pi i k j / M}   (Hermitian completion)

/// Real-to-half-complex transform of size in.size(); out must hold M/2+1.
void forward(std::span<const double> in, std::span<std::complex<double>> out);

/// Half-complex-to-real transform producing out.size() = M samples;
/// in must hold M/2+1 entries (entries above the band may be zero).
void backward(std::span<const std::complex<double>> in, std::span<double> out);

}  // namespace spdelab::fft
