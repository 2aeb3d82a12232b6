#pragma once

#include <fftw3.h>

#include <complex>
#include <span>
#include <vector>

namespace parafuzz::detail {

/// Owns a pair of FFTW real/half-complex plans for one transform size.
/// Plan creation is serialized internally; execution is re-entrant per
/// instance only.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  /// Zero-pads (or truncates) the input to size() and returns size()/2 + 1 bins.
  std::vector<std::complex<double>> forward(std::span<const double> input);

  /// |X_k|^2 for the non-negative frequency bins.
  std::vector<double> power(std::span<const double> input);

  /// Unnormalized inverse of forward(); divide by size() to recover the input.
  std::vector<double> inverse(std::span<const std::complex<double>> spectrum);

 private:
  std::size_t size_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

std::size_t next_pow2(std::size_t n);

}  // namespace parafuzz::detail
