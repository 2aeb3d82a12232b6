#include "fft.h"

#include <algorithm>
#include <mutex>
#include <new>

namespace parafuzz::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t size) : size_(size) {
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(size_);
  spec_ = fftw_alloc_complex(size_ / 2 + 1);
  if (real_ == nullptr || spec_ == nullptr) {
    fftw_free(real_);
    fftw_free(spec_);
    throw std::bad_alloc();
  }
  const int n = static_cast<int>(size_);
  forward_ = fftw_plan_dft_r2c_1d(n, real_, spec_, FFTW_ESTIMATE);
  inverse_ = fftw_plan_dft_c2r_1d(n, spec_, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(forward_);
  fftw_destroy_plan(inverse_);
  fftw_free(real_);
  fftw_free(spec_);
}

std::vector<std::complex<double>> RealFft::forward(std::span<const double> input) {
  const std::size_t n = std::min(input.size(), size_);
  std::copy_n(input.begin(), n, real_);
  std::fill(real_ + n, real_ + size_, 0.0);
  fftw_execute(forward_);
  std::vector<std::complex<double>> out(bins());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {spec_[k][0], spec_[k][1]};
  return out;
}

std::vector<double> RealFft::power(std::span<const double> input) {
  const std::size_t n = std::min(input.size(), size_);
  std::copy_n(input.begin(), n, real_);
  std::fill(real_ + n, real_ + size_, 0.0);
  fftw_execute(forward_);
  std::vector<double> out(bins());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = spec_[k][0] * spec_[k][0] + spec_[k][1] * spec_[k][1];
  return out;
}

std::vector<double> RealFft::inverse(std::span<const std::complex<double>> spectrum) {
  for (std::size_t k = 0; k < bins(); ++k) {
    const auto v = k < spectrum.size() ? spectrum[k] : std::complex<double>{};
    spec_[k][0] = v.real();
    spec_[k][1] = v.imag();
  }
  fftw_execute(inverse_);
  return std::vector<double>(real_, real_ + size_);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace parafuzz::detail
