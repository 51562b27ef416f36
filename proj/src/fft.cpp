#include "pks/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <new>

namespace pks {
namespace {
// The FFTW planner is not thread-safe; execution is.
std::mutex g_planner_mutex;
}  // namespace

RealFft2::RealFft2(int size) : size_(size) {
  const std::size_t nreal = static_cast<std::size_t>(size) * size;
  real_ = fftw_alloc_real(nreal);
  spectrum_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(spectrum_size()));
  if (!real_ || !spectrum_) throw std::bad_alloc();
  auto* cplx = reinterpret_cast<fftw_complex*>(spectrum_);
  std::lock_guard lock(g_planner_mutex);
  forward_plan_ = fftw_plan_dft_r2c_2d(size, size, real_, cplx, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_2d(size, size, cplx, real_, FFTW_ESTIMATE);
}

RealFft2::~RealFft2() {
  std::lock_guard lock(g_planner_mutex);
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_);
  fftw_free(spectrum_);
}

std::size_t RealFft2::spectrum_size() const {
  return static_cast<std::size_t>(size_) * (size_ / 2 + 1);
}

std::span<double> RealFft2::real() {
  return {real_, static_cast<std::size_t>(size_) * size_};
}

std::span<std::complex<double>> RealFft2::spectrum() { return {spectrum_, spectrum_size()}; }

// c2r destroys its input; callers always refill the spectrum before reuse.
void RealFft2::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void RealFft2::inverse() { fftw_execute(static_cast<fftw_plan>(inverse_plan_)); }

RealFft2& thread_fft(int size) {
  thread_local std::map<int, std::unique_ptr<RealFft2>> cache;
  auto& slot = cache[size];
  if (!slot) slot = std::make_unique<RealFft2>(size);
  return *slot;
}

}  // namespace pks
