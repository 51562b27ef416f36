#pragma once

// Thin RAII wrapper over FFTW real-to-complex 2D transforms on a square
// doubled (zero-padded) grid. Plans use FFTW_ESTIMATE so that identical
// inputs give bit-identical outputs from run to run.

#include <complex>
#include <cstddef>
#include <span>

namespace pks {

class RealFft2 {
 public:
  /// size x size real transform; size is the padded (2N) extent.
  explicit RealFft2(int size);
  ~RealFft2();
  RealFft2(const RealFft2&) = delete;
  RealFft2& operator=(const RealFft2&) = delete;

  int size() const { return size_; }
  /// Number of stored complex coefficients: size * (size/2 + 1).
  std::size_t spectrum_size() const;

  /// Row-major real buffer, index [r * size + c]; c is the fast index.
  std::span<double> real();
  std::span<std::complex<double>> spectrum();

  /// real() -> spectrum()
  void forward();
  /// spectrum() -> real(), unnormalized (scaled by size^2).
  void inverse();

  /// Signed frequency index for row/column position a.
  int frequency(int a) const { return a <= size_ / 2 ? a : a - size_; }

 private:
  int size_;
  double* real_ = nullptr;
  std::complex<double>* spectrum_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

/// Per-thread cached transform of the given size. The returned object is
/// owned by the calling thread; callers must not hold it across calls that
/// may request the same size.
RealFft2& thread_fft(int size);

}  // namespace pks
