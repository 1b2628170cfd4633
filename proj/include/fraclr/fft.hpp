#pragma once

// In-place iterative radix-2 FFT for power-of-two lengths, plus the row/column
// sweep for 2D row-major data. Self-contained and stateless: every call is
// deterministic and safe to run concurrently. Sizes here are at most 4096 per
// axis, so the O(n log n) twiddle evaluations via std::polar are immaterial
// and keep the accumulation error at rounding level.

#include <complex>
#include <cstddef>
#include <vector>

#include "fraclr/grid.hpp"

namespace fraclr::detail {

// sign = -1: forward (e^{-i...}); sign = +1: inverse (unscaled).
inline void fft_pow2(std::complex<double>* a, std::size_t n, int sign) {
  if (n < 2) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j |= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * kTau / static_cast<double>(len);
    const std::size_t half = len >> 1;
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const std::complex<double> w = std::polar(1.0, ang * static_cast<double>(j));
        const std::complex<double> u = a[base + j];
        const std::complex<double> v = a[base + j + half] * w;
        a[base + j] = u + v;
        a[base + j + half] = u - v;
      }
    }
  }
}

// Transform along every axis of a row-major dim/n block.
inline void fft_nd(std::vector<std::complex<double>>& a, int dim, int n, int sign) {
  if (dim == 1) {
    fft_pow2(a.data(), static_cast<std::size_t>(n), sign);
    return;
  }
  const std::size_t un = static_cast<std::size_t>(n);
  for (std::size_t row = 0; row < un; ++row) {
    fft_pow2(a.data() + row * un, un, sign);
  }
  std::vector<std::complex<double>> col(un);
  for (std::size_t c = 0; c < un; ++c) {
    for (std::size_t r = 0; r < un; ++r) col[r] = a[r * un + c];
    fft_pow2(col.data(), un, sign);
    for (std::size_t r = 0; r < un; ++r) a[r * un + c] = col[r];
  }
}

}  // namespace fraclr::detail
