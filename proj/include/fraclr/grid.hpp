#pragma once

// Periodic grid description and sampled field containers.
//
// Fields live on the uniform grid of the torus [0, L)^dim with N points per
// axis (N a power of two), stored row-major. Discrete frequencies per axis are
// xi_k = 2*pi*k/L with integer k in [-N/2, N/2), kept in FFT-natural storage
// order (index a holds k = a for a < N/2, k = a - N otherwise).

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraclr {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTau = 2.0 * kPi;

struct GridSpec {
  int dim = 1;           // 1 or 2
  int n = 256;           // points per axis, power of two
  double length = kTau;  // physical period L per axis

  double spacing() const { return length / static_cast<double>(n); }

  std::size_t total() const {
    std::size_t t = static_cast<std::size_t>(n);
    return dim == 2 ? t * t : t;
  }

  // Cell volume h^dim used by quadrature norms.
  double cell_volume() const {
    const double h = spacing();
    return dim == 2 ? h * h : h;
  }

  void validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("GridSpec: dim must be 1 or 2");
    if (n < 16 || (n & (n - 1)) != 0) throw std::invalid_argument("GridSpec: n must be a power of two >= 16");
    const int n_max = dim == 1 ? 4096 : 256;
    if (n > n_max) throw std::invalid_argument("GridSpec: n exceeds supported maximum for this dimension");
    if (!(length > 0.0)) throw std::invalid_argument("GridSpec: length must be positive");
  }

  bool operator==(const GridSpec&) const = default;
};

// Integer frequency represented by storage index a (0 <= a < n).
inline int freq_of_index(int a, int n) { return a < n / 2 ? a : a - n; }

// Storage index of integer frequency k in [-n/2, n/2).
inline int index_of_freq(int k, int n) { return k >= 0 ? k : k + n; }

// Per-axis integer frequencies of a flat row-major index.
inline std::array<int, 2> int_freqs(const GridSpec& g, std::size_t flat) {
  if (g.dim == 1) return {freq_of_index(static_cast<int>(flat), g.n), 0};
  const int a0 = static_cast<int>(flat) / g.n;
  const int a1 = static_cast<int>(flat) % g.n;
  return {freq_of_index(a0, g.n), freq_of_index(a1, g.n)};
}

// Physical wavevector (2*pi/L times the integer frequency tuple).
inline std::array<double, 2> wavevector(const GridSpec& g, std::size_t flat) {
  const auto k = int_freqs(g, flat);
  const double unit = kTau / g.length;
  return {unit * k[0], unit * k[1]};
}

struct MultiIndex {
  std::array<int, 2> entries{0, 0};

  MultiIndex() = default;
  explicit MultiIndex(int a0) : entries{a0, 0} {}
  MultiIndex(int a0, int a1) : entries{a0, a1} {}

  int order() const { return entries[0] + entries[1]; }

  void validate(int dim) const {
    if (entries[0] < 0 || entries[1] < 0) throw std::invalid_argument("MultiIndex: entries must be non-negative");
    if (dim == 1 && entries[1] != 0) throw std::invalid_argument("MultiIndex: second entry must be zero in 1D");
    if (order() > 4) throw std::invalid_argument("MultiIndex: total order above 4 is unsupported");
  }

  bool operator==(const MultiIndex&) const = default;
};

struct RealField {
  GridSpec grid;
  std::vector<double> values;

  static RealField zeros(const GridSpec& g) {
    g.validate();
    return RealField{g, std::vector<double>(g.total(), 0.0)};
  }
};

struct SpectralField {
  GridSpec grid;
  std::vector<std::complex<double>> coeffs;  // FFT-natural order, row-major

  static SpectralField zeros(const GridSpec& g) {
    g.validate();
    return SpectralField{g, std::vector<std::complex<double>>(g.total(), 0.0)};
  }
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grids do not match");
}

}  // namespace fraclr
