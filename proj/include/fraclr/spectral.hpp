#pragma once

// Forward/inverse spectral transforms and Fourier-multiplier operators.
//
// Normalization: to_spectral returns Fourier-series coefficients
//   c_k = N^{-dim} * sum_i f_i e^{-i xi_k . x_i},
// and to_real evaluates the unscaled series f_i = sum_k c_k e^{i xi_k . x_i}.
// With this pairing, Parseval reads  lp_norm(f,2)^2 = L^dim * sum_k |c_k|^2,
// and a multiplier m(xi) acts coefficient-wise in either normalization.
//
// Zero-frequency convention for the Riesz multiplier |xi|^s: value 0 for every
// s != 0 (the homogeneous potential annihilates constants; negative orders are
// only used on mean-zero or band-localized data), value 1 for s = 0 so that
// D^0 is the identity.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fraclr/fft.hpp"
#include "fraclr/grid.hpp"

namespace fraclr {

inline SpectralField to_spectral(const RealField& f) {
  f.grid.validate();
  if (f.values.size() != f.grid.total()) throw std::invalid_argument("to_spectral: value count does not match grid");
  SpectralField out;
  out.grid = f.grid;
  out.coeffs.assign(f.values.begin(), f.values.end());
  detail::fft_nd(out.coeffs, f.grid.dim, f.grid.n, -1);
  const double scale = 1.0 / static_cast<double>(f.grid.total());
  for (auto& c : out.coeffs) c *= scale;
  return out;
}

// Unscaled inverse series evaluation; result generally complex.
inline std::vector<std::complex<double>> inverse_transform(const SpectralField& F) {
  if (F.coeffs.size() != F.grid.total()) throw std::invalid_argument("inverse_transform: coeff count does not match grid");
  std::vector<std::complex<double>> vals(F.coeffs);
  detail::fft_nd(vals, F.grid.dim, F.grid.n, +1);
  return vals;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs(const RealField& f) { return max_abs(f.values); }

// Coefficient l1 norm; upper bounds the physical sup of the series.
inline double spectral_l1(const SpectralField& F) {
  double acc = 0.0;
  for (const auto& c : F.coeffs) acc += std::abs(c);
  return acc;
}

// Inverse transform that asserts the result is numerically real. The
// imaginary residue is compared against the coefficient l1 norm (an upper
// bound for the physical sup of the series) or, when larger, a caller-supplied
// reference magnitude. Operators that filter a field pass the gross scale of
// their input data as the reference: the filtered output may legitimately
// shrink below the input's roundoff dust, while a conjugate-symmetry bug in
// the operator logic would leave an imaginary part at the full data scale and
// still throw.
inline RealField to_real(const SpectralField& F, double rel_tol = 1e-9, double reference = 0.0) {
  const double scale = std::max(spectral_l1(F), reference);
  const auto vals = inverse_transform(F);
  RealField out;
  out.grid = F.grid;
  out.values.resize(vals.size());
  double max_im = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    out.values[i] = vals[i].real();
    max_im = std::max(max_im, std::abs(vals[i].imag()));
  }
  if (max_im > rel_tol * std::max(scale, 1e-300)) {
    throw std::runtime_error("to_real: imaginary residue above tolerance");
  }
  return out;
}

// Riesz multiplier value at radial frequency r = |xi|.
inline double riesz_multiplier(double r, double s) {
  if (s == 0.0) return 1.0;
  if (r == 0.0) return 0.0;
  return std::pow(r, s);
}

inline SpectralField riesz_potential(const SpectralField& F, double s) {
  SpectralField out = F;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    const auto xi = wavevector(F.grid, i);
    const double r = F.grid.dim == 2 ? std::hypot(xi[0], xi[1]) : std::abs(xi[0]);
    out.coeffs[i] *= riesz_multiplier(r, s);
  }
  return out;
}

inline RealField riesz_potential(const RealField& f, double s) {
  const SpectralField F = to_spectral(f);
  double m_max = 0.0;
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
    const auto xi = wavevector(F.grid, i);
    const double r = F.grid.dim == 2 ? std::hypot(xi[0], xi[1]) : std::abs(xi[0]);
    m_max = std::max(m_max, riesz_multiplier(r, s));
  }
  return to_real(riesz_potential(F, s), 1e-9, spectral_l1(F) * m_max);
}

inline SpectralField partial_derivative(const SpectralField& F, const MultiIndex& alpha) {
  alpha.validate(F.grid.dim);
  SpectralField out = F;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    const auto xi = wavevector(F.grid, i);
    std::complex<double> m{1.0, 0.0};
    for (int ax = 0; ax < F.grid.dim; ++ax) {
      for (int rep = 0; rep < alpha.entries[ax]; ++rep) m *= std::complex<double>(0.0, xi[ax]);
    }
    out.coeffs[i] *= m;
  }
  return out;
}

inline RealField partial_derivative(const RealField& f, const MultiIndex& alpha) {
  const SpectralField F = to_spectral(f);
  const double m_max = std::pow(kPi * f.grid.n / f.grid.length, alpha.order());
  return to_real(partial_derivative(F, alpha), 1e-9, spectral_l1(F) * m_max);
}

// (h^dim * sum |f_i|^p)^{1/p}; uniform-grid quadrature, 1 <= p < infinity.
inline double lp_norm(const RealField& f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp_norm: require 1 <= p < infinity");
  double acc = 0.0;
  for (double x : f.values) acc += std::pow(std::abs(x), p);
  return std::pow(f.grid.cell_volume() * acc, 1.0 / p);
}

inline double l2_norm(const RealField& f) {
  double acc = 0.0;
  for (double x : f.values) acc += x * x;
  return std::sqrt(f.grid.cell_volume() * acc);
}

// Pointwise helpers used throughout operator assembly.
inline RealField multiply(const RealField& a, const RealField& b) {
  require_same_grid(a.grid, b.grid, "multiply");
  RealField out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= b.values[i];
  return out;
}

inline RealField& axpy(RealField& y, double a, const RealField& x) {
  require_same_grid(y.grid, x.grid, "axpy");
  for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += a * x.values[i];
  return y;
}

inline RealField scaled(const RealField& f, double a) {
  RealField out = f;
  for (auto& v : out.values) v *= a;
  return out;
}

inline RealField subtract(const RealField& a, const RealField& b) {
  require_same_grid(a.grid, b.grid, "subtract");
  RealField out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

inline std::vector<RealField> gradient(const RealField& f) {
  std::vector<RealField> out;
  out.push_back(partial_derivative(f, f.grid.dim == 1 ? MultiIndex(1) : MultiIndex(1, 0)));
  if (f.grid.dim == 2) out.push_back(partial_derivative(f, MultiIndex(0, 1)));
  return out;
}

inline RealField normalize_l2(const RealField& f) {
  const double nrm = l2_norm(f);
  if (nrm == 0.0) throw std::invalid_argument("normalize_l2: zero field");
  return scaled(f, 1.0 / nrm);
}

}  // namespace fraclr
