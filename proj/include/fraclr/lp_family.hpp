#pragma once

// Smooth dyadic partition of unity and the associated band projections.
//
// The mother profile is built from the classic C^infinity bump:
//   psi(t) = exp(-1/t) for t > 0 (else 0),  step(t) = psi(t)/(psi(t)+psi(1-t)),
//   S(r) = 1 for r <= 1, step(2-r) for 1 < r < 2, 0 for r >= 2.
// The annulus profile is PhiHat(xi) = S(|xi|) - S(2|xi|), supported in
// 1/2 < |xi| < 2 and non-negative because S is non-increasing; the low-pass
// profile at level j is PsiHat_j(xi) = S(2^{-j}|xi|). Telescoping of S makes
// sum_j PhiHat(2^{-j} xi) an exact partition of unity away from xi = 0.
//
// A family carries a finite band range [j_min, j_max]; j_max is capped so the
// top band's support 2^{j_max+1} stays inside the Nyquist disc pi*N/L.
// Low-pass tables extend a few levels below j_min because paraproduct sums
// reference PsiHat_{k-3}.

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "fraclr/grid.hpp"
#include "fraclr/maximal.hpp"
#include "fraclr/spectral.hpp"

namespace fraclr {

inline double bump_exp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// Smooth monotone step: 0 for t <= 0, 1 for t >= 1.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = bump_exp(t);
  const double b = bump_exp(1.0 - t);
  return a / (a + b);
}

// Radial low-pass profile S(r).
inline double radial_step(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  return smooth_step(2.0 - r);
}

// PhiHat at radius r (level 0 band profile).
inline double band_profile(double r) { return radial_step(r) - radial_step(2.0 * r); }

// PhiHat_j and PsiHat_j at radius r; ldexp keeps the dyadic scaling exact.
inline double band_profile_scaled(int j, double r) {
  return radial_step(std::ldexp(r, -j)) - radial_step(std::ldexp(r, 1 - j));
}
inline double lowpass_profile_scaled(int j, double r) { return radial_step(std::ldexp(r, -j)); }

// Widened band profile sum_{k=-2}^{2} PhiHat_{j+k}, identically 1 on the
// support of PhiHat_j; telescopes to S(2^{-j-2} r) - S(2^{3-j} r).
inline double widened_band_profile_scaled(int j, double r) {
  return radial_step(std::ldexp(r, -j - 2)) - radial_step(std::ldexp(r, 3 - j));
}

struct LPFamily {
  GridSpec grid;
  int j_min = 0;
  int j_max = 0;
  // Cached multiplier tables over flat frequency indices.
  std::vector<std::vector<double>> band_mult;     // j_min .. j_max
  std::vector<std::vector<double>> lowpass_mult;  // j_min-4 .. j_max
  std::vector<double> radius;                     // |xi| per flat index

  int lowpass_lo() const { return j_min - 4; }

  const std::vector<double>& band_table(int j) const {
    if (j < j_min || j > j_max) throw std::invalid_argument("LPFamily: band index out of range");
    return band_mult[static_cast<std::size_t>(j - j_min)];
  }
  const std::vector<double>& lowpass_table(int j) const {
    if (j < lowpass_lo() || j > j_max) throw std::invalid_argument("LPFamily: low-pass index out of range");
    return lowpass_mult[static_cast<std::size_t>(j - lowpass_lo())];
  }
};

// Largest band index whose support fits under the Nyquist radius pi*N/L.
inline int max_resolvable_band(const GridSpec& g) {
  const double nyq = kPi * g.n / g.length;
  int j = 0;
  while (std::ldexp(1.0, j + 2) <= nyq * (1.0 + 1e-12)) ++j;
  return j;  // 2^{j+1} <= nyquist
}

inline LPFamily build_family(const GridSpec& grid, int j_min, int j_max) {
  grid.validate();
  if (j_min >= j_max) throw std::invalid_argument("build_family: require j_min < j_max");
  const double nyq = kPi * grid.n / grid.length;
  if (std::ldexp(1.0, j_max + 1) > nyq * (1.0 + 1e-12)) {
    throw std::invalid_argument("build_family: j_max band support exceeds the Nyquist disc");
  }
  LPFamily fam;
  fam.grid = grid;
  fam.j_min = j_min;
  fam.j_max = j_max;
  const std::size_t total = grid.total();
  fam.radius.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    const auto xi = wavevector(grid, i);
    fam.radius[i] = grid.dim == 2 ? std::hypot(xi[0], xi[1]) : std::abs(xi[0]);
  }
  for (int j = j_min; j <= j_max; ++j) {
    std::vector<double> tab(total);
    for (std::size_t i = 0; i < total; ++i) tab[i] = band_profile_scaled(j, fam.radius[i]);
    fam.band_mult.push_back(std::move(tab));
  }
  for (int j = fam.lowpass_lo(); j <= j_max; ++j) {
    std::vector<double> tab(total);
    for (std::size_t i = 0; i < total; ++i) tab[i] = lowpass_profile_scaled(j, fam.radius[i]);
    fam.lowpass_mult.push_back(std::move(tab));
  }
  return fam;
}

namespace detail {

inline SpectralField apply_table(const SpectralField& F, const std::vector<double>& tab) {
  SpectralField out = F;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= tab[i];
  return out;
}

}  // namespace detail

inline SpectralField project(const SpectralField& F, const LPFamily& fam, int j) {
  require_same_grid(F.grid, fam.grid, "project");
  return detail::apply_table(F, fam.band_table(j));
}

inline RealField project(const RealField& f, const LPFamily& fam, int j) {
  const SpectralField F = to_spectral(f);
  return to_real(project(F, fam, j), 1e-9, spectral_l1(F));
}

inline SpectralField project_leq(const SpectralField& F, const LPFamily& fam, int j) {
  require_same_grid(F.grid, fam.grid, "project_leq");
  return detail::apply_table(F, fam.lowpass_table(j));
}

inline RealField project_leq(const RealField& f, const LPFamily& fam, int j) {
  const SpectralField F = to_spectral(f);
  return to_real(project_leq(F, fam, j), 1e-9, spectral_l1(F));
}

inline RealField project_gt(const RealField& f, const LPFamily& fam, int j) {
  // Complementary multiplier: P_{>j} = 1 - PsiHat_j, exact in frequency space.
  SpectralField F = to_spectral(f);
  const double ref = spectral_l1(F);
  const auto& tab = fam.lowpass_table(j);
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) F.coeffs[i] *= (1.0 - tab[i]);
  return to_real(F, 1e-9, ref);
}

// Filter by the widened profile (identically 1 on the j-th band's support).
inline RealField project_widened(const RealField& f, const LPFamily& fam, int j) {
  SpectralField F = to_spectral(f);
  const double ref = spectral_l1(F);
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) F.coeffs[i] *= widened_band_profile_scaled(j, fam.radius[i]);
  return to_real(F, 1e-9, ref);
}

struct BandDecomposition {
  std::map<int, RealField> pieces;  // j -> P_j f
  RealField residual_low;           // P_{<= j_min - 1} f
};

inline BandDecomposition band_decompose(const RealField& f, const LPFamily& fam) {
  BandDecomposition out;
  const SpectralField F = to_spectral(f);
  const double ref = spectral_l1(F);
  for (int j = fam.j_min; j <= fam.j_max; ++j) out.pieces.emplace(j, to_real(project(F, fam, j), 1e-9, ref));
  out.residual_low = to_real(project_leq(F, fam, fam.j_min - 1), 1e-9, ref);
  return out;
}

// || ||(2^{sj} P_j f)||_{l^q_j} ||_{L^p} over the family's band range.
inline double triebel_lizorkin_norm(const RealField& f, const LPFamily& fam, double s, double p, double q) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("triebel_lizorkin_norm: require 1 < p < infinity");
  if (!(q >= 1.0)) throw std::invalid_argument("triebel_lizorkin_norm: require 1 <= q <= infinity");
  const SpectralField F = to_spectral(f);
  const double ref = spectral_l1(F);
  RealField agg = RealField::zeros(f.grid);
  for (int j = fam.j_min; j <= fam.j_max; ++j) {
    const RealField pj = to_real(project(F, fam, j), 1e-9, ref);
    const double w = std::pow(2.0, s * j);
    if (std::isinf(q)) {
      for (std::size_t i = 0; i < agg.values.size(); ++i) agg.values[i] = std::max(agg.values[i], w * std::abs(pj.values[i]));
    } else {
      for (std::size_t i = 0; i < agg.values.size(); ++i) agg.values[i] += std::pow(w * std::abs(pj.values[i]), q);
    }
  }
  if (!std::isinf(q)) {
    for (auto& v : agg.values) v = std::pow(v, 1.0 / q);
  }
  return lp_norm(agg, p);
}

namespace detail {

// Fine-grid data for the level-0 low-pass kernel Psi: the periodized inverse
// transform of S(|xi|) on a domain large enough (L = 16*pi) that the
// periodization tails sit below 1e-10.
inline GridSpec kernel_grid(int dim) {
  GridSpec g;
  g.dim = dim;
  g.n = dim == 1 ? 4096 : 256;
  g.length = 16.0 * kPi;
  return g;
}

inline SpectralField lowpass_kernel_spectrum(const GridSpec& g) {
  SpectralField K = SpectralField::zeros(g);
  const double vol = g.dim == 2 ? g.length * g.length : g.length;
  for (std::size_t i = 0; i < K.coeffs.size(); ++i) {
    const auto xi = wavevector(g, i);
    const double r = g.dim == 2 ? std::hypot(xi[0], xi[1]) : std::abs(xi[0]);
    K.coeffs[i] = radial_step(r) / vol;  // continuum FT values / L^dim
  }
  return K;
}

// Signed coordinate centered at the kernel peak (grid point 0), one axis.
inline double sawtooth_coord(int idx, int n, double h) {
  return idx <= n / 2 ? idx * h : (idx - n) * h;
}

inline double l1_norm_grid(const GridSpec& g, const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += std::abs(x);
  return acc * g.cell_volume();
}

struct KernelConstants {
  double c_num;         // || x . grad(D^s Psi) ||_{L^1}
  double remark_bound;  // (dim+s) ||D^s Psi||_{L^1} + ||D^s div(x Psi)||_{L^1}
};

inline KernelConstants compute_kernel_constants(double s, int dim) {
  const GridSpec g = kernel_grid(dim);
  const SpectralField K = lowpass_kernel_spectrum(g);
  const SpectralField Ks = riesz_potential(K, s);
  const std::size_t total = g.total();
  const double h = g.spacing();

  // x . grad(D^s Psi), assembled axis by axis with the sawtooth coordinate.
  std::vector<double> xdot(total, 0.0);
  for (int ax = 0; ax < dim; ++ax) {
    const MultiIndex e = ax == 0 ? (dim == 1 ? MultiIndex(1) : MultiIndex(1, 0)) : MultiIndex(0, 1);
    const RealField dks = to_real(partial_derivative(Ks, e));
    for (std::size_t i = 0; i < total; ++i) {
      const int idx = dim == 1 ? static_cast<int>(i) : (ax == 0 ? static_cast<int>(i) / g.n : static_cast<int>(i) % g.n);
      xdot[i] += sawtooth_coord(idx, g.n, h) * dks.values[i];
    }
  }

  KernelConstants out;
  out.c_num = l1_norm_grid(g, xdot);

  // Remark-style bound: (dim+s)||D^s Psi||_1 + ||D^s div(x Psi)||_1.
  const RealField psi_s = to_real(Ks);
  const double term1 = (dim + s) * l1_norm_grid(g, psi_s.values);
  const RealField psi = to_real(K);
  RealField div_xpsi = RealField::zeros(g);
  for (int ax = 0; ax < dim; ++ax) {
    RealField xpsi = psi;
    for (std::size_t i = 0; i < total; ++i) {
      const int idx = dim == 1 ? static_cast<int>(i) : (ax == 0 ? static_cast<int>(i) / g.n : static_cast<int>(i) % g.n);
      xpsi.values[i] *= sawtooth_coord(idx, g.n, h);
    }
    const MultiIndex e = ax == 0 ? (dim == 1 ? MultiIndex(1) : MultiIndex(1, 0)) : MultiIndex(0, 1);
    axpy(div_xpsi, 1.0, partial_derivative(xpsi, e));
  }
  const RealField ds_div = riesz_potential(div_xpsi, s);
  out.remark_bound = term1 + l1_norm_grid(g, ds_div.values);
  return out;
}

inline const KernelConstants& kernel_constants(double s, int dim) {
  static std::mutex mtx;
  static std::map<std::pair<int, double>, KernelConstants> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(dim, s);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute_kernel_constants(s, dim)).first;
  return it->second;
}

}  // namespace detail

// The L^1 constant || x . grad(D^s Psi) || of the low-pass kernel, computed
// once per (s, dim) on the dedicated fine grid.
inline double lowpass_kernel_constant(double s, int dim) {
  if (s < 0.0) throw std::invalid_argument("lowpass_kernel_constant: require s >= 0");
  return detail::kernel_constants(s, dim).c_num;
}

// Upper bound for the same constant via the triangle-inequality identity
// x . grad(D^s Psi) = -(dim+s) D^s Psi + D^s div(x Psi).
inline double lowpass_kernel_remark_bound(double s, int dim) {
  if (s < 0.0) throw std::invalid_argument("lowpass_kernel_remark_bound: require s >= 0");
  return detail::kernel_constants(s, dim).remark_bound;
}

struct LowpassBoundReport {
  double c_num = 0.0;
  double max_ratio = 0.0;  // max |D^s P_{<=k} f| / (2^{sk} c_num Mf)
  long violations = 0;     // points exceeding the (1 + tolerance) allowance
  double tolerance = 1e-3;
};

// Pointwise check |D^s P_{<=k} f(x)| <= 2^{sk} * c_num * Mf(x) * (1 + tol).
inline LowpassBoundReport lowpass_bound_check(const RealField& f, const LPFamily& fam, double s, int k,
                                              double tolerance = 1e-3) {
  if (s < 0.0) throw std::invalid_argument("lowpass_bound_check: require s >= 0");
  require_same_grid(f.grid, fam.grid, "lowpass_bound_check");
  LowpassBoundReport rep;
  rep.tolerance = tolerance;
  rep.c_num = lowpass_kernel_constant(s, f.grid.dim);
  const RealField u = riesz_potential(project_leq(f, fam, k), s);
  const RealField mf = maximal_function(f);
  const double scale = std::pow(2.0, s * k) * rep.c_num;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double bound = scale * mf.values[i];
    const double val = std::abs(u.values[i]);
    if (bound == 0.0) {
      if (val > 0.0) ++rep.violations;
      continue;
    }
    rep.max_ratio = std::max(rep.max_ratio, val / bound);
    if (val > bound * (1.0 + tolerance)) ++rep.violations;
  }
  return rep;
}

}  // namespace fraclr
