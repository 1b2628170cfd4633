#pragma once

// Bilinear frequency multipliers B(F,G)(x) = sum_{xi,eta} e^{ix(xi+eta)}
// b(xi,eta) Fhat(xi) Ghat(eta), with the output mode xi+eta folded
// periodically onto the grid.
//
// The direct double sum is the oracle for everything else: it is O(N^{2 dim})
// and therefore size-guarded, evaluated in a fixed deterministic order
// (per output mode, input modes ascending) so results are bitwise stable.
// The separable path exploits the structure of the theta-derivative symbols
// at theta = 0, a(xi,eta) = sum_alpha c_alpha xi^alpha mu_alpha(eta), turning
// the double sum into a few products of spectrally filtered fields. The
// phase bookkeeping realizes xi^alpha Fhat as (-i)^{|alpha|} times the
// transform of the coordinate derivative.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclr/grid.hpp"
#include "fraclr/lp_family.hpp"
#include "fraclr/spectral.hpp"
#include "fraclr/symbols.hpp"

namespace fraclr {

namespace detail {

inline void ensure_direct_size(const GridSpec& g) {
  const int cap = g.dim == 1 ? 512 : 64;
  if (g.n > cap) throw std::invalid_argument("bilinear direct sum: grid too large for the O(N^2) engine");
}

inline int wrap_freq(int k, int n) {
  int m = k % n;
  if (m < -n / 2) m += n;
  if (m >= n / 2) m -= n;
  return m;
}

// Symbols that are invariant under swapping the two frequency arguments.
inline bool symbol_is_symmetric(const SymbolSpec& sp) {
  return sp.loc == LocalizationKind::None && (sp.kind == SymbolKind::Constant || sp.kind == SymbolKind::SumRiesz);
}

// The periodic wrap pairs mode -k with +k except at k = -n/2, which is its
// own mirror image. Input energy there has no conjugate partner inside the
// convolution, so the bilinear result need not be real; reject such inputs
// up front instead of failing the realness check with no explanation. The
// threshold tolerates FFT roundoff dust on a raw physical input.
inline void require_nyquist_free(const SpectralField& F, const char* who) {
  const int half = F.grid.n / 2;
  double worst = 0.0;
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
    const std::array<int, 2> k = int_freqs(F.grid, i);
    if (k[0] == -half || (F.grid.dim == 2 && k[1] == -half)) worst = std::max(worst, std::abs(F.coeffs[i]));
  }
  if (worst > 1e-9 * std::max(spectral_l1(F), 1e-300))
    throw std::invalid_argument(std::string(who) +
                                ": input carries energy at the unpaired Nyquist frequency; band-limit below n/2 first");
}

}  // namespace detail

// Brute-force bilinear evaluation in frequency space. When `gross_scale` is
// given it receives sum_w sum_a |b(xi,eta) Fhat Ghat|, an upper bound for the
// physical sup of the result before any cancellation and the natural
// magnitude reference for downstream realness checks.
inline SpectralField bilinear_direct_spectral(const SymbolSpec& sym, const SpectralField& F, const SpectralField& G,
                                              double* gross_scale = nullptr) {
  require_same_grid(F.grid, G.grid, "bilinear_direct_spectral");
  detail::ensure_direct_size(F.grid);
  sym.validate(F.grid.dim);
  const GridSpec& g = F.grid;
  const int n = g.n;
  const std::size_t total = g.total();
  SpectralField out = SpectralField::zeros(g);

  // Cache integer frequencies and wavevectors of every flat index.
  std::vector<std::array<int, 2>> kf(total);
  std::vector<std::array<double, 2>> wv(total);
  for (std::size_t i = 0; i < total; ++i) {
    kf[i] = int_freqs(g, i);
    wv[i] = wavevector(g, i);
  }

  // Hoisted support of F: zero modes contribute exactly nothing, and skipping
  // them up front keeps band-limited inputs fast without changing the
  // accumulation order over the surviving terms.
  std::vector<std::size_t> support;
  for (std::size_t a = 0; a < total; ++a) {
    if (F.coeffs[a] != std::complex<double>(0.0, 0.0)) support.push_back(a);
  }

  double gross = 0.0;
  for (std::size_t w = 0; w < total; ++w) {
    const std::array<int, 2> kw = kf[w];
    std::complex<double> acc(0.0, 0.0);
    double acc_abs = 0.0;
    for (std::size_t a : support) {
      const std::complex<double> fa = F.coeffs[a];
      // Unique G mode pairing with mode a at output w (per-axis wrap).
      const int kb0 = detail::wrap_freq(kw[0] - kf[a][0], n);
      const int kb1 = g.dim == 2 ? detail::wrap_freq(kw[1] - kf[a][1], n) : 0;
      std::size_t b = static_cast<std::size_t>(index_of_freq(kb0, n));
      if (g.dim == 2) b = b * static_cast<std::size_t>(n) + static_cast<std::size_t>(index_of_freq(kb1, n));
      const std::complex<double> gb = G.coeffs[b];
      if (gb == std::complex<double>(0.0, 0.0)) continue;
      const std::complex<double> contrib = eval_symbol(sym, wv[a], wv[b], g.dim) * fa * gb;
      acc += contrib;
      if (gross_scale) acc_abs += std::abs(contrib);
    }
    out.coeffs[w] = acc;
    gross += acc_abs;
  }
  if (gross_scale) *gross_scale = gross;
  return out;
}

inline RealField bilinear_apply_direct(const SymbolSpec& sym, const RealField& f, const RealField& g) {
  const SpectralField F = to_spectral(f);
  const SpectralField G = to_spectral(g);
  detail::require_nyquist_free(F, "bilinear_apply_direct");
  detail::require_nyquist_free(G, "bilinear_apply_direct");
  double gross = 0.0;
  const SpectralField out = bilinear_direct_spectral(sym, F, G, &gross);
  return to_real(out, 1e-9, gross);
}

namespace detail {

// One separable term: (coeff, alpha) acting as
//   ThetaDeriv: coeff * (-i)^m * (d^alpha F) * (mu_alpha G)
//   EtaDeriv:   coeff * F * (mu_alpha G)
// with mu_alpha(eta) = (d^alpha |.|^s)(eta).
struct SeparableTerm {
  double coeff;
  MultiIndex alpha;
  bool derivative_on_f;
};

inline std::vector<SeparableTerm> separable_terms(const SymbolSpec& sp, int dim) {
  std::vector<SeparableTerm> terms;
  if (sp.kind == SymbolKind::ThetaDeriv) {
    for (const MultiIndex& a : indices_of_order(dim, sp.m)) {
      terms.push_back({theta_coeff(sp.convention, a), a, true});
    }
  } else {  // EtaDeriv
    terms.push_back({multi_factorial(sp.alpha) / factorial(sp.alpha.order()), sp.alpha, false});
  }
  return terms;
}

inline SpectralField abs_pow_multiplier(const SpectralField& G, double s, const MultiIndex& a) {
  SpectralField out = G;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    const auto eta = wavevector(out.grid, i);
    out.coeffs[i] *= deriv_abs_pow(out.grid.dim, s, a, eta);
  }
  return out;
}

inline std::complex<double> minus_i_pow(int m) {
  switch (((m % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

// Accumulate the separable evaluation of sp on the (already filtered)
// spectral pair into the physical-space accumulator.
inline void accumulate_separable(std::vector<std::complex<double>>& acc, const SymbolSpec& sp,
                                 const SpectralField& F, const SpectralField& G) {
  const int dim = F.grid.dim;
  const std::complex<double> phase =
      sp.kind == SymbolKind::ThetaDeriv ? minus_i_pow(sp.m) : std::complex<double>(1.0, 0.0);
  for (const SeparableTerm& term : separable_terms(sp, dim)) {
    const SpectralField fpart = term.derivative_on_f ? partial_derivative(F, term.alpha) : F;
    const std::vector<std::complex<double>> fx = inverse_transform(fpart);
    const std::vector<std::complex<double>> gx = inverse_transform(abs_pow_multiplier(G, sp.s, term.alpha));
    const std::complex<double> w = phase * term.coeff;
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * fx[i] * gx[i];
  }
}

// Gross magnitude of the separable terms on the *unfiltered* inputs; the
// realness check uses it as reference so that band-filtered results that
// cancel to zero are not compared against their own roundoff dust.
inline double separable_scale(const SymbolSpec& sp, const SpectralField& F, const SpectralField& G) {
  const int dim = F.grid.dim;
  double scale = 0.0;
  for (const SeparableTerm& term : separable_terms(sp, dim)) {
    const SpectralField fpart = term.derivative_on_f ? partial_derivative(F, term.alpha) : F;
    double fmax = 0.0, gmax = 0.0;
    for (const auto& c : inverse_transform(fpart)) fmax = std::max(fmax, std::abs(c));
    for (const auto& c : inverse_transform(abs_pow_multiplier(G, sp.s, term.alpha))) gmax = std::max(gmax, std::abs(c));
    scale += std::abs(term.coeff) * fmax * gmax;
  }
  return scale;
}

}  // namespace detail

// Fast path for ThetaDeriv(s, 0, m) and EtaDeriv(s, 0, alpha), optionally
// with low-high localization (per-band lowpass/band filtered pairs).
inline RealField bilinear_apply_separable(const SymbolSpec& sp, const RealField& f, const RealField& g) {
  require_same_grid(f.grid, g.grid, "bilinear_apply_separable");
  sp.validate(f.grid.dim);
  if (sp.kind != SymbolKind::ThetaDeriv && sp.kind != SymbolKind::EtaDeriv)
    throw std::invalid_argument("bilinear_apply_separable: only the theta=0 derivative symbols are separable");
  if (sp.theta != 0.0) throw std::invalid_argument("bilinear_apply_separable: requires theta = 0");
  if (sp.loc == LocalizationKind::Diagonal)
    throw std::invalid_argument("bilinear_apply_separable: diagonal localization unsupported");

  const SpectralField F = to_spectral(f);
  const SpectralField G = to_spectral(g);
  detail::require_nyquist_free(F, "bilinear_apply_separable");
  detail::require_nyquist_free(G, "bilinear_apply_separable");
  std::vector<std::complex<double>> acc(f.grid.total(), std::complex<double>(0.0, 0.0));
  const double scale = detail::separable_scale(sp, F, G);
  if (sp.loc == LocalizationKind::None) {
    detail::accumulate_separable(acc, sp, F, G);
  } else {
    const LPFamily& fam = *sp.loc_family;
    require_same_grid(f.grid, fam.grid, "bilinear_apply_separable");
    for (int k = fam.j_min; k <= fam.j_max; ++k) {
      const SpectralField Fk = project_leq(F, fam, k - sp.loc_offset);
      const SpectralField Gk = project(G, fam, k);
      detail::accumulate_separable(acc, sp, Fk, Gk);
    }
  }

  // Extract the real part; a conjugate-symmetry bug would leave an imaginary
  // part at the gross term scale, while legitimate cancellation (possibly all
  // the way to zero) leaves only roundoff relative to that scale.
  RealField out = RealField::zeros(f.grid);
  double max_im = 0.0, max_re = 0.0;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    out.values[i] = acc[i].real();
    max_im = std::max(max_im, std::abs(acc[i].imag()));
    max_re = std::max(max_re, std::abs(acc[i].real()));
  }
  if (max_im > 1e-9 * std::max({max_re, scale, 1e-300}))
    throw std::runtime_error("bilinear_apply_separable: imaginary residue above tolerance");
  return out;
}

struct DecomposeResult {
  RealField low_high;   // sum_k B(P_{<=k-3} F, P_k G)
  RealField diagonal;   // sum_{|j-k|<=2} B(P_j F, P_k G)
  RealField high_low;   // sum_j B(P_{<=j-3} G, P_j F)
  double reconstruction_residual = 0.0;  // relative l2 defect vs the full sum
};

// Three-way frequency decomposition, computed in one fused direct pass with
// the band weights evaluated from the family's cached multiplier tables.
inline DecomposeResult decompose(const SymbolSpec& sym, const RealField& f, const RealField& g, const LPFamily& fam) {
  require_same_grid(f.grid, g.grid, "decompose");
  require_same_grid(f.grid, fam.grid, "decompose");
  detail::ensure_direct_size(f.grid);
  sym.validate(f.grid.dim);
  const GridSpec& gr = f.grid;
  const int n = gr.n;
  const std::size_t total = gr.total();
  const SpectralField F = to_spectral(f);
  const SpectralField G = to_spectral(g);
  detail::require_nyquist_free(F, "decompose");
  detail::require_nyquist_free(G, "decompose");
  const bool symmetric = detail::symbol_is_symmetric(sym);

  std::vector<std::array<int, 2>> kf(total);
  std::vector<std::array<double, 2>> wv(total);
  for (std::size_t i = 0; i < total; ++i) {
    kf[i] = int_freqs(gr, i);
    wv[i] = wavevector(gr, i);
  }

  // Pair weights from the cached tables: low-high, diagonal, and the
  // mirrored low-high with the roles of the two modes swapped.
  const int off = 3, width = 2;
  auto w_low_high = [&](std::size_t i_lo, std::size_t i_hi) {
    double w = 0.0;
    for (int k = fam.j_min; k <= fam.j_max; ++k) {
      const double phi = fam.band_table(k)[i_hi];
      if (phi == 0.0) continue;
      w += fam.lowpass_table(k - off)[i_lo] * phi;
    }
    return w;
  };
  auto w_diagonal = [&](std::size_t i_f, std::size_t i_g) {
    double w = 0.0;
    for (int j = fam.j_min; j <= fam.j_max; ++j) {
      const double pj = fam.band_table(j)[i_f];
      if (pj == 0.0) continue;
      for (int k = std::max(fam.j_min, j - width); k <= std::min(fam.j_max, j + width); ++k) {
        w += pj * fam.band_table(k)[i_g];
      }
    }
    return w;
  };

  SpectralField lh = SpectralField::zeros(gr);
  SpectralField dg = SpectralField::zeros(gr);
  SpectralField hl = SpectralField::zeros(gr);
  SpectralField full = SpectralField::zeros(gr);

  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < total; ++i) {
    if (F.coeffs[i] != std::complex<double>(0.0, 0.0)) support.push_back(i);
  }

  double gross = 0.0;
  for (std::size_t w = 0; w < total; ++w) {
    const std::array<int, 2> kw = kf[w];
    std::complex<double> acc_lh(0.0), acc_dg(0.0), acc_hl(0.0), acc_full(0.0);
    double acc_abs = 0.0;
    for (std::size_t a : support) {
      const std::complex<double> fa = F.coeffs[a];
      const int kb0 = detail::wrap_freq(kw[0] - kf[a][0], n);
      const int kb1 = gr.dim == 2 ? detail::wrap_freq(kw[1] - kf[a][1], n) : 0;
      std::size_t b = static_cast<std::size_t>(index_of_freq(kb0, n));
      if (gr.dim == 2) b = b * static_cast<std::size_t>(n) + static_cast<std::size_t>(index_of_freq(kb1, n));
      const std::complex<double> gb = G.coeffs[b];
      if (gb == std::complex<double>(0.0, 0.0)) continue;
      const double s_fg = eval_symbol(sym, wv[a], wv[b], gr.dim);
      const double s_gf = symmetric ? s_fg : eval_symbol(sym, wv[b], wv[a], gr.dim);
      const std::complex<double> prod = fa * gb;
      acc_full += s_fg * prod;
      acc_lh += s_fg * w_low_high(a, b) * prod;
      acc_dg += s_fg * w_diagonal(a, b) * prod;
      acc_hl += s_gf * w_low_high(b, a) * prod;
      acc_abs += std::max(std::abs(s_fg), std::abs(s_gf)) * std::abs(prod);
    }
    lh.coeffs[w] = acc_lh;
    dg.coeffs[w] = acc_dg;
    hl.coeffs[w] = acc_hl;
    full.coeffs[w] = acc_full;
    gross += acc_abs;
  }

  double defect = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    const std::complex<double> d = full.coeffs[i] - (lh.coeffs[i] + dg.coeffs[i] + hl.coeffs[i]);
    defect += std::norm(d);
    ref += std::norm(full.coeffs[i]);
  }

  // The band weights are O(1), so the unweighted gross magnitude is the right
  // realness reference for every piece.
  DecomposeResult out{to_real(lh, 1e-9, gross), to_real(dg, 1e-9, gross), to_real(hl, 1e-9, gross), 0.0};
  out.reconstruction_residual = ref > 0.0 ? std::sqrt(defect / ref) : std::sqrt(defect);
  return out;
}

// Low-high Taylor-remainder operator of order l:
//   sum_{|alpha|=l} (-i)^l B_{t_alpha}(d^alpha F, D^{s-l} G)
// with the |eta|^{l-s}-normalized remainder kernel localized on the
// low-high region; equals B_lowhigh(SumRiesz s) minus the m < l separable
// correction terms, up to quadrature error.
inline RealField taylor_remainder_apply(const RealField& f, const RealField& g, double s, int ell, const LPFamily& fam,
                                        int quad_order = 32, CoeffConvention cc = CoeffConvention::ChainRule) {
  if (ell < 1 || ell > 3) throw std::invalid_argument("taylor_remainder_apply: order must be 1, 2 or 3");
  if (s < 0.0) throw std::invalid_argument("taylor_remainder_apply: require s >= 0");
  require_same_grid(f.grid, g.grid, "taylor_remainder_apply");
  require_same_grid(f.grid, fam.grid, "taylor_remainder_apply");
  const SpectralField F = to_spectral(f);
  const SpectralField G = to_spectral(g);
  detail::require_nyquist_free(F, "taylor_remainder_apply");
  detail::require_nyquist_free(G, "taylor_remainder_apply");
  const SpectralField Gs = riesz_potential(G, s - ell);
  SpectralField acc = SpectralField::zeros(f.grid);
  const std::complex<double> phase = detail::minus_i_pow(ell);
  double gross_total = 0.0;
  for (const MultiIndex& a : detail::indices_of_order(f.grid.dim, ell)) {
    SymbolSpec kernel = SymbolSpec::remainder_taylor(s, a, quad_order).with_low_high(fam);
    kernel.convention = cc;
    const SpectralField Fa = partial_derivative(F, a);
    double gross = 0.0;
    const SpectralField term = bilinear_direct_spectral(kernel, Fa, Gs, &gross);
    gross_total += gross;
    for (std::size_t i = 0; i < acc.coeffs.size(); ++i) acc.coeffs[i] += phase * term.coeffs[i];
  }
  return to_real(acc, 1e-9, gross_total);
}

// D^{s1} sum_j (P_j D^{s2} f) (P_j D^{s3} g) over the family's band range.
inline RealField diagonal_paraproduct(double s1, double s2, double s3, const RealField& f, const RealField& g,
                                      const LPFamily& fam) {
  if (s1 < 0.0 || s2 < 0.0 || s3 < 0.0) throw std::invalid_argument("diagonal_paraproduct: orders must be >= 0");
  require_same_grid(f.grid, g.grid, "diagonal_paraproduct");
  require_same_grid(f.grid, fam.grid, "diagonal_paraproduct");
  const SpectralField F2 = riesz_potential(to_spectral(f), s2);
  const SpectralField G3 = riesz_potential(to_spectral(g), s3);
  const double ref_f = spectral_l1(F2);
  const double ref_g = spectral_l1(G3);
  RealField acc = RealField::zeros(f.grid);
  for (int j = fam.j_min; j <= fam.j_max; ++j) {
    const RealField pf = to_real(project(F2, fam, j), 1e-9, ref_f);
    const RealField pg = to_real(project(G3, fam, j), 1e-9, ref_g);
    for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += pf.values[i] * pg.values[i];
  }
  return riesz_potential(acc, s1);
}

}  // namespace fraclr
