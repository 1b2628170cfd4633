#pragma once

// Deterministic test-function generation. Every family is a pure function of
// its spec (counter-based RNG, fixed streams), produces L2-normalized fields,
// and guarantees the spectral-support side conditions its consumers rely on:
//
//   localized_pair(k): supp fhat in {|xi| <= 2^{k-2}}, supp ghat in
//     {2^{k-1} <= |xi| <= 2^{k+1}}; g is additionally capped away from the
//     Nyquist edge so that products with f cannot alias.
//   gaussian: a fixed off-center bump pair, periodized over 5 images.
//   dilation(t): a two-mode pattern with modes scaled by exactly 2^t, so all
//     dilates are exactly representable on the grid.
//   random_bandlimited(j_lo, j_hi, seed): white noise filtered to the
//     annulus 2^{j_lo} <= |xi| <= 2^{j_hi}.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "fraclr/grid.hpp"
#include "fraclr/lp_family.hpp"
#include "fraclr/rng.hpp"
#include "fraclr/spectral.hpp"

namespace fraclr {

enum class FamilyKind { LocalizedPair, Gaussian, Dilation, RandomBandlimited };

inline const char* to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::LocalizedPair: return "localized_pair";
    case FamilyKind::Gaussian: return "gaussian";
    case FamilyKind::Dilation: return "dilation";
    default: return "random_bandlimited";
  }
}

inline FamilyKind family_kind_from_string(const std::string& name) {
  if (name == "localized_pair") return FamilyKind::LocalizedPair;
  if (name == "gaussian") return FamilyKind::Gaussian;
  if (name == "dilation") return FamilyKind::Dilation;
  if (name == "random_bandlimited") return FamilyKind::RandomBandlimited;
  throw std::invalid_argument("unknown family kind: " + name);
}

struct FamilySpec {
  FamilyKind kind = FamilyKind::RandomBandlimited;
  int k = 5;                 // localized_pair band index
  int t = 0;                 // dilation exponent, lambda = 2^t
  int j_lo = 1;
  int j_hi = 5;              // random_bandlimited annulus
  std::uint64_t seed = 1;

  std::string label() const {
    switch (kind) {
      case FamilyKind::LocalizedPair: return "localized_pair_k" + std::to_string(k);
      case FamilyKind::Gaussian: return "gaussian";
      case FamilyKind::Dilation: return "dilation_t" + std::to_string(t);
      default: return "random_bandlimited_s" + std::to_string(seed);
    }
  }
};

struct FieldPair {
  RealField f;
  RealField g;
};

namespace detail {

inline RealField noise_field(const GridSpec& g, std::uint64_t seed, std::uint64_t stream) {
  RealField out = RealField::zeros(g);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = uniform_pm1(seed, stream, i);
  return out;
}

// Keep only modes whose radius lies in [r_lo, r_hi].
inline SpectralField annulus_filter(const SpectralField& F, double r_lo, double r_hi) {
  SpectralField out = F;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    const auto xi = wavevector(out.grid, i);
    const double r = out.grid.dim == 2 ? std::hypot(xi[0], xi[1]) : std::abs(xi[0]);
    if (r < r_lo || r > r_hi) out.coeffs[i] = 0.0;
  }
  return out;
}

// Zero all modes with integer radius above the cap (anti-aliasing trim).
inline SpectralField index_cap_filter(const SpectralField& F, int cap) {
  SpectralField out = F;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    const auto kf = int_freqs(out.grid, i);
    const double r = out.grid.dim == 2 ? std::hypot(double(kf[0]), double(kf[1])) : std::abs(double(kf[0]));
    if (r > cap) out.coeffs[i] = 0.0;
  }
  return out;
}

inline RealField periodized_gaussian(const GridSpec& g, double cx, double cy, double sigma) {
  RealField out = RealField::zeros(g);
  const double h = g.spacing();
  const double L = g.length;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    double x, y = 0.0;
    if (g.dim == 1) {
      x = static_cast<double>(i) * h;
    } else {
      x = static_cast<double>(i / static_cast<std::size_t>(g.n)) * h;
      y = static_cast<double>(i % static_cast<std::size_t>(g.n)) * h;
    }
    double v = 0.0;
    for (int img = -5; img <= 5; ++img) {
      const double dx = x - cx - img * L;
      if (g.dim == 1) {
        v += std::exp(-dx * dx / (2.0 * sigma * sigma));
      } else {
        for (int jmg = -5; jmg <= 5; ++jmg) {
          const double dy = y - cy - jmg * L;
          v += std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        }
      }
    }
    out.values[i] = v;
  }
  return out;
}

}  // namespace detail

// Generate the family's (f, g) pair on the family's grid, L2-normalized.
inline FieldPair generate(const FamilySpec& spec, const LPFamily& fam) {
  const GridSpec& g = fam.grid;
  FieldPair out{RealField::zeros(g), RealField::zeros(g)};
  switch (spec.kind) {
    case FamilyKind::LocalizedPair: {
      const int k = spec.k;
      if (k > fam.j_max || k - 3 < fam.lowpass_lo())
        throw std::invalid_argument("generate: localized_pair band out of family range");
      // Nyquist-safety cap: highest g index + highest f index <= N/2.
      const double f_top_index = std::ldexp(1.0, k - 2) * g.length / kTau;
      const int cap = g.n / 2 - static_cast<int>(std::ceil(f_top_index));
      const double band_lo_index = std::ldexp(1.0, k - 1) * g.length / kTau;
      if (cap < band_lo_index) throw std::invalid_argument("generate: localized_pair band out of range for this grid");
      const SpectralField Fn = to_spectral(detail::noise_field(g, spec.seed, 1));
      const SpectralField Gn = to_spectral(detail::noise_field(g, spec.seed, 2));
      out.f = to_real(project_leq(Fn, fam, k - 3));
      out.g = to_real(detail::index_cap_filter(project(Gn, fam, k), cap));
      break;
    }
    case FamilyKind::Gaussian: {
      out.f = detail::periodized_gaussian(g, 0.35 * g.length, 0.35 * g.length, g.length / 40.0);
      out.g = detail::periodized_gaussian(g, 0.6 * g.length, 0.6 * g.length, g.length / 64.0);
      break;
    }
    case FamilyKind::Dilation: {
      if (spec.t < -2) throw std::invalid_argument("generate: dilation exponent below -2 breaks exact mode remap");
      const double lam = std::ldexp(1.0, spec.t);
      if (12.0 * lam >= g.n / 2.0) throw std::invalid_argument("generate: dilated modes exceed the Nyquist index");
      const double h = g.spacing();
      const double w = kTau / g.length;
      for (std::size_t i = 0; i < out.f.values.size(); ++i) {
        double x, y = 0.0;
        if (g.dim == 1) {
          x = static_cast<double>(i) * h;
        } else {
          x = static_cast<double>(i / static_cast<std::size_t>(g.n)) * h;
          y = static_cast<double>(i % static_cast<std::size_t>(g.n)) * h;
        }
        const double u = g.dim == 1 ? x : x + 0.5 * y;
        out.f.values[i] = std::sin(8.0 * lam * w * u) + 0.7 * std::cos(12.0 * lam * w * x);
        out.g.values[i] = std::cos(8.0 * lam * w * x) - 0.4 * std::sin(12.0 * lam * w * u);
      }
      break;
    }
    case FamilyKind::RandomBandlimited: {
      const double r_hi = std::ldexp(1.0, spec.j_hi);
      if (r_hi > kPi * g.n / g.length * (1.0 + 1e-12))
        throw std::invalid_argument("generate: random_bandlimited annulus exceeds the Nyquist radius");
      if (spec.j_lo >= spec.j_hi) throw std::invalid_argument("generate: random_bandlimited needs j_lo < j_hi");
      const double r_lo = std::ldexp(1.0, spec.j_lo);
      const SpectralField Fn = to_spectral(detail::noise_field(g, spec.seed, 1));
      const SpectralField Gn = to_spectral(detail::noise_field(g, spec.seed, 2));
      out.f = to_real(detail::annulus_filter(Fn, r_lo, r_hi));
      out.g = to_real(detail::annulus_filter(Gn, r_lo, r_hi));
      break;
    }
  }
  out.f = normalize_l2(out.f);
  out.g = normalize_l2(out.g);
  return out;
}

// Fraction of spectral energy at radii outside [r_lo, r_hi] (support scans).
inline double band_energy_outside(const RealField& f, double r_lo, double r_hi) {
  const SpectralField F = to_spectral(f);
  double inside = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
    const auto xi = wavevector(F.grid, i);
    const double r = F.grid.dim == 2 ? std::hypot(xi[0], xi[1]) : std::abs(xi[0]);
    const double e = std::norm(F.coeffs[i]);
    if (r < r_lo || r > r_hi) outside += e;
    else inside += e;
  }
  const double total = inside + outside;
  return total > 0.0 ? outside / total : 0.0;
}

}  // namespace fraclr
