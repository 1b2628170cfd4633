#pragma once

// Headline operators of the fractional Leibniz machinery: the correction
// term f D^s g + g D^s f, its first- and second-order remainders, the
// commutator [D^s, f] g, and the order-l Taylor-corrected remainder that
// subtracts the low-high correction sums in both orientations.
//
// Each estimate kind pairs one remainder operator (the left-hand side, an
// L^p norm) with the derivative-product right-hand side
// ||D^{s1} f||_{p1} ||D^{s2} g||_{p2}; reports carry the ratio plus enough
// metadata to reproduce the row.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclr/bilinear.hpp"
#include "fraclr/grid.hpp"
#include "fraclr/lp_family.hpp"
#include "fraclr/spectral.hpp"
#include "fraclr/symbols.hpp"

namespace fraclr {

// f D^s g + g D^s f.
inline RealField leibniz_correction(const RealField& f, const RealField& g, double s) {
  if (s < 0.0) throw std::invalid_argument("leibniz_correction: require s >= 0");
  require_same_grid(f.grid, g.grid, "leibniz_correction");
  const RealField dsf = riesz_potential(f, s);
  const RealField dsg = riesz_potential(g, s);
  RealField out = RealField::zeros(f.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = f.values[i] * dsg.values[i] + g.values[i] * dsf.values[i];
  return out;
}

// D^s(fg) - f D^s g - g D^s f.
inline RealField leibniz_remainder(const RealField& f, const RealField& g, double s) {
  if (s < 0.0) throw std::invalid_argument("leibniz_remainder: require s >= 0");
  require_same_grid(f.grid, g.grid, "leibniz_remainder");
  RealField out = multiply(f, g);
  out = riesz_potential(out, s);
  const RealField cor = leibniz_correction(f, g, s);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= cor.values[i];
  return out;
}

// D^s(fg) - f D^s g - g D^s f + s D^{s-2}(grad f . grad g).
inline RealField leibniz_remainder_second(const RealField& f, const RealField& g, double s) {
  if (s < 2.0) throw std::invalid_argument("leibniz_remainder_second: require s >= 2");
  require_same_grid(f.grid, g.grid, "leibniz_remainder_second");
  RealField out = leibniz_remainder(f, g, s);
  RealField dot = RealField::zeros(f.grid);
  for (int ax = 0; ax < f.grid.dim; ++ax) {
    const MultiIndex e = f.grid.dim == 1 ? MultiIndex(1) : (ax == 0 ? MultiIndex(1, 0) : MultiIndex(0, 1));
    const RealField df = partial_derivative(f, e);
    const RealField dg = partial_derivative(g, e);
    for (std::size_t i = 0; i < dot.values.size(); ++i) dot.values[i] += df.values[i] * dg.values[i];
  }
  const RealField corr = riesz_potential(dot, s - 2.0);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += s * corr.values[i];
  return out;
}

// [D^s, f] g = D^s(fg) - f D^s g.
inline RealField commutator(const RealField& f, const RealField& g, double s) {
  if (s < 0.0) throw std::invalid_argument("commutator: require s >= 0");
  require_same_grid(f.grid, g.grid, "commutator");
  RealField out = riesz_potential(multiply(f, g), s);
  const RealField dsg = riesz_potential(g, s);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= f.values[i] * dsg.values[i];
  return out;
}

struct EstimateSpec {
  double s = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double p = 2.0;
  double p1 = 4.0;
  double p2 = 4.0;
  int ell = 1;  // correction order for the Taylor-corrected remainder
};

enum class EstimateKind {
  ProductBound,        // ||D^s(fg)|| vs two-term product bound
  RemainderFirst,      // first-order corrected remainder
  RemainderSecond,     // second-order corrected remainder (s >= 2)
  RemainderTaylor,     // order-l low-high corrected remainder
  Commutator,          // [D^s, f] g on frequency-localized pairs
  DiagonalParaproduct, // sum_j (P_j D^{s1} f)(P_j D^{s2} g)
  LowHighComposed,     // D^{(s-1)/2}(grad f . D^{(s-1)/2} g) instance
};

inline const char* to_string(EstimateKind k) {
  switch (k) {
    case EstimateKind::ProductBound: return "product_bound";
    case EstimateKind::RemainderFirst: return "remainder_first";
    case EstimateKind::RemainderSecond: return "remainder_second";
    case EstimateKind::RemainderTaylor: return "remainder_taylor";
    case EstimateKind::Commutator: return "commutator";
    case EstimateKind::DiagonalParaproduct: return "diagonal_paraproduct";
    default: return "lowhigh_composed";
  }
}

inline EstimateKind estimate_kind_from_string(const std::string& name) {
  if (name == "product_bound") return EstimateKind::ProductBound;
  if (name == "remainder_first") return EstimateKind::RemainderFirst;
  if (name == "remainder_second") return EstimateKind::RemainderSecond;
  if (name == "remainder_taylor") return EstimateKind::RemainderTaylor;
  if (name == "commutator") return EstimateKind::Commutator;
  if (name == "diagonal_paraproduct") return EstimateKind::DiagonalParaproduct;
  if (name == "lowhigh_composed") return EstimateKind::LowHighComposed;
  throw std::invalid_argument("unknown estimate kind: " + name);
}

// Shared plus per-kind parameter constraints; throws on violation.
inline void validate_estimate_spec(EstimateKind kind, const EstimateSpec& sp) {
  const double eps = 1e-12;
  if (sp.s < 0.0 || sp.s1 < 0.0 || sp.s2 < 0.0) throw std::invalid_argument("EstimateSpec: orders must be >= 0");
  if (std::abs(sp.s1 + sp.s2 - sp.s) > eps) throw std::invalid_argument("EstimateSpec: s1 + s2 must equal s");
  for (double q : {sp.p, sp.p1, sp.p2}) {
    if (!(q > 1.0) || !std::isfinite(q)) throw std::invalid_argument("EstimateSpec: exponents must lie in (1, inf)");
  }
  if (std::abs(1.0 / sp.p - 1.0 / sp.p1 - 1.0 / sp.p2) > eps)
    throw std::invalid_argument("EstimateSpec: Hoelder scaling 1/p = 1/p1 + 1/p2 violated");
  switch (kind) {
    case EstimateKind::RemainderFirst:
      if (sp.s1 > 1.0 + eps || sp.s2 > 1.0 + eps)
        throw std::invalid_argument("EstimateSpec: first-order remainder needs s1, s2 <= 1");
      break;
    case EstimateKind::RemainderSecond:
      if (sp.s < 2.0 - eps) throw std::invalid_argument("EstimateSpec: second-order remainder needs s >= 2");
      if (sp.s1 > 2.0 + eps || sp.s2 > 2.0 + eps)
        throw std::invalid_argument("EstimateSpec: second-order remainder needs s1, s2 <= 2");
      break;
    case EstimateKind::RemainderTaylor:
      if (sp.ell < 1 || sp.ell > 3) throw std::invalid_argument("EstimateSpec: correction order must be 1, 2 or 3");
      if (sp.s < sp.ell - 1 - eps || sp.s > sp.ell + eps)
        throw std::invalid_argument("EstimateSpec: Taylor-corrected remainder needs l-1 <= s <= l");
      break;
    case EstimateKind::LowHighComposed:
      if (sp.s < 1.0 - eps) throw std::invalid_argument("EstimateSpec: composed low-high instance needs s >= 1");
      if (sp.s1 > 1.0 + eps)
        throw std::invalid_argument("EstimateSpec: composed low-high instance needs s1 <= 1");
      break;
    default:
      break;
  }
}

// D^s(fg) minus the order-(l-1) low-high correction sums in both
// orientations: sum_{m<l} sum_k A^m(0)(P_{<=k-3} f, P_k g) and the same with
// f and g swapped, each A^m(0) evaluated through the separable fast path.
inline RealField taylor_corrected_remainder(const RealField& f, const RealField& g, const LPFamily& fam,
                                            const EstimateSpec& spec) {
  validate_estimate_spec(EstimateKind::RemainderTaylor, spec);
  require_same_grid(f.grid, g.grid, "taylor_corrected_remainder");
  require_same_grid(f.grid, fam.grid, "taylor_corrected_remainder");
  RealField out = riesz_potential(multiply(f, g), spec.s);
  for (int m = 0; m < spec.ell; ++m) {
    const SymbolSpec sp = SymbolSpec::theta_deriv(spec.s, 0.0, m).with_low_high(fam);
    const RealField fg_term = bilinear_apply_separable(sp, f, g);
    const RealField gf_term = bilinear_apply_separable(sp, g, f);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= fg_term.values[i] + gf_term.values[i];
  }
  return out;
}

// The three computable pieces of the low-high part of the second-order
// remainder (orders >= 2): the order-2 Taylor rest on (f, g), the order-1
// rest at s-2 on the gradient pair, and the subtracted g D^s f paraproduct.
struct SecondOrderLowHighPieces {
  RealField low_high;     // low-high part of the full second-order remainder
  RealField taylor_rest;  // sum_{|alpha|=2} rest applied to (d^alpha f, D^{s-2} g)
  RealField gradient_rest;  // s * sum_m order-1 rest at s-2 on (d_m f, d_m g)
  RealField swapped_part; // - sum_k (D^s P_{<=k-3} f)(P_k g)
};

inline SecondOrderLowHighPieces second_order_lowhigh_pieces(const RealField& f, const RealField& g, double s,
                                                            const LPFamily& fam, int quad_order = 32) {
  if (s < 2.0) throw std::invalid_argument("second_order_lowhigh_pieces: require s >= 2");
  require_same_grid(f.grid, g.grid, "second_order_lowhigh_pieces");
  require_same_grid(f.grid, fam.grid, "second_order_lowhigh_pieces");

  // Full remainder symbol |xi+eta|^s - |eta|^s - |xi|^s - s|xi+eta|^{s-2} xi.eta,
  // with the zero-mode conventions matching the operator path.
  const int dim = f.grid.dim;
  SymbolSpec remainder_symbol = SymbolSpec::custom_symbol(
      [s, dim](const std::array<double, 2>& xi, const std::array<double, 2>& eta) {
        const double rsum = dim == 2 ? std::hypot(xi[0] + eta[0], xi[1] + eta[1]) : std::abs(xi[0] + eta[0]);
        const double rxi = dim == 2 ? std::hypot(xi[0], xi[1]) : std::abs(xi[0]);
        const double reta = dim == 2 ? std::hypot(eta[0], eta[1]) : std::abs(eta[0]);
        const double dot = xi[0] * eta[0] + xi[1] * eta[1];
        const double pow_sum = rsum == 0.0 ? (s == 0.0 ? 1.0 : 0.0) : std::pow(rsum, s);
        const double pow_xi = rxi == 0.0 ? 0.0 : std::pow(rxi, s);
        const double pow_eta = reta == 0.0 ? 0.0 : std::pow(reta, s);
        const double pow_mid = rsum == 0.0 ? (s == 2.0 ? 1.0 : 0.0) : std::pow(rsum, s - 2.0);
        return pow_sum - pow_eta - pow_xi - s * pow_mid * dot;
      });

  SecondOrderLowHighPieces out{RealField::zeros(f.grid), RealField::zeros(f.grid), RealField::zeros(f.grid),
                               RealField::zeros(f.grid)};
  out.low_high = decompose(remainder_symbol, f, g, fam).low_high;
  out.taylor_rest = taylor_remainder_apply(f, g, s, 2, fam, quad_order);

  for (int ax = 0; ax < dim; ++ax) {
    const MultiIndex e = dim == 1 ? MultiIndex(1) : (ax == 0 ? MultiIndex(1, 0) : MultiIndex(0, 1));
    const RealField fm = partial_derivative(f, e);
    const RealField gm = partial_derivative(g, e);
    const RealField rest = taylor_remainder_apply(fm, gm, s - 2.0, 1, fam, quad_order);
    for (std::size_t i = 0; i < out.gradient_rest.values.size(); ++i)
      out.gradient_rest.values[i] += s * rest.values[i];
  }

  const SpectralField F = to_spectral(f);
  const SpectralField G = to_spectral(g);
  const double ref_f = spectral_l1(riesz_potential(F, s));
  const double ref_g = spectral_l1(G);
  for (int k = fam.j_min; k <= fam.j_max; ++k) {
    const RealField flow = to_real(riesz_potential(project_leq(F, fam, k - 3), s), 1e-9, ref_f);
    const RealField gband = to_real(project(G, fam, k), 1e-9, ref_g);
    for (std::size_t i = 0; i < out.swapped_part.values.size(); ++i)
      out.swapped_part.values[i] -= flow.values[i] * gband.values[i];
  }
  return out;
}

struct EstimateReport {
  EstimateKind kind = EstimateKind::RemainderFirst;
  EstimateSpec spec;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool rhs_zero_anomaly = false;  // rhs vanished while lhs did not
  std::string family_label;
  std::map<std::string, double> family_params;  // lambda, k, seed when present
  int grid_n = 0;
};

// Evaluate one estimate instance: the kind's remainder norm against the
// derivative-product right-hand side.
inline EstimateReport estimate_report(EstimateKind kind, const RealField& f, const RealField& g, const LPFamily& fam,
                                      const EstimateSpec& spec, double zero_tolerance = 1e-10) {
  validate_estimate_spec(kind, spec);
  require_same_grid(f.grid, g.grid, "estimate_report");
  EstimateReport rep;
  rep.kind = kind;
  rep.spec = spec;
  rep.grid_n = f.grid.n;

  RealField lhs_field = RealField::zeros(f.grid);
  switch (kind) {
    case EstimateKind::ProductBound:
      lhs_field = riesz_potential(multiply(f, g), spec.s);
      break;
    case EstimateKind::RemainderFirst:
      lhs_field = leibniz_remainder(f, g, spec.s);
      break;
    case EstimateKind::RemainderSecond:
      lhs_field = leibniz_remainder_second(f, g, spec.s);
      break;
    case EstimateKind::RemainderTaylor:
      lhs_field = taylor_corrected_remainder(f, g, fam, spec);
      break;
    case EstimateKind::Commutator:
      lhs_field = commutator(f, g, spec.s);
      break;
    case EstimateKind::DiagonalParaproduct:
      lhs_field = diagonal_paraproduct(0.0, spec.s1, spec.s2, f, g, fam);
      break;
    case EstimateKind::LowHighComposed: {
      const double half = (spec.s - 1.0) / 2.0;
      const MultiIndex e = f.grid.dim == 1 ? MultiIndex(1) : MultiIndex(1, 0);
      const RealField df = partial_derivative(f, e);
      const RealField dg = riesz_potential(g, half);
      lhs_field = riesz_potential(multiply(df, dg), half);
      break;
    }
  }
  rep.lhs = lp_norm(lhs_field, spec.p);

  if (kind == EstimateKind::ProductBound) {
    rep.rhs = lp_norm(riesz_potential(f, spec.s), spec.p1) * lp_norm(g, spec.p2) +
              lp_norm(f, spec.p1) * lp_norm(riesz_potential(g, spec.s), spec.p2);
  } else {
    rep.rhs = lp_norm(riesz_potential(f, spec.s1), spec.p1) * lp_norm(riesz_potential(g, spec.s2), spec.p2);
  }

  if (rep.rhs > 0.0) {
    rep.ratio = rep.lhs / rep.rhs;
  } else if (rep.lhs <= zero_tolerance) {
    rep.ratio = 0.0;
  } else {
    rep.ratio = std::numeric_limits<double>::infinity();
    rep.rhs_zero_anomaly = true;
  }
  return rep;
}

}  // namespace fraclr
