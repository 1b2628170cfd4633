#pragma once

// Bilinear symbol family built around a(xi, eta; theta) = |eta + theta*xi|^s:
// closed-form theta- and eta-derivative kernels, Taylor-remainder kernels with
// Gauss-Legendre theta-quadrature, optional low-high / diagonal frequency
// localization, and deterministic cone sampling for symbol-bound scans.
//
// Derivative conventions (d = |alpha|):
//   theta_deriv(s, theta, m)  = (1/m!) d^m/dtheta^m a
//                             = sum_{|alpha|=m} (1/alpha!) xi^alpha (d^alpha r^s)(eta+theta*xi)
//   eta_deriv(s, theta, alpha) = (alpha!/|alpha|!) (d^alpha r^s)(eta+theta*xi)
//   remainder kernel, l = |alpha| >= 1 (integral form of the theta-Taylor rest):
//     t_alpha(xi,eta) = (l!/alpha!) (1/(l-1)!) *
//                       int_0^1 (1-theta)^{l-1} (d^alpha r^s)(eta+theta*xi) dtheta
//     scaled by |eta|^{l-s} so the kernel is homogeneous of degree zero.
// The FactorialVariant convention replaces the multinomial weight l!/alpha!
// by alpha! in the theta-derivative and remainder kernels; it is wrong on
// purpose and exists as a negative-control fixture for the harness.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fraclr/grid.hpp"
#include "fraclr/lp_family.hpp"
#include "fraclr/quadrature.hpp"

namespace fraclr {

namespace detail {

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

inline double multi_factorial(const MultiIndex& a) { return factorial(a.entries[0]) * factorial(a.entries[1]); }

inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// All multi-indices of the given total order (1D: just (m); 2D: (m-k, k)).
inline std::vector<MultiIndex> indices_of_order(int dim, int m) {
  std::vector<MultiIndex> out;
  if (dim == 1) {
    out.push_back(MultiIndex(m));
  } else {
    for (int k = 0; k <= m; ++k) out.push_back(MultiIndex(m - k, k));
  }
  return out;
}

}  // namespace detail

// m-th derivative of t -> |t|^s on the line, closed form
// s(s-1)...(s-m+1) sign(t)^m |t|^{s-m}. At t = 0 the conventions are
// |0|^0 = 1, sign(0) = 0; the value is reported as 0 for m >= 1 and the
// point is flagged as singular only when the exponent s - m is negative
// (a genuine blow-up rather than a removable kink value).
inline double deriv_abs_pow_1d(double s, int m, double t, bool* singular = nullptr) {
  if (m < 0) throw std::invalid_argument("deriv_abs_pow_1d: negative order");
  double coef = 1.0;
  for (int i = 0; i < m; ++i) coef *= (s - i);
  if (t == 0.0) {
    if (s - m < 0.0 && singular) *singular = true;
    if (m == 0) return s == 0.0 ? 1.0 : (s > 0.0 ? 0.0 : 0.0);
    return 0.0;
  }
  const double sgn = t > 0.0 ? 1.0 : -1.0;
  const double sgn_m = (m % 2 == 0) ? 1.0 : sgn;
  return coef * sgn_m * std::pow(std::abs(t), s - m);
}

namespace detail {

// Closed forms for d^alpha |t|^s in the plane up to total order 2.
inline double deriv_abs_pow_2d_closed(double s, const MultiIndex& a, double t0, double t1, bool* singular) {
  const int order = a.order();
  const double r = std::hypot(t0, t1);
  if (r == 0.0) {
    if (s - order < 0.0 && singular) *singular = true;
    if (order == 0) return s == 0.0 ? 1.0 : 0.0;
    return 0.0;
  }
  if (order == 0) return std::pow(r, s);
  if (order == 1) {
    const double ti = a.entries[0] == 1 ? t0 : t1;
    return s * ti * std::pow(r, s - 2.0);
  }
  // order == 2: s r^{s-2} delta_ij + s(s-2) t_i t_j r^{s-4}
  double ti, tj;
  double delta;
  if (a.entries[0] == 2) {
    ti = tj = t0;
    delta = 1.0;
  } else if (a.entries[1] == 2) {
    ti = tj = t1;
    delta = 1.0;
  } else {
    ti = t0;
    tj = t1;
    delta = 0.0;
  }
  return s * delta * std::pow(r, s - 2.0) + s * (s - 2.0) * ti * tj * std::pow(r, s - 4.0);
}

inline double deriv_abs_pow_2d_rec(double s, MultiIndex a, double t0, double t1, double step, bool* singular) {
  if (a.order() <= 2) return deriv_abs_pow_2d_closed(s, a, t0, t1, singular);
  const int ax = a.entries[0] > 0 ? 0 : 1;
  a.entries[ax] -= 1;
  const double d0 = ax == 0 ? step : 0.0;
  const double d1 = ax == 1 ? step : 0.0;
  const double hi = deriv_abs_pow_2d_rec(s, a, t0 + d0, t1 + d1, step, singular);
  const double lo = deriv_abs_pow_2d_rec(s, a, t0 - d0, t1 - d1, step, singular);
  return (hi - lo) / (2.0 * step);
}

}  // namespace detail

// d^alpha |t|^s in the plane: closed form through total order 2, nested
// central differences beyond. The step is proportional to |t| so that the
// result stays exactly scale-covariant in exact arithmetic.
inline double deriv_abs_pow_2d(double s, const MultiIndex& a, double t0, double t1, bool* singular = nullptr) {
  const int order = a.order();
  if (order <= 2) return detail::deriv_abs_pow_2d_closed(s, a, t0, t1, singular);
  const double r = std::hypot(t0, t1);
  if (r == 0.0) {
    if (singular) *singular = true;
    return 0.0;
  }
  const double rel = order == 3 ? 1e-3 : 3e-3;
  return detail::deriv_abs_pow_2d_rec(s, a, t0, t1, rel * r, singular);
}

// Dimension-dispatching wrapper; in 1D the second component is ignored.
inline double deriv_abs_pow(int dim, double s, const MultiIndex& a, const std::array<double, 2>& t,
                            bool* singular = nullptr) {
  if (dim == 1) return deriv_abs_pow_1d(s, a.entries[0], t[0], singular);
  return deriv_abs_pow_2d(s, a, t[0], t[1], singular);
}

enum class SymbolKind {
  Constant,
  SumRiesz,             // |xi+eta|^s
  ShiftedRiesz,         // |eta+theta*xi|^s
  ThetaDeriv,           // (1/m!) d^m/dtheta^m of the shifted symbol
  EtaDeriv,             // (alpha!/|alpha|!) d^alpha_eta of the shifted symbol
  RemainderTaylor,      // order-|alpha| Taylor-rest kernel, |eta|^{l-s}-normalized
  RemainderFirstOrder,  // the |alpha|=1 kernel (low-high first-order rest)
  RemainderSecondOrder, // the |alpha|=2 kernel (low-high second-order rest)
  Custom,
};

enum class LocalizationKind { None, LowHigh, Diagonal };

enum class CoeffConvention { ChainRule, FactorialVariant };

struct SymbolSpec {
  SymbolKind kind = SymbolKind::Constant;
  double constant = 1.0;
  double s = 0.0;
  double theta = 0.0;
  int m = 0;             // ThetaDeriv order
  MultiIndex alpha{};    // EtaDeriv / remainder kernels
  int quad_order = 32;   // remainder kernels
  CoeffConvention convention = CoeffConvention::ChainRule;

  LocalizationKind loc = LocalizationKind::None;
  const LPFamily* loc_family = nullptr;
  int loc_offset = 3;  // low-high: Psi_{k-offset}(xi) Phi_k(eta)
  int loc_width = 2;   // diagonal: |j-k| <= width

  std::function<double(const std::array<double, 2>&, const std::array<double, 2>&)> custom;

  static SymbolSpec make_constant(double c) {
    SymbolSpec sp;
    sp.kind = SymbolKind::Constant;
    sp.constant = c;
    return sp;
  }
  static SymbolSpec sum_riesz(double s) {
    SymbolSpec sp;
    sp.kind = SymbolKind::SumRiesz;
    sp.s = s;
    return sp;
  }
  static SymbolSpec shifted_riesz(double s, double theta) {
    SymbolSpec sp;
    sp.kind = SymbolKind::ShiftedRiesz;
    sp.s = s;
    sp.theta = theta;
    return sp;
  }
  static SymbolSpec theta_deriv(double s, double theta, int m) {
    SymbolSpec sp;
    sp.kind = SymbolKind::ThetaDeriv;
    sp.s = s;
    sp.theta = theta;
    sp.m = m;
    return sp;
  }
  static SymbolSpec eta_deriv(double s, double theta, const MultiIndex& a) {
    SymbolSpec sp;
    sp.kind = SymbolKind::EtaDeriv;
    sp.s = s;
    sp.theta = theta;
    sp.alpha = a;
    return sp;
  }
  static SymbolSpec remainder_taylor(double s, const MultiIndex& a, int quad = 32) {
    SymbolSpec sp;
    sp.kind = SymbolKind::RemainderTaylor;
    sp.s = s;
    sp.alpha = a;
    sp.quad_order = quad;
    return sp;
  }
  static SymbolSpec remainder_first(double s, const MultiIndex& a, int quad = 32) {
    SymbolSpec sp;
    sp.kind = SymbolKind::RemainderFirstOrder;
    sp.s = s;
    sp.alpha = a;
    sp.quad_order = quad;
    return sp;
  }
  static SymbolSpec remainder_second(double s, const MultiIndex& a, int quad = 32) {
    SymbolSpec sp;
    sp.kind = SymbolKind::RemainderSecondOrder;
    sp.s = s;
    sp.alpha = a;
    sp.quad_order = quad;
    return sp;
  }
  static SymbolSpec custom_symbol(std::function<double(const std::array<double, 2>&, const std::array<double, 2>&)> fn) {
    SymbolSpec sp;
    sp.kind = SymbolKind::Custom;
    sp.custom = std::move(fn);
    return sp;
  }

  SymbolSpec with_low_high(const LPFamily& fam, int offset = 3) const {
    SymbolSpec sp = *this;
    sp.loc = LocalizationKind::LowHigh;
    sp.loc_family = &fam;
    sp.loc_offset = offset;
    return sp;
  }
  SymbolSpec with_diagonal(const LPFamily& fam, int width = 2) const {
    SymbolSpec sp = *this;
    sp.loc = LocalizationKind::Diagonal;
    sp.loc_family = &fam;
    sp.loc_width = width;
    return sp;
  }

  void validate(int dim) const {
    if (kind == SymbolKind::ThetaDeriv && (m < 0 || m > 4)) throw std::invalid_argument("SymbolSpec: ThetaDeriv order out of range");
    if (kind == SymbolKind::EtaDeriv) alpha.validate(dim);
    if (kind == SymbolKind::RemainderTaylor || kind == SymbolKind::RemainderFirstOrder ||
        kind == SymbolKind::RemainderSecondOrder) {
      alpha.validate(dim);
      const int ell = alpha.order();
      if (ell < 1 || ell > 3) throw std::invalid_argument("SymbolSpec: remainder kernel needs 1 <= |alpha| <= 3");
      if (kind == SymbolKind::RemainderFirstOrder && ell != 1)
        throw std::invalid_argument("SymbolSpec: first-order kernel needs |alpha| = 1");
      if (kind == SymbolKind::RemainderSecondOrder && ell != 2)
        throw std::invalid_argument("SymbolSpec: second-order kernel needs |alpha| = 2");
      if (quad_order < 2 || quad_order > 256) throw std::invalid_argument("SymbolSpec: quadrature order out of range");
    }
    if (kind == SymbolKind::Custom && !custom) throw std::invalid_argument("SymbolSpec: custom symbol without evaluator");
    if (loc != LocalizationKind::None && loc_family == nullptr)
      throw std::invalid_argument("SymbolSpec: localization without a family");
  }
};

namespace detail {

inline double norm2(int dim, const std::array<double, 2>& v) {
  return dim == 2 ? std::hypot(v[0], v[1]) : std::abs(v[0]);
}

// Low-high weight sum_k PsiHat_{k-offset}(|xi|) PhiHat_k(|eta|) over the
// family's band range; at most two band terms are nonzero for any eta.
inline double low_high_weight(const SymbolSpec& sp, double rxi, double reta) {
  double w = 0.0;
  for (int k = sp.loc_family->j_min; k <= sp.loc_family->j_max; ++k) {
    const double phi = band_profile_scaled(k, reta);
    if (phi == 0.0) continue;
    w += lowpass_profile_scaled(k - sp.loc_offset, rxi) * phi;
  }
  return w;
}

inline double diagonal_weight(const SymbolSpec& sp, double rxi, double reta) {
  double w = 0.0;
  for (int j = sp.loc_family->j_min; j <= sp.loc_family->j_max; ++j) {
    const double pj = band_profile_scaled(j, rxi);
    if (pj == 0.0) continue;
    double inner = 0.0;
    for (int k = sp.loc_family->j_min; k <= sp.loc_family->j_max; ++k) {
      if (std::abs(j - k) > sp.loc_width) continue;
      inner += band_profile_scaled(k, reta);
    }
    w += pj * inner;
  }
  return w;
}

// Multinomial weight in front of xi^alpha d^alpha, per convention.
inline double theta_coeff(CoeffConvention cc, const MultiIndex& a) {
  const double mf = factorial(a.order());
  const double af = multi_factorial(a);
  return cc == CoeffConvention::ChainRule ? 1.0 / af : af / mf;
}

inline double remainder_coeff(CoeffConvention cc, const MultiIndex& a) {
  const int ell = a.order();
  const double af = multi_factorial(a);
  const double base = 1.0 / factorial(ell - 1);
  return cc == CoeffConvention::ChainRule ? base * factorial(ell) / af : base * af;
}

inline double xi_power(int dim, const std::array<double, 2>& xi, const MultiIndex& a) {
  double r = ipow(xi[0], a.entries[0]);
  if (dim == 2) r *= ipow(xi[1], a.entries[1]);
  return r;
}

}  // namespace detail

struct SymbolValue {
  double value = 0.0;
  bool singular = false;
};

// Pointwise symbol evaluation at physical wavevectors (1D uses component 0).
inline SymbolValue eval_symbol_flagged(const SymbolSpec& sp, const std::array<double, 2>& xi,
                                       const std::array<double, 2>& eta, int dim) {
  SymbolValue out;
  switch (sp.kind) {
    case SymbolKind::Constant:
      out.value = sp.constant;
      break;
    case SymbolKind::SumRiesz: {
      const std::array<double, 2> t{xi[0] + eta[0], xi[1] + eta[1]};
      out.value = deriv_abs_pow(dim, sp.s, dim == 1 ? MultiIndex(0) : MultiIndex(0, 0), t, &out.singular);
      break;
    }
    case SymbolKind::ShiftedRiesz: {
      const std::array<double, 2> t{eta[0] + sp.theta * xi[0], eta[1] + sp.theta * xi[1]};
      out.value = deriv_abs_pow(dim, sp.s, dim == 1 ? MultiIndex(0) : MultiIndex(0, 0), t, &out.singular);
      break;
    }
    case SymbolKind::ThetaDeriv: {
      const std::array<double, 2> t{eta[0] + sp.theta * xi[0], eta[1] + sp.theta * xi[1]};
      double acc = 0.0;
      for (const MultiIndex& a : detail::indices_of_order(dim, sp.m)) {
        const double d = deriv_abs_pow(dim, sp.s, a, t, &out.singular);
        acc += detail::theta_coeff(sp.convention, a) * detail::xi_power(dim, xi, a) * d;
      }
      out.value = acc;
      break;
    }
    case SymbolKind::EtaDeriv: {
      const std::array<double, 2> t{eta[0] + sp.theta * xi[0], eta[1] + sp.theta * xi[1]};
      const double d = deriv_abs_pow(dim, sp.s, sp.alpha, t, &out.singular);
      out.value = detail::multi_factorial(sp.alpha) / detail::factorial(sp.alpha.order()) * d;
      break;
    }
    case SymbolKind::RemainderTaylor:
    case SymbolKind::RemainderFirstOrder:
    case SymbolKind::RemainderSecondOrder: {
      const int ell = sp.alpha.order();
      const double reta = detail::norm2(dim, eta);
      if (reta == 0.0) {
        out.singular = true;
        break;
      }
      const QuadRule& rule = gauss_legendre_01(sp.quad_order);
      double integral = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double th = rule.nodes[q];
        const std::array<double, 2> t{eta[0] + th * xi[0], eta[1] + th * xi[1]};
        const double d = deriv_abs_pow(dim, sp.s, sp.alpha, t, &out.singular);
        integral += rule.weights[q] * std::pow(1.0 - th, static_cast<double>(ell - 1)) * d;
      }
      out.value = detail::remainder_coeff(sp.convention, sp.alpha) * integral * std::pow(reta, ell - sp.s);
      break;
    }
    case SymbolKind::Custom:
      out.value = sp.custom(xi, eta);
      break;
  }
  if (sp.loc != LocalizationKind::None && out.value != 0.0) {
    const double rxi = detail::norm2(dim, xi);
    const double reta = detail::norm2(dim, eta);
    const double w = sp.loc == LocalizationKind::LowHigh ? detail::low_high_weight(sp, rxi, reta)
                                                         : detail::diagonal_weight(sp, rxi, reta);
    out.value *= w;
  }
  return out;
}

inline double eval_symbol(const SymbolSpec& sp, const std::array<double, 2>& xi, const std::array<double, 2>& eta,
                          int dim) {
  return eval_symbol_flagged(sp, xi, eta, dim).value;
}

// ---------------------------------------------------------------------------
// Deterministic cone sampling and symbol-bound scans.
// ---------------------------------------------------------------------------

struct ConeSample {
  int dim = 1;
  int n_scales = 0;
  std::vector<std::array<double, 4>> pairs;  // xi0, xi1, eta0, eta1
  std::vector<int> scale_index;              // dyadic scale of each pair
  std::vector<double> thetas;
};

// 40 dyadic |eta| scales x 16 ratios |xi|/|eta| in (0, 1/2] x 17 theta values,
// with a small fixed set of directions; every pair sits strictly inside the
// cone 0 < |xi| <= |eta|/2.
inline ConeSample make_cone_sample(int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("make_cone_sample: dim must be 1 or 2");
  ConeSample cs;
  cs.dim = dim;
  cs.n_scales = 40;
  for (int i = 0; i <= 16; ++i) cs.thetas.push_back(i / 16.0);
  std::vector<std::array<double, 4>> dirs;  // xi dir (2) then eta dir (2)
  if (dim == 1) {
    dirs = {{1.0, 0.0, 1.0, 0.0}, {-1.0, 0.0, 1.0, 0.0}, {1.0, 0.0, -1.0, 0.0}};
  } else {
    const double eta_angles[3] = {0.0, 0.61, 1.27};
    const double rel_angles[4] = {0.0, 0.8, 1.9, kPi};
    for (double ea : eta_angles) {
      for (double ra : rel_angles) {
        dirs.push_back({std::cos(ea + ra), std::sin(ea + ra), std::cos(ea), std::sin(ea)});
      }
    }
  }
  for (int t = 0; t < cs.n_scales; ++t) {
    const double scale = std::ldexp(1.0, t - 10);  // |eta| = 2^{t-10}
    for (int i = 1; i <= 16; ++i) {
      const double ratio = i / 32.0;  // (0, 1/2]
      for (const auto& d : dirs) {
        const double rxi = ratio * scale;
        cs.pairs.push_back({rxi * d[0], rxi * d[1], scale * d[2], scale * d[3]});
        cs.scale_index.push_back(t);
      }
    }
  }
  return cs;
}

struct ConeBoundEntry {
  MultiIndex alpha;  // xi-derivative order
  MultiIndex beta;   // eta-derivative order
  double q = 0.0;    // max normalized |d^alpha_xi d^beta_eta a|
  std::vector<double> per_scale;
  double scale_spread = 0.0;  // (max - min)/max of per-scale sups
  long singular_points = 0;
};

struct ConeBoundReport {
  double s = 0.0;
  int dim = 1;
  std::vector<ConeBoundEntry> entries;
};

// For each derivative pair (alpha, beta) report
//   Q = sup |d^alpha_xi d^beta_eta a_s| * |eta|^{|alpha|+|beta|-s}
// over the sample; the xi-derivatives contribute theta^{|alpha|} times the
// |alpha|+|beta| radial derivative at eta + theta*xi.
inline ConeBoundReport symbol_cone_bounds(double s, const std::vector<std::pair<MultiIndex, MultiIndex>>& orders,
                                          const ConeSample& sample) {
  ConeBoundReport rep;
  rep.s = s;
  rep.dim = sample.dim;
  for (const auto& ab : orders) {
    ab.first.validate(sample.dim);
    ab.second.validate(sample.dim);
    const int total = ab.first.order() + ab.second.order();
    if (total > 4) throw std::invalid_argument("symbol_cone_bounds: total derivative order above 4");
    MultiIndex combined(ab.first.entries[0] + ab.second.entries[0], ab.first.entries[1] + ab.second.entries[1]);
    if (sample.dim == 1) combined = MultiIndex(total);
    ConeBoundEntry entry;
    entry.alpha = ab.first;
    entry.beta = ab.second;
    entry.per_scale.assign(static_cast<std::size_t>(sample.n_scales), 0.0);
    for (std::size_t ip = 0; ip < sample.pairs.size(); ++ip) {
      const auto& pr = sample.pairs[ip];
      const std::array<double, 2> xi{pr[0], pr[1]};
      const std::array<double, 2> eta{pr[2], pr[3]};
      const double reta = detail::norm2(sample.dim, eta);
      const double norm = std::pow(reta, total - s);
      for (double th : sample.thetas) {
        const std::array<double, 2> t{eta[0] + th * xi[0], eta[1] + th * xi[1]};
        bool sing = false;
        const double d = deriv_abs_pow(sample.dim, s, combined, t, &sing);
        if (sing) {
          ++entry.singular_points;
          continue;
        }
        const double v = std::abs(detail::ipow(th, ab.first.order()) * d) * norm;
        auto& slot = entry.per_scale[static_cast<std::size_t>(sample.scale_index[ip])];
        slot = std::max(slot, v);
      }
    }
    double hi = 0.0, lo = 0.0;
    for (std::size_t i = 0; i < entry.per_scale.size(); ++i) {
      const double v = entry.per_scale[i];
      if (i == 0) hi = lo = v;
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    entry.q = hi;
    entry.scale_spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
    rep.entries.push_back(std::move(entry));
  }
  return rep;
}

struct HomogeneityScan {
  std::vector<ConeBoundReport> reports;
  double max_spread = 0.0;
  double spread_tolerance = 1e-9;
  bool pass = false;
};

// Scale-invariance scan: the per-scale sups of every normalized bound must
// coincide across all 40 dyadic scales (the symbols are homogeneous).
inline HomogeneityScan homogeneity_scan(const std::vector<double>& s_list,
                                        const std::vector<std::pair<MultiIndex, MultiIndex>>& orders, int dim = 1,
                                        double spread_tolerance = 1e-9) {
  HomogeneityScan scan;
  scan.spread_tolerance = spread_tolerance;
  const ConeSample sample = make_cone_sample(dim);
  bool all_finite = true;
  for (double s : s_list) {
    ConeBoundReport rep = symbol_cone_bounds(s, orders, sample);
    for (const auto& e : rep.entries) {
      scan.max_spread = std::max(scan.max_spread, e.scale_spread);
      if (!std::isfinite(e.q)) all_finite = false;
    }
    scan.reports.push_back(std::move(rep));
  }
  scan.pass = all_finite && scan.max_spread <= scan.spread_tolerance;
  return scan;
}

}  // namespace fraclr
