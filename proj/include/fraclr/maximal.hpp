#pragma once

// Discrete Hardy-Littlewood maximal operator on the periodic grid.
//
// Mf(x) = max over the dyadic radius set r = h*2^i, 0 <= i <= log2(N/2), of
// the average of |f| over the closed periodic ball {dist(y, x) <= r}, together
// with the degenerate single-point ball (the r -> 0 member), so Mf >= |f|
// holds exactly. Ball membership is decided on canonical integer offsets
// (each torus point counted exactly once; at the largest radius the antipode
// appears once, not twice), which keeps the averages exact rationals of the
// sampled values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fraclr/grid.hpp"
#include "fraclr/spectral.hpp"

namespace fraclr {

namespace detail {

// Canonical per-axis offsets run through (-N/2, N/2]; squared Euclidean
// distance in index units is compared against (2^i)^2 in exact integers.
inline std::vector<std::vector<std::ptrdiff_t>> ball_offset_table(const GridSpec& g) {
  const int n = g.n;
  const int radius_levels = static_cast<int>(std::lround(std::log2(static_cast<double>(n / 2))));
  std::vector<std::vector<std::ptrdiff_t>> table(static_cast<std::size_t>(radius_levels) + 1);
  for (int i = 0; i <= radius_levels; ++i) {
    const long long r2 = (1ll << i) * (1ll << i);
    auto& offs = table[static_cast<std::size_t>(i)];
    if (g.dim == 1) {
      for (int j = -n / 2 + 1; j <= n / 2; ++j) {
        if (static_cast<long long>(j) * j <= r2) offs.push_back(index_of_freq(j >= n / 2 ? j - n : j, n));
      }
    } else {
      for (int j0 = -n / 2 + 1; j0 <= n / 2; ++j0) {
        for (int j1 = -n / 2 + 1; j1 <= n / 2; ++j1) {
          const long long d2 = static_cast<long long>(j0) * j0 + static_cast<long long>(j1) * j1;
          if (d2 <= r2) {
            const int a0 = index_of_freq(j0 >= n / 2 ? j0 - n : j0, n);
            const int a1 = index_of_freq(j1 >= n / 2 ? j1 - n : j1, n);
            offs.push_back(static_cast<std::ptrdiff_t>(a0) * n + a1);
          }
        }
      }
    }
  }
  return table;
}

}  // namespace detail

inline RealField maximal_function(const RealField& f) {
  f.grid.validate();
  const GridSpec& g = f.grid;
  const std::size_t total = g.total();
  const int n = g.n;

  std::vector<double> af(total);
  for (std::size_t i = 0; i < total; ++i) af[i] = std::abs(f.values[i]);

  RealField out;
  out.grid = g;
  out.values = af;  // degenerate point ball

  const auto table = detail::ball_offset_table(g);
  std::vector<double> avg(total);
  for (const auto& offs : table) {
    const double inv_count = 1.0 / static_cast<double>(offs.size());
    if (g.dim == 1) {
      for (std::size_t x = 0; x < total; ++x) {
        double acc = 0.0;
        for (std::ptrdiff_t o : offs) {
          std::size_t y = x + static_cast<std::size_t>(o);
          if (y >= total) y -= total;
          acc += af[y];
        }
        avg[x] = acc * inv_count;
      }
    } else {
      for (int x0 = 0; x0 < n; ++x0) {
        for (int x1 = 0; x1 < n; ++x1) {
          double acc = 0.0;
          for (std::ptrdiff_t o : offs) {
            // Offsets are stored flat; unpack and wrap per axis.
            int o0 = static_cast<int>(o) / n, o1 = static_cast<int>(o) % n;
            int y0 = x0 + o0;
            if (y0 >= n) y0 -= n;
            int y1 = x1 + o1;
            if (y1 >= n) y1 -= n;
            acc += af[static_cast<std::size_t>(y0) * n + y1];
          }
          avg[static_cast<std::size_t>(x0) * n + x1] = acc * inv_count;
        }
      }
    }
    for (std::size_t x = 0; x < total; ++x) out.values[x] = std::max(out.values[x], avg[x]);
  }
  return out;
}

// || (M f_j)_j ||_{L^p(l^q_j)}: pointwise l^q across the sequence of maximal
// functions, then the L^p quadrature norm. q may be infinity (pointwise sup).
inline double vector_maximal_norm(const std::vector<RealField>& fs, double p, double q) {
  if (fs.empty()) throw std::invalid_argument("vector_maximal_norm: empty sequence");
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("vector_maximal_norm: require 1 < p < infinity");
  if (!(q > 1.0)) throw std::invalid_argument("vector_maximal_norm: require 1 < q <= infinity");
  const GridSpec g = fs.front().grid;
  for (const auto& f : fs) require_same_grid(g, f.grid, "vector_maximal_norm");

  std::vector<RealField> mfs;
  mfs.reserve(fs.size());
  for (const auto& f : fs) mfs.push_back(maximal_function(f));

  RealField agg = RealField::zeros(g);
  if (std::isinf(q)) {
    for (const auto& m : mfs) {
      for (std::size_t i = 0; i < agg.values.size(); ++i) agg.values[i] = std::max(agg.values[i], m.values[i]);
    }
  } else {
    for (const auto& m : mfs) {
      for (std::size_t i = 0; i < agg.values.size(); ++i) agg.values[i] += std::pow(m.values[i], q);
    }
    for (auto& v : agg.values) v = std::pow(v, 1.0 / q);
  }
  return lp_norm(agg, p);
}

}  // namespace fraclr
