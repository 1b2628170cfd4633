#pragma once

// Gauss-Legendre quadrature on [0, 1]. Nodes are found by Newton iteration on
// the Legendre recurrence, which converges to machine precision in a handful
// of steps for the orders used here. Rules are cached per order behind a
// mutex, so lookups are cheap and thread-safe.

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "fraclr/grid.hpp"

namespace fraclr {

struct QuadRule {
  std::vector<double> nodes;    // in (0, 1)
  std::vector<double> weights;  // sum to 1
};

namespace detail {

inline QuadRule make_gauss_legendre_01(int order) {
  if (order < 1 || order > 512) throw std::invalid_argument("gauss_legendre_01: unsupported order");
  QuadRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int n = order;
  const int half = (n + 1) / 2;
  for (int k = 0; k < half; ++k) {
    // Standard initial guess for the k-th root of P_n on [-1, 1].
    double x = std::cos(kPi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // One final recurrence pass at the converged root keeps dp consistent.
        p0 = 1.0;
        p1 = x;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1, 1] -> [0, 1]; roots come out with decreasing x, store ascending.
    rule.nodes[static_cast<std::size_t>(n - 1 - k)] = 0.5 * (1.0 + x);
    rule.weights[static_cast<std::size_t>(n - 1 - k)] = 0.5 * w;
    rule.nodes[static_cast<std::size_t>(k)] = 0.5 * (1.0 - x);
    rule.weights[static_cast<std::size_t>(k)] = 0.5 * w;
  }
  return rule;
}

}  // namespace detail

inline const QuadRule& gauss_legendre_01(int order) {
  static std::mutex mtx;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, detail::make_gauss_legendre_01(order)).first;
  return it->second;
}

}  // namespace fraclr
