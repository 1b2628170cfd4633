#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "test_support.hpp"

using namespace fraclr;

namespace {

GridSpec grid1d(int n = 64) { return GridSpec{1, n, kTau}; }

RealField sampled(const GridSpec& g, double (*fn)(double)) {
  RealField f = RealField::zeros(g);
  const double h = g.spacing();
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = fn(static_cast<double>(i) * h);
  return f;
}

// Periodized Gaussian (11 images, matching the generator) and its exact
// second derivative, used as an analytic differentiation oracle.
double gauss_sum(double x, double c, double sigma, double L, int deriv) {
  double v = 0.0;
  for (int img = -5; img <= 5; ++img) {
    const double dx = x - c - img * L;
    const double e = std::exp(-dx * dx / (2.0 * sigma * sigma));
    if (deriv == 0) {
      v += e;
    } else {  // second derivative
      v += e * (dx * dx / (sigma * sigma) - 1.0) / (sigma * sigma);
    }
  }
  return v;
}

}  // namespace

TEST_CASE("transform round trip reproduces samples", "[spectral]") {
  const GridSpec g = grid1d();
  const RealField f = testutil::noise(g, 7);
  const RealField back = to_real(to_spectral(f));
  REQUIRE(testutil::max_diff(back, f) < 1e-12);
}

TEST_CASE("pure tone lands on the two conjugate coefficients", "[spectral]") {
  const GridSpec g = grid1d();
  const RealField f = sampled(g, [](double x) { return std::cos(3.0 * x); });
  const SpectralField F = to_spectral(f);
  REQUIRE(std::abs(F.coeffs[3] - std::complex<double>(0.5, 0.0)) < 1e-13);
  REQUIRE(std::abs(F.coeffs[g.total() - 3] - std::complex<double>(0.5, 0.0)) < 1e-13);
  double rest = 0.0;
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
    if (i != 3 && i != F.coeffs.size() - 3) rest = std::max(rest, std::abs(F.coeffs[i]));
  }
  REQUIRE(rest < 1e-14);
}

TEST_CASE("spectral coefficients of a real field are Hermitian", "[spectral]") {
  const GridSpec g = grid1d();
  const SpectralField F = to_spectral(testutil::noise(g, 9));
  for (int k = 1; k < g.n / 2; ++k) {
    const auto a = F.coeffs[static_cast<std::size_t>(index_of_freq(k, g.n))];
    const auto b = F.coeffs[static_cast<std::size_t>(index_of_freq(-k, g.n))];
    REQUIRE(std::abs(a - std::conj(b)) < 1e-13);
  }
}

TEST_CASE("riesz potential scales a sine eigenfunction", "[spectral]") {
  const GridSpec g = grid1d();
  const RealField f = sampled(g, [](double x) { return std::sin(3.0 * x); });
  const RealField out = riesz_potential(f, 1.5);
  const double lambda = std::pow(3.0, 1.5);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    REQUIRE(std::abs(out.values[i] - lambda * f.values[i]) < 1e-12 * lambda);
  }
}

TEST_CASE("riesz zero-frequency conventions", "[spectral]") {
  const GridSpec g = grid1d();
  RealField c = RealField::zeros(g);
  for (auto& v : c.values) v = 2.5;
  // s > 0 annihilates constants, s = 0 is the identity.
  REQUIRE(max_abs(riesz_potential(c, 1.5)) < 1e-13);
  REQUIRE(testutil::max_diff(riesz_potential(c, 0.0), c) < 1e-13);
  const RealField f = testutil::noise(g, 3);
  REQUIRE(testutil::max_diff(riesz_potential(f, 0.0), f) < 1e-12);
}

TEST_CASE("riesz semigroup composition", "[spectral]") {
  const GridSpec g = grid1d(128);
  const RealField f = testutil::bandlimited_noise(g, 1, 4, 5);
  const RealField two_step = riesz_potential(riesz_potential(f, 0.7), 0.8);
  const RealField one_step = riesz_potential(f, 1.5);
  REQUIRE(testutil::rel_l2_diff(two_step, one_step) < 1e-11);
}

TEST_CASE("riesz commutes with the coordinate derivative", "[spectral]") {
  const GridSpec g = grid1d(128);
  const RealField f = testutil::bandlimited_noise(g, 1, 4, 6);
  const RealField a = riesz_potential(partial_derivative(f, MultiIndex(1)), 0.5);
  const RealField b = partial_derivative(riesz_potential(f, 0.5), MultiIndex(1));
  REQUIRE(testutil::rel_l2_diff(a, b) < 1e-12);
}

TEST_CASE("gaussian derivative oracles", "[spectral]") {
  const GridSpec g{1, 256, kTau};
  const double c = 0.35 * g.length, sigma = g.length / 40.0;
  RealField f = RealField::zeros(g);
  RealField d2 = RealField::zeros(g);
  const double h = g.spacing();
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double x = static_cast<double>(i) * h;
    f.values[i] = gauss_sum(x, c, sigma, g.length, 0);
    d2.values[i] = gauss_sum(x, c, sigma, g.length, 2);
  }
  const double scale = max_abs(d2);
  // partial_derivative realises (i xi)^2 = -xi^2, the true second derivative.
  REQUIRE(testutil::max_diff(partial_derivative(f, MultiIndex(2)), d2) < 1e-8 * scale);
  // riesz s=2 is |xi|^2 = -(d/dx)^2 up to the (absent) mean of f''.
  const RealField neg = scaled(d2, -1.0);
  const RealField r2 = riesz_potential(f, 2.0);
  // The Gaussian has a nonzero mean, which D^2 annihilates but -f'' keeps
  // as exactly zero mean; both sides agree because f'' integrates to zero.
  REQUIRE(testutil::max_diff(r2, neg) < 1e-10 * scale);
}

TEST_CASE("norm quadrature identities", "[spectral]") {
  const GridSpec g = grid1d();
  const RealField s = sampled(g, [](double x) { return std::sin(x); });
  // Trapezoid quadrature is exact for trigonometric polynomials: ||sin||_2 = sqrt(pi).
  REQUIRE(std::abs(lp_norm(s, 2.0) - std::sqrt(kPi)) < 1e-12);
  RealField c = RealField::zeros(g);
  for (auto& v : c.values) v = 1.7;
  for (double p : {1.0, 2.0, 4.0}) {
    REQUIRE(std::abs(lp_norm(c, p) - 1.7 * std::pow(g.length, 1.0 / p)) < 1e-12);
  }
  REQUIRE_THROWS_AS(lp_norm(s, 0.5), std::invalid_argument);
}

TEST_CASE("minkowski inequality on the grid norm", "[spectral]") {
  const GridSpec g = grid1d();
  const RealField a = testutil::noise(g, 21);
  const RealField b = testutil::noise(g, 22);
  RealField sum = a;
  axpy(sum, 1.0, b);
  for (double p : {1.5, 2.0, 3.0}) {
    REQUIRE(lp_norm(sum, p) <= lp_norm(a, p) + lp_norm(b, p) + 1e-12);
  }
}

TEST_CASE("parseval pairing between the two normalizations", "[spectral]") {
  const GridSpec g = grid1d();
  const RealField f = testutil::noise(g, 33);
  const SpectralField F = to_spectral(f);
  double coeff_energy = 0.0;
  for (const auto& cc : F.coeffs) coeff_energy += std::norm(cc);
  const double lhs = l2_norm(f) * l2_norm(f);
  REQUIRE(std::abs(lhs - g.length * coeff_energy) < 1e-12 * lhs);
}

TEST_CASE("two-dimensional round trip and radial multiplier", "[spectral]") {
  GridSpec g{2, 32, kTau};
  RealField f = RealField::zeros(g);
  const double h = g.spacing();
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double x = static_cast<double>(i / static_cast<std::size_t>(g.n)) * h;
    const double y = static_cast<double>(i % static_cast<std::size_t>(g.n)) * h;
    f.values[i] = std::cos(2.0 * x + y);
  }
  REQUIRE(testutil::max_diff(to_real(to_spectral(f)), f) < 1e-12);
  // |(2,1)| = sqrt(5): the plane wave is an eigenfunction of D^1.
  const RealField r = riesz_potential(f, 1.0);
  const double lambda = std::sqrt(5.0);
  REQUIRE(testutil::max_diff(r, scaled(f, lambda)) < 1e-11);
}

TEST_CASE("to_real rejects non-symmetric coefficients", "[spectral]") {
  const GridSpec g = grid1d();
  SpectralField F = SpectralField::zeros(g);
  F.coeffs[3] = std::complex<double>(1.0, 0.0);  // no conjugate partner at -3
  REQUIRE_THROWS_AS(to_real(F), std::runtime_error);
}
