#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "test_support.hpp"

using namespace fraclr;

namespace {

// Band-limited pair on the shared N=64 grid. The annulus spans radii
// [2, 16]: wide enough (frequency ratio 8) that the low-high region of the
// pair is non-empty -- the offset-3 paraproduct weight vanishes identically
// on any pair with ratio <= 4 -- while mode sums reach the Nyquist index at
// worst, where the wrapped contributions fold onto one real coefficient.
struct Pair {
  RealField f, g;
};

Pair test_pair(const GridSpec& g, std::uint64_t seed) {
  return {testutil::bandlimited_noise(g, 1, 4, seed, 1), testutil::bandlimited_noise(g, 1, 4, seed, 2)};
}

}  // namespace

TEST_CASE("constant symbol reproduces the pointwise product", "[bilinear]") {
  GridSpec g{1, 64, kTau};
  const auto [f, h] = test_pair(g, 51);
  const RealField lib = bilinear_apply_direct(SymbolSpec::make_constant(1.0), f, h);
  REQUIRE(testutil::max_diff(lib, multiply(f, h)) < 1e-12);
}

TEST_CASE("sum symbol factors through the riesz potential of the product", "[bilinear]") {
  GridSpec g{1, 64, kTau};
  const auto [f, h] = test_pair(g, 52);
  for (double s : {0.5, 1.5}) {
    const RealField lib = bilinear_apply_direct(SymbolSpec::sum_riesz(s), f, h);
    const RealField oracle = riesz_potential(multiply(f, h), s);
    REQUIRE(testutil::rel_l2_diff(lib, oracle) < 1e-11);
  }
}

TEST_CASE("shifted symbol at theta = 0 acts on the second factor only", "[bilinear]") {
  GridSpec g{1, 64, kTau};
  const auto [f, h] = test_pair(g, 53);
  const double s = 1.5;
  const RealField lib = bilinear_apply_direct(SymbolSpec::shifted_riesz(s, 0.0), f, h);
  REQUIRE(testutil::rel_l2_diff(lib, multiply(f, riesz_potential(h, s))) < 1e-11);
}

TEST_CASE("direct evaluation is bilinear", "[bilinear]") {
  GridSpec g{1, 64, kTau};
  const auto [f1, h] = test_pair(g, 54);
  const RealField f2 = testutil::bandlimited_noise(g, 1, 3, 55);
  const SymbolSpec sym = SymbolSpec::sum_riesz(1.5);
  RealField combo = f1;
  axpy(combo, 2.0, f2);
  const RealField lhs = bilinear_apply_direct(sym, combo, h);
  RealField rhs = bilinear_apply_direct(sym, f1, h);
  axpy(rhs, 2.0, bilinear_apply_direct(sym, f2, h));
  REQUIRE(testutil::rel_l2_diff(lhs, rhs) < 1e-11);
}

TEST_CASE("separable path matches the direct sum for derivative symbols", "[bilinear]") {
  GridSpec g{1, 64, kTau};
  const LPFamily fam = build_family(g, 0, 4);
  const auto [f, h] = test_pair(g, 56);
  const double s = 1.5;
  for (int m : {0, 1, 2}) {
    const SymbolSpec plain = SymbolSpec::theta_deriv(s, 0.0, m);
    REQUIRE(testutil::rel_l2_diff(bilinear_apply_separable(plain, f, h), bilinear_apply_direct(plain, f, h)) < 1e-10);
    const SymbolSpec localized = plain.with_low_high(fam);
    REQUIRE(testutil::rel_l2_diff(bilinear_apply_separable(localized, f, h), bilinear_apply_direct(localized, f, h)) <
            1e-10);
  }
  // Order 2: odd eta-derivative orders give an odd symbol, whose bilinear
  // action on a real pair is purely imaginary; only even orders stand alone.
  const SymbolSpec eta = SymbolSpec::eta_deriv(s, 0.0, MultiIndex(2));
  REQUIRE(testutil::rel_l2_diff(bilinear_apply_separable(eta, f, h), bilinear_apply_direct(eta, f, h)) < 1e-10);
}

TEST_CASE("separable path rejects unsupported symbols", "[bilinear]") {
  GridSpec g{1, 64, kTau};
  const auto [f, h] = test_pair(g, 57);
  REQUIRE_THROWS_AS(bilinear_apply_separable(SymbolSpec::sum_riesz(1.0), f, h), std::invalid_argument);
  REQUIRE_THROWS_AS(bilinear_apply_separable(SymbolSpec::theta_deriv(1.0, 0.5, 1), f, h), std::invalid_argument);
  const LPFamily fam = build_family(g, 0, 4);
  REQUIRE_THROWS_AS(bilinear_apply_separable(SymbolSpec::theta_deriv(1.0, 0.0, 1).with_diagonal(fam), f, h),
                    std::invalid_argument);
}

TEST_CASE("three-way decomposition pieces equal their localized direct sums", "[bilinear]") {
  GridSpec g{1, 64, kTau};
  const LPFamily fam = build_family(g, 0, 4);
  const auto [f, h] = test_pair(g, 58);
  const SymbolSpec sym = SymbolSpec::sum_riesz(1.5);
  const DecomposeResult dec = decompose(sym, f, h, fam);
  REQUIRE(testutil::rel_l2_diff(dec.low_high, bilinear_apply_direct(sym.with_low_high(fam), f, h)) < 1e-11);
  REQUIRE(testutil::rel_l2_diff(dec.diagonal, bilinear_apply_direct(sym.with_diagonal(fam), f, h)) < 1e-11);
  REQUIRE(testutil::rel_l2_diff(dec.high_low, bilinear_apply_direct(sym.with_low_high(fam), h, f)) < 1e-11);
  REQUIRE(dec.reconstruction_residual < 1e-10);
  // The pieces add back to the unlocalized operator.
  RealField sum = dec.low_high;
  axpy(sum, 1.0, dec.diagonal);
  axpy(sum, 1.0, dec.high_low);
  REQUIRE(testutil::rel_l2_diff(sum, bilinear_apply_direct(sym, f, h)) < 1e-10);
}

TEST_CASE("low-frequency first factor kills the mirrored paraproduct piece", "[bilinear]") {
  GridSpec g{1, 64, kTau};
  const LPFamily fam = build_family(g, 0, 4);
  // f below 2^2, g in the band around 2^4: the swapped low-high region
  // P_{<=j-3} g with g high-frequency is structurally empty.
  const RealField f = testutil::bandlimited_noise(g, 0, 2, 59);
  const RealField h = testutil::bandlimited_noise(g, 3, 4, 60);
  const DecomposeResult dec = decompose(SymbolSpec::sum_riesz(1.0), f, h, fam);
  REQUIRE(max_abs(dec.high_low) < 1e-12 * std::max(max_abs(dec.low_high), 1.0));
}

TEST_CASE("taylor remainder telescopes against the separable corrections", "[bilinear]") {
  GridSpec g{1, 64, kTau};
  const LPFamily fam = build_family(g, 0, 4);
  const auto [f, h] = test_pair(g, 61);
  for (double s : {0.5, 1.5, 2.5}) {
    for (int ell : {1, 2}) {
      RealField rest = bilinear_apply_direct(SymbolSpec::sum_riesz(s).with_low_high(fam), f, h);
      for (int m = 0; m < ell; ++m) {
        axpy(rest, -1.0, bilinear_apply_separable(SymbolSpec::theta_deriv(s, 0.0, m).with_low_high(fam), f, h));
      }
      const RealField lib = taylor_remainder_apply(f, h, s, ell, fam);
      REQUIRE(testutil::rel_l2_diff(lib, rest) < 1e-8);
    }
  }
}

TEST_CASE("quadratic symbol: order-2 taylor expansion is exact", "[bilinear]") {
  GridSpec g{1, 64, kTau};
  const LPFamily fam = build_family(g, 0, 4);
  const auto [f, h] = test_pair(g, 62);
  // |eta+theta*xi|^2 is a polynomial in theta, so the m <= 1 corrections plus
  // the l = 2 remainder reproduce the operator exactly, and the l = 3
  // remainder vanishes identically.
  RealField rest = bilinear_apply_direct(SymbolSpec::sum_riesz(2.0).with_low_high(fam), f, h);
  for (int m = 0; m < 2; ++m) {
    axpy(rest, -1.0, bilinear_apply_separable(SymbolSpec::theta_deriv(2.0, 0.0, m).with_low_high(fam), f, h));
  }
  REQUIRE(testutil::rel_l2_diff(taylor_remainder_apply(f, h, 2.0, 2, fam), rest) < 1e-11);
  REQUIRE(max_abs(taylor_remainder_apply(f, h, 2.0, 3, fam)) < 1e-12);
}

TEST_CASE("taylor remainder is insensitive to the quadrature order", "[bilinear]") {
  GridSpec g{1, 64, kTau};
  const LPFamily fam = build_family(g, 0, 4);
  const auto [f, h] = test_pair(g, 63);
  const RealField coarse = taylor_remainder_apply(f, h, 1.5, 2, fam, 16);
  const RealField fine = taylor_remainder_apply(f, h, 1.5, 2, fam, 64);
  REQUIRE(testutil::rel_l2_diff(coarse, fine) < 1e-10);
}

TEST_CASE("diagonal paraproduct matches the projection-loop oracle", "[bilinear]") {
  GridSpec g{1, 64, kTau};
  const LPFamily fam = build_family(g, 0, 4);
  const auto [f, h] = test_pair(g, 64);
  const double s1 = 0.5, s2 = 1.0, s3 = 0.25;
  const RealField df = riesz_potential(f, s2);
  const RealField dh = riesz_potential(h, s3);
  RealField acc = RealField::zeros(g);
  for (int j = 0; j <= 4; ++j) {
    const RealField pf = project(df, fam, j);
    const RealField ph = project(dh, fam, j);
    for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += pf.values[i] * ph.values[i];
  }
  const RealField oracle = riesz_potential(acc, s1);
  REQUIRE(testutil::rel_l2_diff(diagonal_paraproduct(s1, s2, s3, f, h, fam), oracle) < 1e-11);
}

TEST_CASE("direct engine guards its input domain", "[bilinear]") {
  GridSpec g{1, 64, kTau};
  // A pure Nyquist tone has no conjugate partner inside the wrapped sum.
  RealField nyq = RealField::zeros(g);
  for (std::size_t i = 0; i < nyq.values.size(); ++i) nyq.values[i] = (i % 2 == 0) ? 1.0 : -1.0;
  const RealField ok = testutil::bandlimited_noise(g, 1, 3, 65);
  REQUIRE_THROWS_AS(bilinear_apply_direct(SymbolSpec::make_constant(1.0), nyq, ok), std::invalid_argument);
  REQUIRE_THROWS_AS(bilinear_apply_direct(SymbolSpec::make_constant(1.0), ok, nyq), std::invalid_argument);
  // The O(N^2) engine refuses grids beyond its size cap.
  GridSpec big{1, 1024, kTau};
  const RealField bf = testutil::bandlimited_noise(big, 1, 3, 66);
  REQUIRE_THROWS_AS(bilinear_apply_direct(SymbolSpec::make_constant(1.0), bf, bf), std::invalid_argument);
}
