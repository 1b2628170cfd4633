#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_support.hpp"

using namespace fraclr;

namespace {

FamilySpec spec_of(FamilyKind kind) {
  FamilySpec sp;
  sp.kind = kind;
  sp.k = 4;
  sp.t = 0;
  sp.j_lo = 1;
  sp.j_hi = 4;
  sp.seed = 21;
  return sp;
}

}  // namespace

TEST_CASE("counter rng is frozen and stays in range", "[families]") {
  REQUIRE(uniform_pm1(1, 1, 0) == -0.4505746860235853);
  REQUIRE(uniform_pm1(1, 1, 1) == -0.12043012127215436);
  REQUIRE(uniform_pm1(1, 2, 0) == -0.36135422154252717);
  REQUIRE(uniform_pm1(42, 1, 7) == 0.60986324008718329);
  REQUIRE(uniform_pm1(4242, 3, 123456) == 0.12245826286340344);
  for (std::uint64_t i = 0; i < 4096; ++i) {
    const double v = uniform_pm1(9, 1, i);
    REQUIRE(v >= -1.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("family kind names round trip", "[families]") {
  for (FamilyKind k :
       {FamilyKind::LocalizedPair, FamilyKind::Gaussian, FamilyKind::Dilation, FamilyKind::RandomBandlimited}) {
    REQUIRE(family_kind_from_string(to_string(k)) == k);
  }
  REQUIRE_THROWS_AS(family_kind_from_string("perlin"), std::invalid_argument);
  FamilySpec sp = spec_of(FamilyKind::LocalizedPair);
  REQUIRE(sp.label() == "localized_pair_k4");
  sp = spec_of(FamilyKind::Dilation);
  sp.t = -2;
  REQUIRE(sp.label() == "dilation_t-2");
  sp = spec_of(FamilyKind::RandomBandlimited);
  REQUIRE(sp.label() == "random_bandlimited_s21");
}

TEST_CASE("generated pairs are unit l2 and bitwise reproducible", "[families]") {
  GridSpec g{1, 64, kTau};
  const LPFamily fam = build_family(g, 0, 4);
  for (FamilyKind k :
       {FamilyKind::LocalizedPair, FamilyKind::Gaussian, FamilyKind::Dilation, FamilyKind::RandomBandlimited}) {
    const FamilySpec sp = spec_of(k);
    const FieldPair a = generate(sp, fam);
    const FieldPair b = generate(sp, fam);
    INFO("family = " << sp.label());
    REQUIRE(a.f.values == b.f.values);
    REQUIRE(a.g.values == b.g.values);
    REQUIRE(std::abs(l2_norm(a.f) - 1.0) < 1e-12);
    REQUIRE(std::abs(l2_norm(a.g) - 1.0) < 1e-12);
  }
  // Different seeds give different fields.
  FamilySpec sp = spec_of(FamilyKind::RandomBandlimited);
  const FieldPair a = generate(sp, fam);
  sp.seed = 22;
  const FieldPair b = generate(sp, fam);
  REQUIRE(testutil::max_diff(a.f, b.f) > 1e-3);
}

TEST_CASE("localized pair honors its support contract", "[families]") {
  GridSpec g{1, 64, kTau};
  const LPFamily fam = build_family(g, 0, 4);
  const FieldPair pair = generate(spec_of(FamilyKind::LocalizedPair), fam);
  // f lives at radii <= 2^{k-2} = 4; g inside [2^{k-1}, 2^{k+1}] = [8, 32],
  // additionally capped so that f*g products cannot alias.
  REQUIRE(band_energy_outside(pair.f, 0.0, 4.0) < 1e-13);
  REQUIRE(band_energy_outside(pair.g, 8.0, 32.0) < 1e-13);
  REQUIRE(band_energy_outside(pair.g, 8.0, 28.0) < 1e-13);  // Nyquist-safety cap n/2 - 4
}

TEST_CASE("random bandlimited pair sits in its annulus", "[families]") {
  GridSpec g{1, 64, kTau};
  const LPFamily fam = build_family(g, 0, 4);
  const FieldPair pair = generate(spec_of(FamilyKind::RandomBandlimited), fam);
  REQUIRE(band_energy_outside(pair.f, 2.0, 16.0) < 1e-13);
  REQUIRE(band_energy_outside(pair.g, 2.0, 16.0) < 1e-13);
  // f (stream 1) and g (stream 2) are distinct draws.
  REQUIRE(testutil::max_diff(pair.f, pair.g) > 1e-3);
}

TEST_CASE("dilation family occupies exactly the scaled mode pair", "[families]") {
  GridSpec g{1, 64, kTau};
  const LPFamily fam = build_family(g, 0, 4);
  for (int t : {-1, 0, 1}) {
    FamilySpec sp = spec_of(FamilyKind::Dilation);
    sp.t = t;
    const FieldPair pair = generate(sp, fam);
    const double lam = std::ldexp(1.0, t);
    INFO("t = " << t);
    REQUIRE(band_energy_outside(pair.f, 8.0 * lam, 12.0 * lam) < 1e-13);
    REQUIRE(band_energy_outside(pair.g, 8.0 * lam, 12.0 * lam) < 1e-13);
  }
}

TEST_CASE("gaussian pair is smooth and strictly positive", "[families]") {
  GridSpec g{1, 64, kTau};
  const LPFamily fam = build_family(g, 0, 4);
  const FieldPair pair = generate(spec_of(FamilyKind::Gaussian), fam);
  for (double v : pair.f.values) REQUIRE(v > 0.0);
  for (double v : pair.g.values) REQUIRE(v > 0.0);
  // The wider bump decays essentially to zero at the antipode of its center.
  const double far = pair.f.values[static_cast<std::size_t>(64.0 * 0.85)];
  const double peak = max_abs(pair.f);
  REQUIRE(far < 1e-6 * peak);
}

TEST_CASE("family validation rejects out-of-range specs", "[families]") {
  GridSpec g{1, 64, kTau};
  const LPFamily fam = build_family(g, 0, 4);
  FamilySpec sp = spec_of(FamilyKind::LocalizedPair);
  sp.k = 5;  // above the family's top band
  REQUIRE_THROWS_AS(generate(sp, fam), std::invalid_argument);
  sp = spec_of(FamilyKind::Dilation);
  sp.t = -3;
  REQUIRE_THROWS_AS(generate(sp, fam), std::invalid_argument);
  sp.t = 2;  // 12 * 4 = 48 >= 32
  REQUIRE_THROWS_AS(generate(sp, fam), std::invalid_argument);
  sp = spec_of(FamilyKind::RandomBandlimited);
  sp.j_lo = 4;
  sp.j_hi = 4;
  REQUIRE_THROWS_AS(generate(sp, fam), std::invalid_argument);
  sp.j_lo = 1;
  sp.j_hi = 6;  // 64 above the Nyquist radius 32
  REQUIRE_THROWS_AS(generate(sp, fam), std::invalid_argument);
}
