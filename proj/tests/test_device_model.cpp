#include "doctest.h"

#include <cmath>

#include "invchar/device_model.hpp"
#include "invchar/errors.hpp"

using namespace invchar;

namespace {

const DeviceParams kRef{};          // 90nm / 1um / 3nm / 0.4V / 550 cm^2/Vs
const PhysicalConstants kConst{};   // alpha 1.3, lambda 0.1, eps_r 3.9, vdd 1.2
const ReferenceModelConfig kSurr{}; // default surrogate knobs

// Frozen by evaluating the closed-form expressions by hand before the
// implementation existed.
constexpr double kIdsatAnalyticalRef = 2.947189492187915e-3;
constexpr double kIdsatReferenceRef = 2.4450178147728254e-3;

}  // namespace

TEST_CASE("alpha-power current: cutoff and golden value") {
  CHECK(idsat_analytical(kRef, kConst, kRef.v_th0, kConst.vdd) == 0.0);
  CHECK(idsat_analytical(kRef, kConst, 0.0, kConst.vdd) == 0.0);

  const double i = idsat_analytical(kRef, kConst, kConst.vdd, kConst.vdd);
  CHECK(i == doctest::Approx(kIdsatAnalyticalRef).epsilon(1e-12));
}

TEST_CASE("alpha-power current is exactly linear in W and 1/t_ox") {
  DeviceParams wide = kRef;
  wide.width = 2e-6;
  CHECK(idsat_analytical(wide, kConst, 1.2, 1.2) ==
        doctest::Approx(2.0 * idsat_analytical(kRef, kConst, 1.2, 1.2)).epsilon(1e-15));

  DeviceParams thick = kRef;
  thick.t_ox = 2.0 * kRef.t_ox;
  CHECK(idsat_analytical(thick, kConst, 1.2, 1.2) ==
        doctest::Approx(0.5 * idsat_analytical(kRef, kConst, 1.2, 1.2)).epsilon(1e-15));
}

TEST_CASE("alpha-power current rejects invalid parameters") {
  DeviceParams bad = kRef;
  bad.width = 0.0;
  CHECK_THROWS_AS(idsat_analytical(bad, kConst, 1.2, 1.2), DomainError);
  bad = kRef;
  bad.v_th0 = 1.3;  // above vdd
  CHECK_THROWS_AS(idsat_analytical(bad, kConst, 1.2, 1.2), DomainError);
  CHECK_THROWS_AS(idsat_analytical(kRef, kConst, -0.1, 1.2), DomainError);
}

TEST_CASE("reference current: cutoff, golden value, W nonlinearity") {
  const double v_th_eff = kRef.v_th0 - kSurr.eta_dibl * kConst.vdd;
  CHECK(id_reference(kRef, kConst, kSurr, v_th_eff, kConst.vdd) == 0.0);
  CHECK(id_reference(kRef, kConst, kSurr, 0.5 * v_th_eff, kConst.vdd) == 0.0);

  const double i1 = idsat_reference(kRef, kConst, kSurr);
  CHECK(i1 == doctest::Approx(kIdsatReferenceRef).epsilon(1e-12));
  CHECK(i1 == id_reference(kRef, kConst, kSurr, kConst.vdd, kConst.vdd));

  // Effective-width reduction: the current ratio of a 2um and a 1um device
  // is (2 - 0.05) / (1 - 0.05), not 2.
  DeviceParams wide = kRef;
  wide.width = 2e-6;
  const double i2 = idsat_reference(wide, kConst, kSurr);
  CHECK(i2 / i1 == doctest::Approx((2e-6 - kSurr.delta_w) / (1e-6 - kSurr.delta_w)).epsilon(1e-12));
  CHECK(std::abs(i2 / i1 - 2.0) > 0.05);
}

TEST_CASE("reference current is continuous across the triode boundary") {
  // Locate vds with vds == v_dsat(vds) by bisection, then probe both sides.
  const double vgs = kConst.vdd;
  auto excess = [&](double vds) {
    const double ov = vgs - (kRef.v_th0 - kSurr.eta_dibl * vds);
    return vds - kSurr.k_vdsat * std::pow(ov, 0.5 * kConst.alpha);
  };
  double lo = 0.0, hi = kConst.vdd;
  REQUIRE(excess(lo) < 0.0);
  REQUIRE(excess(hi) > 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  const double v_star = 0.5 * (lo + hi);
  const double below = id_reference(kRef, kConst, kSurr, vgs, v_star - 1e-9);
  const double above = id_reference(kRef, kConst, kSurr, vgs, v_star + 1e-9);
  CHECK(below == doctest::Approx(above).epsilon(1e-6));
}

TEST_CASE("reference current is monotone in vds and continuous in vgs") {
  double prev = -1.0;
  for (int k = 0; k <= 120; ++k) {
    const double vds = kConst.vdd * k / 120.0;
    const double i = id_reference(kRef, kConst, kSurr, kConst.vdd, vds);
    CHECK(i >= prev);
    prev = i;
  }
  // No jump at turn-on.
  const double v_th_eff = kRef.v_th0 - kSurr.eta_dibl * kConst.vdd;
  CHECK(id_reference(kRef, kConst, kSurr, v_th_eff + 1e-9, kConst.vdd) < 1e-9);
}

TEST_CASE("both currents increase with gate drive and fall with threshold") {
  double prev_a = -1.0, prev_r = -1.0;
  for (int k = 0; k <= 24; ++k) {
    const double vgs = 1.2 * k / 24.0;
    const double ia = idsat_analytical(kRef, kConst, vgs, 1.2);
    const double ir = id_reference(kRef, kConst, kSurr, vgs, 1.2);
    CHECK(ia >= prev_a);
    CHECK(ir >= prev_r);
    prev_a = ia;
    prev_r = ir;
  }
  DeviceParams high_vth = kRef;
  for (double vth : {0.25, 0.3, 0.35, 0.4}) {
    DeviceParams p = kRef;
    p.v_th0 = vth;
    high_vth.v_th0 = vth + 0.05;
    CHECK(idsat_analytical(p, kConst, 1.2, 1.2) > idsat_analytical(high_vth, kConst, 1.2, 1.2));
    CHECK(idsat_reference(p, kConst, kSurr) > idsat_reference(high_vth, kConst, kSurr));
  }
}

TEST_CASE("reference current reduces to the alpha-power law without surrogate effects") {
  ReferenceModelConfig plain;
  plain.delta_w = 0.0;
  plain.theta = 0.0;
  plain.eta_dibl = 0.0;
  for (double vds : {0.7, 0.9, 1.2}) {
    // All points are in saturation: v_dsat(1.2V gate) ~ 0.52V.
    CHECK(id_reference(kRef, kConst, plain, 1.2, vds) ==
          doctest::Approx(idsat_analytical(kRef, kConst, 1.2, vds)).epsilon(1e-15));
  }
}

TEST_CASE("reference current falls as t_ox grows") {
  DeviceParams thick = kRef;
  double prev = 1e9;
  for (double t : {1.6e-9, 2e-9, 2.5e-9, 3e-9, 3.5e-9}) {
    thick.t_ox = t;
    const double i = idsat_reference(thick, kConst, kSurr);
    CHECK(i < prev);
    prev = i;
  }
}

TEST_CASE("surrogate knob validation") {
  ReferenceModelConfig bad = kSurr;
  bad.delta_w = 2e-6;  // wider than the device
  CHECK_THROWS_AS(idsat_reference(kRef, kConst, bad), DomainError);
  bad = kSurr;
  bad.k_vdsat = 0.0;
  CHECK_THROWS_AS(idsat_reference(kRef, kConst, bad), DomainError);
  PhysicalConstants bad_c = kConst;
  bad_c.alpha = 2.5;
  CHECK_THROWS_AS(idsat_reference(kRef, bad_c, kSurr), DomainError);
}
