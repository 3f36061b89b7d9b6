#include "doctest.h"

#include <cmath>
#include <sstream>

#include "invchar/device_model.hpp"
#include "invchar/errors.hpp"
#include "invchar/transient_sim.hpp"
#include "oracles.hpp"

using namespace invchar;

namespace {

const DeviceParams kRef{};
const PhysicalConstants kConst{};
const ReferenceModelConfig kSurr{};
const InputRamp kStep{0.0, 0.0};

// Euler oracle value (1 fs steps) for the reference device, ideal step,
// C_L = 10 fF; frozen before the integrator was written.
constexpr double kEulerTphl10fF = 2.572020064625135e-12;

CurrentFn device_current() {
  return [](double vgs, double vds) { return id_reference(DeviceParams{}, PhysicalConstants{},
                                                          ReferenceModelConfig{}, vgs, vds); };
}

}  // namespace

TEST_CASE("constant current source discharges in C*V/(2I)") {
  const double i0 = 100e-6;
  CurrentFn constant = [=](double, double) { return i0; };
  for (double c_load : {1e-15, 10e-15, 100e-15, 500e-15}) {
    const TransientResult r = simulate_discharge(constant, 1.2, c_load, kStep);
    const double expected = tphl_closed_form(c_load, 1.2, i0);
    CHECK(r.t_phl == doctest::Approx(expected).epsilon(2e-3));
  }
}

TEST_CASE("doubling the load doubles the fall delay") {
  SimOptions opt;
  const TransientResult a = simulate_discharge(kRef, kConst, kSurr, 10e-15, kStep, opt);
  const TransientResult b = simulate_discharge(kRef, kConst, kSurr, 20e-15, kStep, opt);
  CHECK(b.t_phl == doctest::Approx(2.0 * a.t_phl).epsilon(2.0 * opt.tol));
}

TEST_CASE("RK4 result matches the brute-force Euler oracle") {
  const TransientResult r = simulate_discharge(kRef, kConst, kSurr, 10e-15, kStep);
  CHECK(r.t_phl == doctest::Approx(kEulerTphl10fF).epsilon(5e-3));

  const double live = oracles::euler_tphl(
      [](double vgs, double vds) {
        return id_reference(DeviceParams{}, PhysicalConstants{}, ReferenceModelConfig{}, vgs, vds);
      },
      1.2, 10e-15, 0.0, 0.0);
  CHECK(live == doctest::Approx(kEulerTphl10fF).epsilon(1e-9));
  CHECK(r.t_phl == doctest::Approx(live).epsilon(5e-3));
}

TEST_CASE("closed-form fall delay") {
  CHECK(tphl_closed_form(0.0, 1.2, 1e-4) == 0.0);
  CHECK(tphl_closed_form(10e-15, 1.2, 100e-6) == doctest::Approx(60e-12).epsilon(1e-15));
  CHECK(tphl_closed_form(10e-15, 1.2, 50e-6) ==
        doctest::Approx(2.0 * tphl_closed_form(10e-15, 1.2, 100e-6)).epsilon(1e-15));
  CHECK_THROWS_AS(tphl_closed_form(10e-15, 1.2, 0.0), DomainError);
  CHECK_THROWS_AS(tphl_closed_form(-1e-15, 1.2, 1e-4), DomainError);
}

TEST_CASE("average delay") {
  CHECK(average_delay(10e-12, 10e-12) == 10e-12);
  CHECK(average_delay(0.0, 8e-12) == 4e-12);
  CHECK(average_delay(13.4e-12, 13.4e-12) == doctest::Approx(13.4e-12).epsilon(1e-15));
  CHECK_THROWS_AS(average_delay(-1e-12, 1e-12), DomainError);
}

TEST_CASE("mirrored rise delay equals the mirrored discharge") {
  const TransientResult fall = simulate_discharge(kRef, kConst, kSurr, 20e-15, kStep);
  const TransientResult rise = simulate_tplh_mirrored(kRef, kConst, kSurr, 20e-15, kStep);
  CHECK(rise.t_phl == fall.t_phl);
  CHECK(rise.t_out50 == fall.t_out50);
  REQUIRE(rise.samples.size() == fall.samples.size());
  // Trace rises from 0 and ends at/above vdd/2.
  CHECK(rise.samples.front().v_out == doctest::Approx(0.0));
  CHECK(rise.samples.back().v_out >= 0.5 * kConst.vdd);
  for (std::size_t i = 1; i < rise.samples.size(); ++i)
    CHECK(rise.samples[i].v_out >= rise.samples[i - 1].v_out);

  CurrentFn constant = [](double, double) { return 2e-4; };
  const TransientResult hook = simulate_tplh_mirrored(constant, 1.2, 50e-15);
  CHECK(hook.t_phl == doctest::Approx(tphl_closed_form(50e-15, 1.2, 2e-4)).epsilon(2e-3));
}

TEST_CASE("fall delay grows strictly with load") {
  double prev = 0.0;
  for (double c_load : {10e-15, 20e-15, 50e-15, 100e-15, 200e-15}) {
    const double t = simulate_discharge(kRef, kConst, kSurr, c_load, kStep).t_phl;
    CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("step-input delay stays within 10% of the saturation closed form") {
  const double idsat = idsat_reference(kRef, kConst, kSurr);
  for (double c_load : {50e-15, 100e-15, 200e-15}) {
    const double sim = simulate_discharge(kRef, kConst, kSurr, c_load, kStep).t_phl;
    const double cf = tphl_closed_form(c_load, kConst.vdd, idsat);
    CHECK(std::abs(sim - cf) / sim < 0.10);
  }
}

TEST_CASE("halving dt_max moves t_phl by less than tol") {
  SimOptions coarse;
  SimOptions fine = coarse;
  fine.dt_max = 0.5 * coarse.dt_max;
  const double a = simulate_discharge(kRef, kConst, kSurr, 50e-15, kStep, coarse).t_phl;
  const double b = simulate_discharge(kRef, kConst, kSurr, 50e-15, kStep, fine).t_phl;
  CHECK(std::abs(a - b) <= coarse.tol * a);
}

TEST_CASE("trace bookkeeping: ordering, crossing, charge balance") {
  for (const InputRamp& ramp : {kStep, InputRamp{10e-12, 0.0}}) {
    const TransientResult r = simulate_discharge(kRef, kConst, kSurr, 10e-15, ramp);
    REQUIRE(r.samples.size() >= 2);
    for (std::size_t i = 1; i < r.samples.size(); ++i) {
      CHECK(r.samples[i].t > r.samples[i - 1].t);
      CHECK(r.samples[i].v_out <= r.samples[i - 1].v_out);
    }
    const double half = 0.5 * kConst.vdd;
    CHECK(r.samples.back().v_out <= half);
    CHECK(r.samples[r.samples.size() - 2].v_out > half);
    CHECK(r.t_in50 == ramp.t_start + 0.5 * ramp.t_rise);
    CHECK(r.t_phl == r.t_out50 - r.t_in50);
    CHECK(r.t_phl > 0.0);

    // Charge pulled through the device equals the charge lost by the load.
    const double q_trace = oracles::trapezoid_charge(r.samples);
    const double q_cap = 10e-15 * (r.samples.front().v_out - r.samples.back().v_out);
    CHECK(q_trace == doctest::Approx(q_cap).epsilon(0.01));
  }
}

TEST_CASE("discharge error paths") {
  CurrentFn dead = [](double, double) { return 0.0; };
  CHECK_THROWS_AS(simulate_discharge(dead, 1.2, 10e-15, kStep), NonDischargingError);

  SimOptions starved;
  starved.max_steps = 3;
  CHECK_THROWS_AS(simulate_discharge(kRef, kConst, kSurr, 10e-15, kStep, starved),
                  StepLimitError);

  SimOptions bad_tol;
  bad_tol.tol = 0.5;
  CHECK_THROWS_AS(simulate_discharge(kRef, kConst, kSurr, 10e-15, kStep, bad_tol), DomainError);
  CHECK_THROWS_AS(simulate_discharge(kRef, kConst, kSurr, 0.0, kStep), DomainError);
  CHECK_THROWS_AS(simulate_discharge(device_current(), 1.2, 10e-15, InputRamp{-1e-12, 0.0}),
                  DomainError);
}

TEST_CASE("transient CSV export") {
  const TransientResult r = simulate_discharge(kRef, kConst, kSurr, 10e-15, kStep);
  std::ostringstream os;
  write_transient_csv(r, os);
  const std::string csv = os.str();
  CHECK(csv.rfind("t_s,vin_V,vout_V,idn_A\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == r.samples.size() + 1);
}
