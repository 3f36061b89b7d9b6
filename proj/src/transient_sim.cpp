#include "invchar/transient_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "invchar/errors.hpp"

namespace invchar {

double InputRamp::value(double t, double vdd) const {
  if (t < t_start) return 0.0;
  if (t_rise <= 0.0) return vdd;
  const double s = (t - t_start) / t_rise;
  return s >= 1.0 ? vdd : vdd * s;
}

void InputRamp::validate() const {
  if (!(t_rise >= 0.0)) throw DomainError("ramp: t_rise must be >= 0");
  if (!(t_start >= 0.0)) throw DomainError("ramp: t_start must be >= 0");
}

namespace {

struct TracePass {
  std::vector<TransientSample> samples;
  double t_out50 = 0.0;
};

// One fixed-step RK4 pass from v_out = vdd down to the 50% crossing.
TracePass integrate_pass(const CurrentFn& current, double vdd, double c_load,
                         const InputRamp& ramp, double h, long max_steps) {
  TracePass out;
  const double target = 0.5 * vdd;
  auto drain = [&](double t, double v) { return current(ramp.value(t, vdd), std::max(v, 0.0)); };
  auto deriv = [&](double t, double v) { return -drain(t, v) / c_load; };

  double t = 0.0;
  double v = vdd;
  out.samples.push_back({t, ramp.value(t, vdd), v, drain(t, v)});
  for (long step = 0;; ++step) {
    if (step >= max_steps)
      throw StepLimitError("transient: step budget exhausted before the 50% crossing");
    const double k1 = deriv(t, v);
    const double k2 = deriv(t + 0.5 * h, v + 0.5 * h * k1);
    const double k3 = deriv(t + 0.5 * h, v + 0.5 * h * k2);
    const double k4 = deriv(t + h, v + h * k3);
    const double v_next = v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t_next = t + h;
    out.samples.push_back({t_next, ramp.value(t_next, vdd), v_next, drain(t_next, v_next)});
    if (v_next <= target) {
      out.t_out50 = t + h * (v - target) / (v - v_next);
      return out;
    }
    t = t_next;
    v = v_next;
  }
}

TransientResult simulate_core(const CurrentFn& current, double vdd, double c_load,
                              const InputRamp& ramp, const SimOptions& opt) {
  if (!(vdd > 0.0)) throw DomainError("transient: vdd must be > 0");
  if (!(c_load > 0.0)) throw DomainError("transient: load capacitance must be > 0");
  if (!(opt.tol > 0.0 && opt.tol <= 1e-2)) throw DomainError("transient: tol must be in (0, 1e-2]");
  if (!(opt.dt_max > 0.0)) throw DomainError("transient: dt_max must be > 0");
  ramp.validate();

  const double i_full = current(vdd, vdd);
  if (!(i_full > 0.0))
    throw NonDischargingError("transient: no drain current at full gate drive");

  // Initial step: resolve both the ramp and the expected discharge time.
  double h = std::min(opt.dt_max, c_load * vdd / (2.0 * i_full) / 64.0);
  if (ramp.t_rise > 0.0) h = std::min(h, ramp.t_rise / 16.0);

  TransientResult result;
  result.t_in50 = ramp.t_in50();

  double prev_tphl = 0.0;
  for (int level = 0; level <= opt.max_refinements; ++level, h *= 0.5) {
    TracePass pass = integrate_pass(current, vdd, c_load, ramp, h, opt.max_steps);
    const double tphl = pass.t_out50 - result.t_in50;
    result.samples = std::move(pass.samples);
    result.t_out50 = pass.t_out50;
    result.t_phl = tphl;
    if (level > 0 && std::abs(tphl - prev_tphl) <= opt.tol * std::abs(tphl)) return result;
    prev_tphl = tphl;
  }
  throw StepLimitError("transient: t_phl did not converge within the refinement budget");
}

}  // namespace

TransientResult simulate_discharge(const CurrentFn& current, double vdd, double c_load,
                                   const InputRamp& ramp, const SimOptions& opt) {
  return simulate_core(current, vdd, c_load, ramp, opt);
}

TransientResult simulate_discharge(const DeviceParams& p, const PhysicalConstants& c,
                                   const ReferenceModelConfig& r, double c_load,
                                   const InputRamp& ramp, const SimOptions& opt) {
  p.validate(c.vdd);
  return simulate_core(
      [&](double vgs, double vds) { return id_reference(p, c, r, vgs, vds); },
      c.vdd, c_load, ramp, opt);
}

namespace {

// The charging problem is the mirror image of the discharge problem:
// solve the discharge and reflect both voltages about vdd/2.
TransientResult mirror(TransientResult result, double vdd) {
  for (TransientSample& s : result.samples) {
    s.v_in = vdd - s.v_in;
    s.v_out = vdd - s.v_out;
  }
  return result;
}

}  // namespace

TransientResult simulate_tplh_mirrored(const CurrentFn& current, double vdd, double c_load,
                                       const InputRamp& ramp, const SimOptions& opt) {
  return mirror(simulate_core(current, vdd, c_load, ramp, opt), vdd);
}

TransientResult simulate_tplh_mirrored(const DeviceParams& p, const PhysicalConstants& c,
                                       const ReferenceModelConfig& r, double c_load,
                                       const InputRamp& ramp, const SimOptions& opt) {
  p.validate(c.vdd);
  return mirror(simulate_discharge(p, c, r, c_load, ramp, opt), c.vdd);
}

double tphl_closed_form(double c_load, double vdd, double idsat) {
  if (!(idsat > 0.0)) throw DomainError("closed form: idsat must be > 0");
  if (!(c_load >= 0.0)) throw DomainError("closed form: load capacitance must be >= 0");
  return c_load * vdd / (2.0 * idsat);
}

double average_delay(double t_phl, double t_plh) {
  if (!(t_phl >= 0.0) || !(t_plh >= 0.0)) throw DomainError("average delay: delays must be >= 0");
  return 0.5 * (t_phl + t_plh);
}

void write_transient_csv(const TransientResult& result, std::ostream& os) {
  os << "t_s,vin_V,vout_V,idn_A\n";
  char line[128];
  for (const TransientSample& s : result.samples) {
    std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%.12g\n", s.t, s.v_in, s.v_out, s.i_dn);
    os << line;
  }
}

}  // namespace invchar
