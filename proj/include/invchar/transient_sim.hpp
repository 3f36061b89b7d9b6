#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "invchar/device_model.hpp"

namespace invchar {

/// Rising 0 -> vdd input ramp. t_rise == 0 means an ideal step at t_start.
struct InputRamp {
  double t_rise = 10e-12;  // transition time (s); one-shot simulation default
  double t_start = 0.0;    // ramp start (s)

  double value(double t, double vdd) const;
  double t_in50() const { return t_start + 0.5 * t_rise; }
  void validate() const;
};

struct TransientSample {
  double t;      // s
  double v_in;   // V
  double v_out;  // V
  double i_dn;   // discharge (or charge, for the mirrored run) current, A
};

/// One simulated transition. For simulate_discharge the trace falls from
/// vdd to the 50% crossing and t_phl is the fall delay; for
/// simulate_tplh_mirrored the trace rises from 0 and t_phl holds t_pLH.
struct TransientResult {
  std::vector<TransientSample> samples;
  double t_in50 = 0.0;
  double t_out50 = 0.0;
  double t_phl = 0.0;  // t_out50 - t_in50
};

struct SimOptions {
  double dt_max = 1e-13;         // upper bound on the integration step (s)
  double tol = 1e-4;             // relative convergence tolerance on t_phl, in (0, 1e-2]
  long max_steps = 20'000'000;   // per integration pass
  int max_refinements = 22;      // step-halving passes before giving up
};

/// Drain current as a function of (vgs, vds); lets tests swap the device
/// for e.g. a constant current source.
using CurrentFn = std::function<double(double vgs, double vds)>;

/// Integrates C_L * dv_out/dt = -i(v_in(t), v_out) from v_out = vdd down
/// to the 50% crossing with classical RK4, halving the step until t_phl
/// changes by less than opt.tol between refinements. The 50% crossings of
/// input and output are located by linear interpolation.
TransientResult simulate_discharge(const CurrentFn& current, double vdd, double c_load,
                                   const InputRamp& ramp = {}, const SimOptions& opt = {});

TransientResult simulate_discharge(const DeviceParams& p, const PhysicalConstants& c,
                                   const ReferenceModelConfig& r, double c_load,
                                   const InputRamp& ramp = {}, const SimOptions& opt = {});

/// Rise delay under the mirrored-nMOS pMOS assumption: the same device
/// charges C_L from 0 while the input falls, which is the exact mirror
/// image of the discharge problem.
TransientResult simulate_tplh_mirrored(const CurrentFn& current, double vdd, double c_load,
                                       const InputRamp& ramp = {}, const SimOptions& opt = {});

TransientResult simulate_tplh_mirrored(const DeviceParams& p, const PhysicalConstants& c,
                                       const ReferenceModelConfig& r, double c_load,
                                       const InputRamp& ramp = {}, const SimOptions& opt = {});

/// Fall delay under a constant discharge current: C_L * vdd / (2 * idsat).
double tphl_closed_form(double c_load, double vdd, double idsat);

/// Average propagation delay (t_phl + t_plh) / 2.
double average_delay(double t_phl, double t_plh);

/// CSV export, columns: t_s,vin_V,vout_V,idn_A.
void write_transient_csv(const TransientResult& result, std::ostream& os);

}  // namespace invchar
