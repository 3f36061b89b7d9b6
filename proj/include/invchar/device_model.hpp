#pragma once

namespace invchar {

/// The five swept process/model parameters of the nMOS pull-down device.
/// All values are SI (m, V, m^2/Vs). Defaults are the 90 nm reference
/// point, written as unit products so they are bit-identical to the same
/// numbers entering through a config file.
struct DeviceParams {
  double length = 90 * 1e-9;  // channel length L (m)
  double width = 1 * 1e-6;    // channel width W (m)
  double t_ox = 3 * 1e-9;     // oxide thickness (m)
  double v_th0 = 0.4;         // zero-bias threshold voltage (V)
  double u0 = 550 * 1e-4;     // low-field mobility (m^2/Vs)

  /// Throws DomainError unless all fields are strictly positive and
  /// v_th0 < vdd of the operating point.
  void validate(double vdd) const;
};

/// Fixed physical constants of an operating point.
struct PhysicalConstants {
  double eps0 = 8.854e-12;  // vacuum permittivity (F/m)
  double eps_r = 3.9;       // relative oxide permittivity (SiO2)
  double alpha = 1.3;       // velocity-saturation index, 1 <= alpha <= 2
  double lambda = 0.1;      // channel-length modulation (1/V)
  double vdd = 1.2;         // supply voltage (V)

  void validate() const;
};

/// Second-order-effect knobs of the surrogate reference I-V model that
/// stands in for a full SPICE/BSIM device as the characterization oracle.
struct ReferenceModelConfig {
  double delta_w = 0.05 * 1e-6;  // effective width reduction (m)
  double theta = 0.3;        // mobility degradation (1/V)
  double eta_dibl = 0.05;    // DIBL coefficient
  double k_vdsat = 0.6;      // saturation-voltage scale (V^(1-alpha/2))

  /// Throws DomainError unless the knobs are in range and delta_w < width.
  void validate(double width) const;
};

/// Saturation drain current of the plain alpha-power law:
///   I = 1/2 * (u0*eps0*eps_r/t_ox) * (W/L) * (vgs - v_th0)^alpha * (1 + lambda*vds)
/// Returns 0 at or below threshold. Exactly linear in W and in 1/t_ox.
double idsat_analytical(const DeviceParams& p, const PhysicalConstants& c,
                        double vgs, double vds);

/// Drain current of the surrogate reference model: effective width
/// (W - delta_w), DIBL-shifted threshold, mobility degradation, and a
/// triode/saturation split at V_dsat = k_vdsat*(vgs - v_th_eff)^(alpha/2).
/// Continuous in both biases, nondecreasing in vds, and deliberately
/// nonlinear in W. With delta_w = theta = eta_dibl = 0 and vds >= V_dsat
/// it reduces to idsat_analytical.
double id_reference(const DeviceParams& p, const PhysicalConstants& c,
                    const ReferenceModelConfig& r, double vgs, double vds);

/// id_reference at the saturation corner vgs = vds = vdd; this is the
/// reference point every ratio sweep and delay table is anchored to.
double idsat_reference(const DeviceParams& p, const PhysicalConstants& c,
                       const ReferenceModelConfig& r);

}  // namespace invchar
