#include "invchar/device_model.hpp"

#include <cmath>

#include "invchar/errors.hpp"

namespace invchar {

void DeviceParams::validate(double vdd) const {
  if (!(length > 0.0)) throw DomainError("device: channel length must be > 0");
  if (!(width > 0.0)) throw DomainError("device: channel width must be > 0");
  if (!(t_ox > 0.0)) throw DomainError("device: oxide thickness must be > 0");
  if (!(v_th0 > 0.0)) throw DomainError("device: threshold voltage must be > 0");
  if (!(u0 > 0.0)) throw DomainError("device: mobility must be > 0");
  if (!(v_th0 < vdd)) throw DomainError("device: threshold voltage must be below vdd");
}

void PhysicalConstants::validate() const {
  if (!(eps0 > 0.0) || !(eps_r > 0.0)) throw DomainError("constants: permittivity must be > 0");
  if (!(alpha >= 1.0 && alpha <= 2.0))
    throw DomainError("constants: velocity-saturation index must be in [1, 2]");
  if (!(lambda >= 0.0)) throw DomainError("constants: lambda must be >= 0");
  if (!(vdd > 0.0)) throw DomainError("constants: vdd must be > 0");
}

void ReferenceModelConfig::validate(double width) const {
  if (!(delta_w < width)) throw DomainError("surrogate: delta_w must be below the device width");
  if (!(theta >= 0.0)) throw DomainError("surrogate: theta must be >= 0");
  if (!(eta_dibl >= 0.0)) throw DomainError("surrogate: eta_dibl must be >= 0");
  if (!(k_vdsat > 0.0)) throw DomainError("surrogate: k_vdsat must be > 0");
}

namespace {

void check_bias(double vgs, double vds) {
  if (!(vgs >= 0.0) || !(vds >= 0.0)) throw DomainError("device: bias voltages must be >= 0");
}

}  // namespace

double idsat_analytical(const DeviceParams& p, const PhysicalConstants& c,
                        double vgs, double vds) {
  p.validate(c.vdd);
  c.validate();
  check_bias(vgs, vds);
  if (vgs <= p.v_th0) return 0.0;
  const double c_ox = c.eps0 * c.eps_r / p.t_ox;
  return 0.5 * p.u0 * c_ox * (p.width / p.length) *
         std::pow(vgs - p.v_th0, c.alpha) * (1.0 + c.lambda * vds);
}

double id_reference(const DeviceParams& p, const PhysicalConstants& c,
                    const ReferenceModelConfig& r, double vgs, double vds) {
  p.validate(c.vdd);
  c.validate();
  r.validate(p.width);
  check_bias(vgs, vds);

  const double w_eff = p.width - r.delta_w;
  const double v_th_eff = p.v_th0 - r.eta_dibl * vds;
  if (vgs <= v_th_eff) return 0.0;

  const double overdrive = vgs - v_th_eff;
  const double u_eff = p.u0 / (1.0 + r.theta * overdrive);
  const double v_dsat = r.k_vdsat * std::pow(overdrive, 0.5 * c.alpha);
  const double c_ox = c.eps0 * c.eps_r / p.t_ox;
  const double i_sat = 0.5 * u_eff * c_ox * (w_eff / p.length) *
                       std::pow(overdrive, c.alpha) * (1.0 + c.lambda * vds);
  if (vds >= v_dsat) return i_sat;
  // Parabolic triode region, continuous at vds == v_dsat.
  const double x = vds / v_dsat;
  return i_sat * x * (2.0 - x);
}

double idsat_reference(const DeviceParams& p, const PhysicalConstants& c,
                       const ReferenceModelConfig& r) {
  return id_reference(p, c, r, c.vdd, c.vdd);
}

}  // namespace invchar
