#include "invchar/current_builder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "invchar/errors.hpp"

namespace invchar {

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::length: return "L";
    case SweepParameter::width: return "W";
    case SweepParameter::t_ox: return "t_ox";
    case SweepParameter::v_th0: return "V_th0";
    case SweepParameter::u0: return "u0";
  }
  throw DomainError("unknown sweep parameter");
}

SweepParameter sweep_parameter_from_string(std::string_view name) {
  for (SweepParameter p : kSweepParameters)
    if (name == to_string(p)) return p;
  throw DomainError("unknown sweep parameter name: " + std::string(name));
}

double get_param(const DeviceParams& p, SweepParameter which) {
  switch (which) {
    case SweepParameter::length: return p.length;
    case SweepParameter::width: return p.width;
    case SweepParameter::t_ox: return p.t_ox;
    case SweepParameter::v_th0: return p.v_th0;
    case SweepParameter::u0: return p.u0;
  }
  throw DomainError("unknown sweep parameter");
}

void set_param(DeviceParams& p, SweepParameter which, double value) {
  switch (which) {
    case SweepParameter::length: p.length = value; return;
    case SweepParameter::width: p.width = value; return;
    case SweepParameter::t_ox: p.t_ox = value; return;
    case SweepParameter::v_th0: p.v_th0 = value; return;
    case SweepParameter::u0: p.u0 = value; return;
  }
  throw DomainError("unknown sweep parameter");
}

namespace {

bool close_rel(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

void SweepSpec::validate_values() const {
  const std::string name(to_string(parameter));
  if (values.empty()) throw DomainError("sweep " + name + ": no values");
  for (double v : values)
    if (!(v > 0.0)) throw DomainError("sweep " + name + ": values must be > 0");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DomainError("sweep " + name + ": values must be distinct");
}

void SweepSpec::validate(double reference_value) const {
  validate_values();
  const std::string name(to_string(parameter));
  if (values.size() < 3) throw DomainError("sweep " + name + ": need at least 3 values");
  bool has_ref = false;
  for (double v : values)
    if (close_rel(v, reference_value)) has_ref = true;
  if (!has_ref)
    throw DomainError("sweep " + name + ": the reference value must be part of the sweep");
}

std::vector<SweepPoint> run_parameter_sweep(const DeviceParams& ref, const PhysicalConstants& c,
                                            const ReferenceModelConfig& r,
                                            const SweepSpec& spec) {
  spec.validate_values();
  std::vector<SweepPoint> out;
  out.reserve(spec.values.size());
  for (double v : spec.values) {
    DeviceParams p = ref;
    set_param(p, spec.parameter, v);
    out.push_back({v, idsat_reference(p, c, r)});
  }
  return out;
}

RatioFit fit_parameter(SweepParameter parameter, std::span<const SweepPoint> sweep_result,
                       double reference_value, double idsat_ref, int degree) {
  if (!(idsat_ref > 0.0)) throw DomainError("ratio fit: idsat_ref must be > 0");
  if (!(reference_value > 0.0)) throw DomainError("ratio fit: reference value must be > 0");
  if (degree < 1) throw DomainError("ratio fit: degree must be >= 1");

  std::vector<std::pair<double, double>> pts;
  pts.reserve(sweep_result.size());
  for (const SweepPoint& sp : sweep_result)
    pts.emplace_back(sp.value / reference_value, sp.idsat / idsat_ref);
  // Canonical ordering makes the fit independent of the sweep order.
  std::sort(pts.begin(), pts.end());

  std::vector<double> xs(pts.size()), ys(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    xs[i] = pts[i].first;
    ys[i] = pts[i].second;
  }

  RatioFit fit;
  fit.parameter = parameter;
  fit.reference_value = reference_value;
  PolyFitResult res = polyfit(xs, ys, degree);
  fit.poly = std::move(res.poly);
  fit.gof = res.gof;
  fit.ratio_min = xs.front();
  fit.ratio_max = xs.back();
  if (!(fit.ratio_min <= 1.0 && fit.ratio_max >= 1.0))
    throw DomainError("ratio fit: ratio domain must contain 1.0");
  return fit;
}

const RatioFit& CurrentModel::fit_for(SweepParameter which) const {
  for (const RatioFit& f : fits)
    if (f.parameter == which) return f;
  throw MissingSweepError("current model: no fit for parameter " +
                          std::string(to_string(which)));
}

CurrentModel build_current_model(const DeviceParams& ref, const PhysicalConstants& c,
                                 const ReferenceModelConfig& r,
                                 std::span<const SweepSpec> sweeps, int degree) {
  CurrentModel m;
  m.reference = ref;
  m.constants = c;
  m.surrogate = r;
  m.fit_degree = degree;

  std::array<const SweepSpec*, 5> by_param{};
  for (const SweepSpec& s : sweeps) {
    auto idx = static_cast<std::size_t>(s.parameter);
    if (idx >= by_param.size()) throw DomainError("build: invalid sweep parameter");
    if (by_param[idx])
      throw MissingSweepError("build: duplicate sweep for parameter " +
                              std::string(to_string(s.parameter)));
    by_param[idx] = &s;
  }
  for (std::size_t i = 0; i < by_param.size(); ++i)
    if (!by_param[i])
      throw MissingSweepError("build: missing sweep for parameter " +
                              std::string(to_string(kSweepParameters[i])));

  m.idsat_ref = idsat_reference(ref, c, r);
  m.sweep_evaluations = 0;
  for (std::size_t i = 0; i < kSweepParameters.size(); ++i) {
    const SweepParameter param = kSweepParameters[i];
    const SweepSpec& spec = *by_param[static_cast<std::size_t>(param)];
    spec.validate(get_param(ref, param));
    const std::vector<SweepPoint> pts = run_parameter_sweep(ref, c, r, spec);
    m.sweep_evaluations += static_cast<int>(pts.size());
    m.fits[i] = fit_parameter(param, pts, get_param(ref, param), m.idsat_ref, degree);
  }
  return m;
}

CurrentEval eval_current_model(const CurrentModel& m, const DeviceParams& p) {
  p.validate(m.constants.vdd);
  CurrentEval out;
  double product = m.idsat_ref;
  for (const RatioFit& f : m.fits) {
    const double ratio = get_param(p, f.parameter) / f.reference_value;
    if (ratio < f.ratio_min || ratio > f.ratio_max) out.extrapolated = true;
    product *= poly_eval(f.poly, ratio);
  }
  if (!(product > 0.0)) {
    char msg[96];
    std::snprintf(msg, sizeof(msg),
                  "current model: non-physical evaluation (%.6g A) under extrapolation", product);
    throw NonPhysicalError(msg);
  }
  out.idsat = product;
  return out;
}

namespace {

nlohmann::ordered_json fit_to_json(const RatioFit& f) {
  return nlohmann::ordered_json{
      {"parameter", to_string(f.parameter)},
      {"reference_value", f.reference_value},
      {"coefficients", f.poly.coeffs},
      {"ratio_domain", {f.ratio_min, f.ratio_max}},
      {"gof", {{"sse", f.gof.sse}, {"rmse", f.gof.rmse}, {"r2", f.gof.r2}}},
  };
}

RatioFit fit_from_json(const nlohmann::ordered_json& j) {
  RatioFit f;
  f.parameter = sweep_parameter_from_string(j.at("parameter").get<std::string>());
  f.reference_value = j.at("reference_value").get<double>();
  j.at("coefficients").get_to(f.poly.coeffs);
  f.ratio_min = j.at("ratio_domain").at(0).get<double>();
  f.ratio_max = j.at("ratio_domain").at(1).get<double>();
  f.gof.sse = j.at("gof").at("sse").get<double>();
  f.gof.rmse = j.at("gof").at("rmse").get<double>();
  f.gof.r2 = j.at("gof").at("r2").get<double>();
  if (f.poly.coeffs.size() < 2) throw IoError("current model: ratio fit must have degree >= 1");
  return f;
}

constexpr const char* kCurrentModelFormat = "invchar.current_model";

}  // namespace

void to_json(nlohmann::ordered_json& j, const CurrentModel& m) {
  nlohmann::ordered_json fits = nlohmann::ordered_json::array();
  for (const RatioFit& f : m.fits) fits.push_back(fit_to_json(f));
  j = nlohmann::ordered_json{
      {"format", kCurrentModelFormat},
      {"version", 1},
      {"constants",
       {{"eps0", m.constants.eps0},
        {"eps_r", m.constants.eps_r},
        {"alpha", m.constants.alpha},
        {"lambda", m.constants.lambda},
        {"vdd", m.constants.vdd}}},
      {"surrogate",
       {{"delta_w", m.surrogate.delta_w},
        {"theta", m.surrogate.theta},
        {"eta_dibl", m.surrogate.eta_dibl},
        {"k_vdsat", m.surrogate.k_vdsat}}},
      {"reference",
       {{"L", m.reference.length},
        {"W", m.reference.width},
        {"t_ox", m.reference.t_ox},
        {"V_th0", m.reference.v_th0},
        {"u0", m.reference.u0}}},
      {"idsat_ref", m.idsat_ref},
      {"fit_degree", m.fit_degree},
      {"sweep_evaluations", m.sweep_evaluations},
      {"fits", std::move(fits)},
  };
}

void from_json(const nlohmann::ordered_json& j, CurrentModel& m) {
  if (j.value("format", "") != kCurrentModelFormat)
    throw IoError("current model: unrecognized file format");
  if (j.value("version", 0) != 1) throw IoError("current model: unsupported version");
  const auto& c = j.at("constants");
  m.constants.eps0 = c.at("eps0").get<double>();
  m.constants.eps_r = c.at("eps_r").get<double>();
  m.constants.alpha = c.at("alpha").get<double>();
  m.constants.lambda = c.at("lambda").get<double>();
  m.constants.vdd = c.at("vdd").get<double>();
  const auto& s = j.at("surrogate");
  m.surrogate.delta_w = s.at("delta_w").get<double>();
  m.surrogate.theta = s.at("theta").get<double>();
  m.surrogate.eta_dibl = s.at("eta_dibl").get<double>();
  m.surrogate.k_vdsat = s.at("k_vdsat").get<double>();
  const auto& r = j.at("reference");
  m.reference.length = r.at("L").get<double>();
  m.reference.width = r.at("W").get<double>();
  m.reference.t_ox = r.at("t_ox").get<double>();
  m.reference.v_th0 = r.at("V_th0").get<double>();
  m.reference.u0 = r.at("u0").get<double>();
  m.idsat_ref = j.at("idsat_ref").get<double>();
  m.fit_degree = j.at("fit_degree").get<int>();
  m.sweep_evaluations = j.at("sweep_evaluations").get<int>();
  const auto& fits = j.at("fits");
  if (fits.size() != 5) throw IoError("current model: expected exactly five ratio fits");
  std::array<bool, 5> seen{};
  for (std::size_t i = 0; i < 5; ++i) {
    RatioFit f = fit_from_json(fits.at(i));
    const auto idx = static_cast<std::size_t>(f.parameter);
    if (seen[idx]) throw IoError("current model: duplicate ratio fit");
    seen[idx] = true;
    m.fits[idx] = std::move(f);
  }
  if (!(m.idsat_ref > 0.0)) throw IoError("current model: idsat_ref must be > 0");
}

std::string current_model_hash(const CurrentModel& m) {
  nlohmann::ordered_json j;
  to_json(j, m);
  const std::string bytes = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void save_current_model(const CurrentModel& m, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  to_json(j, m);
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw IoError("failed to write " + path.string());
}

CurrentModel load_current_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed model file " + path.string() + ": " + e.what());
  }
  CurrentModel m;
  from_json(j, m);
  return m;
}

}  // namespace invchar
