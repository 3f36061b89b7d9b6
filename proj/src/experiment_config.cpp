#include "invchar/experiment_config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "invchar/errors.hpp"
#include "invchar/units.hpp"

namespace invchar {

namespace {

std::vector<double> scaled(std::vector<double> v, double factor) {
  for (double& x : v) x *= factor;
  return v;
}

// Exact inverse of scaled() for the values users type (see config docs):
// (v * unit) / unit == v for them, a reciprocal multiply is not.
std::vector<double> in_units(std::vector<double> v, double unit) {
  for (double& x : v) x /= unit;
  return v;
}

// Config-file unit per parameter (display and parse side).
double config_unit(SweepParameter p) {
  switch (p) {
    case SweepParameter::length: return units::nm;
    case SweepParameter::t_ox: return units::nm;
    case SweepParameter::width: return units::um;
    case SweepParameter::v_th0: return 1.0;
    case SweepParameter::u0: return units::cm2_per_vs;
  }
  throw DomainError("unknown sweep parameter");
}

const char* config_key(SweepParameter p) {
  switch (p) {
    case SweepParameter::length: return "L_nm";
    case SweepParameter::width: return "W_um";
    case SweepParameter::t_ox: return "TOXE_nm";
    case SweepParameter::v_th0: return "VTH0_V";
    case SweepParameter::u0: return "U0_cm2_per_Vs";
  }
  throw DomainError("unknown sweep parameter");
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.sweeps = {
      {SweepParameter::length, scaled({90, 88, 86, 84, 82}, units::nm)},
      {SweepParameter::width, scaled({1, 2, 3, 4, 5}, units::um)},
      {SweepParameter::t_ox, scaled({3, 2.5, 2, 1.6}, units::nm)},
      {SweepParameter::v_th0, {0.4, 0.35, 0.3, 0.25}},
      {SweepParameter::u0, scaled({550, 540, 530, 520}, units::cm2_per_vs)},
  };
  cfg.build_loads = scaled({10, 20, 50, 100, 200}, units::fF);
  cfg.eval_loads = scaled({13, 37, 83, 123, 185}, units::fF);
  return cfg;
}

void ExperimentConfig::validate() const {
  reference.validate(constants.vdd);
  constants.validate();
  surrogate.validate(reference.width);
  if (sweeps.size() != 5) throw DomainError("config: exactly five sweeps are required");
  std::array<bool, 5> seen{};
  for (const SweepSpec& s : sweeps) {
    const auto idx = static_cast<std::size_t>(s.parameter);
    if (seen[idx]) throw DomainError("config: duplicate sweep parameter");
    seen[idx] = true;
    s.validate(get_param(reference, s.parameter));
    if (s.parameter == SweepParameter::width)
      for (double w : s.values) surrogate.validate(w);
    if (s.parameter == SweepParameter::v_th0)
      for (double v : s.values)
        if (!(v < constants.vdd))
          throw DomainError("config: swept threshold voltage must stay below vdd");
  }
  auto check_loads = [](const std::vector<double>& loads, const char* name) {
    if (loads.empty()) throw DomainError(std::string("config: ") + name + " must be nonempty");
    for (double c : loads)
      if (!(c > 0.0)) throw DomainError(std::string("config: ") + name + " must be > 0");
    std::vector<double> sorted(loads);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw DomainError(std::string("config: ") + name + " must be distinct");
  };
  check_loads(build_loads, "build loads");
  check_loads(eval_loads, "eval loads");
  if (build_loads.size() < 2) throw DomainError("config: need at least 2 build loads");
  if (n_build_testcases < 2) throw DomainError("config: need at least 2 build testcases");
  if (n_delay_eval_combos < 1) throw DomainError("config: need at least 1 eval combination");
  if (fit_degree < 1) throw DomainError("config: fit degree must be >= 1");
  ramp.validate();
  if (!(sim.tol > 0.0 && sim.tol <= 1e-2)) throw DomainError("config: sim tol out of range");
  if (!(sim.dt_max > 0.0)) throw DomainError("config: sim dt_max must be > 0");
}

std::vector<std::string> ExperimentConfig::lint() const {
  std::vector<std::string> notes;
  const double lo = *std::min_element(build_loads.begin(), build_loads.end());
  const double hi = *std::max_element(build_loads.begin(), build_loads.end());
  for (double c : eval_loads) {
    if (c < lo || c > hi) {
      char msg[96];
      std::snprintf(msg, sizeof(msg),
                    "eval load %.6g F is outside the build-load hull [%.6g, %.6g] F", c, lo, hi);
      notes.emplace_back(msg);
    }
  }
  std::size_t factorial = 1;
  for (const SweepSpec& s : sweeps) factorial *= s.values.size();
  if (static_cast<std::size_t>(n_build_testcases) > factorial)
    notes.emplace_back("more build testcases requested than factorial combinations exist");
  return notes;
}

void to_json(nlohmann::ordered_json& j, const ExperimentConfig& cfg) {
  nlohmann::ordered_json sweeps;
  for (SweepParameter p : kSweepParameters) {
    for (const SweepSpec& s : cfg.sweeps) {
      if (s.parameter != p) continue;
      nlohmann::ordered_json values = nlohmann::ordered_json::array();
      for (double v : s.values) values.push_back(v / config_unit(p));
      sweeps[config_key(p)] = std::move(values);
    }
  }
  j = nlohmann::ordered_json{
      {"reference",
       {{"L_nm", cfg.reference.length / units::nm},
        {"W_um", cfg.reference.width / units::um},
        {"TOXE_nm", cfg.reference.t_ox / units::nm},
        {"VTH0_V", cfg.reference.v_th0},
        {"U0_cm2_per_Vs", cfg.reference.u0 / units::cm2_per_vs}}},
      {"constants",
       {{"eps_r", cfg.constants.eps_r},
        {"alpha", cfg.constants.alpha},
        {"lambda_per_V", cfg.constants.lambda},
        {"VDD_V", cfg.constants.vdd}}},
      {"surrogate",
       {{"delta_W_um", cfg.surrogate.delta_w / units::um},
        {"theta_per_V", cfg.surrogate.theta},
        {"eta_dibl", cfg.surrogate.eta_dibl},
        {"k_vdsat", cfg.surrogate.k_vdsat}}},
      {"sweeps", std::move(sweeps)},
      {"loads",
       {{"build_fF", in_units(cfg.build_loads, units::fF)},
        {"eval_fF", in_units(cfg.eval_loads, units::fF)}}},
      {"validation",
       {{"n_build_testcases", cfg.n_build_testcases},
        {"n_delay_eval_combos", cfg.n_delay_eval_combos},
        {"current_avg_limit_pct", cfg.thresholds.current_avg_pct},
        {"current_max_limit_pct", cfg.thresholds.current_max_pct},
        {"delay_avg_limit_pct", cfg.thresholds.delay_avg_pct},
        {"delay_max_limit_pct", cfg.thresholds.delay_max_pct}}},
      {"simulation",
       {{"t_rise_ps", cfg.ramp.t_rise / units::ps},
        {"t_start_ps", cfg.ramp.t_start / units::ps},
        {"dt_max_ps", cfg.sim.dt_max / units::ps},
        {"tol", cfg.sim.tol}}},
      {"fit_degree", cfg.fit_degree},
      {"seed", cfg.seed},
  };
}

void from_json(const nlohmann::ordered_json& j, ExperimentConfig& cfg) {
  cfg = ExperimentConfig::defaults();
  if (j.contains("reference")) {
    const auto& r = j.at("reference");
    if (r.contains("L_nm")) cfg.reference.length = r.at("L_nm").get<double>() * units::nm;
    if (r.contains("W_um")) cfg.reference.width = r.at("W_um").get<double>() * units::um;
    if (r.contains("TOXE_nm")) cfg.reference.t_ox = r.at("TOXE_nm").get<double>() * units::nm;
    if (r.contains("VTH0_V")) cfg.reference.v_th0 = r.at("VTH0_V").get<double>();
    if (r.contains("U0_cm2_per_Vs"))
      cfg.reference.u0 = r.at("U0_cm2_per_Vs").get<double>() * units::cm2_per_vs;
  }
  if (j.contains("constants")) {
    const auto& c = j.at("constants");
    if (c.contains("eps_r")) cfg.constants.eps_r = c.at("eps_r").get<double>();
    if (c.contains("alpha")) cfg.constants.alpha = c.at("alpha").get<double>();
    if (c.contains("lambda_per_V")) cfg.constants.lambda = c.at("lambda_per_V").get<double>();
    if (c.contains("VDD_V")) cfg.constants.vdd = c.at("VDD_V").get<double>();
  }
  if (j.contains("surrogate")) {
    const auto& s = j.at("surrogate");
    if (s.contains("delta_W_um")) cfg.surrogate.delta_w = s.at("delta_W_um").get<double>() * units::um;
    if (s.contains("theta_per_V")) cfg.surrogate.theta = s.at("theta_per_V").get<double>();
    if (s.contains("eta_dibl")) cfg.surrogate.eta_dibl = s.at("eta_dibl").get<double>();
    if (s.contains("k_vdsat")) cfg.surrogate.k_vdsat = s.at("k_vdsat").get<double>();
  }
  if (j.contains("sweeps")) {
    const auto& sw = j.at("sweeps");
    for (SweepParameter p : kSweepParameters) {
      if (!sw.contains(config_key(p))) continue;
      std::vector<double> values = sw.at(config_key(p)).get<std::vector<double>>();
      for (double& v : values) v *= config_unit(p);
      for (SweepSpec& s : cfg.sweeps)
        if (s.parameter == p) s.values = std::move(values);
    }
  }
  if (j.contains("loads")) {
    const auto& l = j.at("loads");
    if (l.contains("build_fF"))
      cfg.build_loads = scaled(l.at("build_fF").get<std::vector<double>>(), units::fF);
    if (l.contains("eval_fF"))
      cfg.eval_loads = scaled(l.at("eval_fF").get<std::vector<double>>(), units::fF);
  }
  if (j.contains("validation")) {
    const auto& v = j.at("validation");
    if (v.contains("n_build_testcases")) cfg.n_build_testcases = v.at("n_build_testcases").get<int>();
    if (v.contains("n_delay_eval_combos"))
      cfg.n_delay_eval_combos = v.at("n_delay_eval_combos").get<int>();
    if (v.contains("current_avg_limit_pct"))
      cfg.thresholds.current_avg_pct = v.at("current_avg_limit_pct").get<double>();
    if (v.contains("current_max_limit_pct"))
      cfg.thresholds.current_max_pct = v.at("current_max_limit_pct").get<double>();
    if (v.contains("delay_avg_limit_pct"))
      cfg.thresholds.delay_avg_pct = v.at("delay_avg_limit_pct").get<double>();
    if (v.contains("delay_max_limit_pct"))
      cfg.thresholds.delay_max_pct = v.at("delay_max_limit_pct").get<double>();
  }
  if (j.contains("simulation")) {
    const auto& s = j.at("simulation");
    if (s.contains("t_rise_ps")) cfg.ramp.t_rise = s.at("t_rise_ps").get<double>() * units::ps;
    if (s.contains("t_start_ps")) cfg.ramp.t_start = s.at("t_start_ps").get<double>() * units::ps;
    if (s.contains("dt_max_ps")) cfg.sim.dt_max = s.at("dt_max_ps").get<double>() * units::ps;
    if (s.contains("tol")) cfg.sim.tol = s.at("tol").get<double>();
  }
  if (j.contains("fit_degree")) cfg.fit_degree = j.at("fit_degree").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.validate();
}

std::string ExperimentConfig::hash() const {
  nlohmann::ordered_json j;
  to_json(j, *this);
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

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(is, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed config " + path.string() + ": " + e.what());
  }
  ExperimentConfig cfg;
  from_json(j, cfg);
  return cfg;
}

void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  to_json(j, cfg);
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw IoError("failed to write " + path.string());
}

}  // namespace invchar
