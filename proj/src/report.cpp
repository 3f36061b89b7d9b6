#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>

#include "invchar/errors.hpp"
#include "invchar/harness.hpp"
#include "invchar/units.hpp"

namespace invchar {

namespace {

std::string strfmt(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

std::string delay_tuple_ps(const std::vector<double>& delays) {
  std::string out = "(";
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (i) out += ",";
    out += strfmt("%.1f", delays[i] / units::ps);
  }
  return out + ")";
}

std::string echo_block(const ReportEcho& e) {
  std::string out;
  out += strfmt("config     : %s   seed: %llu\n", e.config_hash.c_str(),
                static_cast<unsigned long long>(e.seed));
  out += strfmt("constants  : alpha=%g lambda=%g/V eps_r=%g vdd=%gV\n", e.constants.alpha,
                e.constants.lambda, e.constants.eps_r, e.constants.vdd);
  out += strfmt("surrogate  : delta_w=%gum theta=%g/V eta_dibl=%g k_vdsat=%g\n",
                e.surrogate.delta_w / units::um, e.surrogate.theta, e.surrogate.eta_dibl,
                e.surrogate.k_vdsat);
  if (e.ramp.t_rise > 0.0)
    out += strfmt("input ramp : t_rise=%gps t_start=%gps\n", e.ramp.t_rise / units::ps,
                  e.ramp.t_start / units::ps);
  else
    out += strfmt("input ramp : ideal step at t=%gps\n", e.ramp.t_start / units::ps);
  out += strfmt("simulator  : dt_max=%gps tol=%g\n", e.sim.dt_max / units::ps, e.sim.tol);
  out += strfmt("model      : %s\n", e.current_model_hash.c_str());
  if (!e.delay_model_hash.empty())
    out += strfmt("delay table: built against %s\n", e.delay_model_hash.c_str());
  return out;
}

nlohmann::ordered_json echo_json(const ReportEcho& e) {
  nlohmann::ordered_json j{
      {"config_hash", e.config_hash},
      {"seed", e.seed},
      {"constants",
       {{"alpha", e.constants.alpha},
        {"lambda", e.constants.lambda},
        {"eps_r", e.constants.eps_r},
        {"eps0", e.constants.eps0},
        {"vdd", e.constants.vdd}}},
      {"surrogate",
       {{"delta_w", e.surrogate.delta_w},
        {"theta", e.surrogate.theta},
        {"eta_dibl", e.surrogate.eta_dibl},
        {"k_vdsat", e.surrogate.k_vdsat}}},
      {"ramp", {{"t_rise", e.ramp.t_rise}, {"t_start", e.ramp.t_start}}},
      {"sim", {{"dt_max", e.sim.dt_max}, {"tol", e.sim.tol}}},
      {"current_model_hash", e.current_model_hash},
  };
  if (!e.delay_model_hash.empty()) j["delay_model_hash"] = e.delay_model_hash;
  return j;
}

nlohmann::ordered_json params_json(const DeviceParams& p) {
  return nlohmann::ordered_json{{"L", p.length},
                                {"W", p.width},
                                {"t_ox", p.t_ox},
                                {"V_th0", p.v_th0},
                                {"u0", p.u0}};
}

std::string params_columns(const DeviceParams& p) {
  return strfmt("%7.2f %6.3f %8.3f %7.3f %7.1f", p.length / units::nm, p.width / units::um,
                p.t_ox / units::nm, p.v_th0, p.u0 / units::cm2_per_vs);
}

constexpr const char* kParamsHeader = "   L_nm   W_um  TOXE_nm  VTH0_V ";
constexpr const char* kParamsHeader2 = "U0_cm2Vs";

}  // namespace

ReportFormat report_format_from_string(std::string_view name) {
  if (name == "text") return ReportFormat::text;
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw DomainError("unknown report format: " + std::string(name));
}

std::string_view to_string(ReportFormat f) {
  switch (f) {
    case ReportFormat::text: return "text";
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
  }
  throw DomainError("unknown report format");
}

std::string render_text(const CurrentValidationReport& r) {
  std::string out;
  out += "saturation-current model validation\n";
  out += "===================================\n";
  out += echo_block(r.echo);
  out += strfmt("factorial  : %zux%zux%zux%zux%zu = %zu combinations\n", r.factorial_dims[0],
                r.factorial_dims[1], r.factorial_dims[2], r.factorial_dims[3],
                r.factorial_dims[4], r.cases.size());
  out += strfmt("avg error  : %.3f%%   max error: %.3f%%   limits: avg<=%g%% max<=%g%%   => %s\n",
                r.avg_error_pct, r.max_error_pct, r.thresholds.current_avg_pct,
                r.thresholds.current_max_pct, r.passed ? "PASS" : "FAIL");
  out += strfmt("\ntestcase subset (%zu of %zu, ascending current):\n",
                r.testcase_indices.size(), r.cases.size());
  out += strfmt(" no %s%s  I_sim_mA  I_model_mA  err_pct\n", kParamsHeader, kParamsHeader2);
  for (std::size_t k = 0; k < r.testcase_indices.size(); ++k) {
    const CurrentValidationCase& c = r.cases[r.testcase_indices[k]];
    out += strfmt("%3zu %s  %8.4f  %10.4f  %7.3f\n", k + 1, params_columns(c.params).c_str(),
                  c.simulated_a / units::mA, c.analytical_a / units::mA, c.error_pct);
  }
  return out;
}

std::string render_csv(const CurrentValidationReport& r) {
  std::string out;
  out += strfmt("# config_hash=%s seed=%llu model=%s avg_error_pct=%.6f max_error_pct=%.6f\n",
                r.echo.config_hash.c_str(), static_cast<unsigned long long>(r.echo.seed),
                r.echo.current_model_hash.c_str(), r.avg_error_pct, r.max_error_pct);
  out += "index,L_nm,W_um,TOXE_nm,VTH0_V,U0_cm2_per_Vs,idsat_sim_A,idsat_model_A,error_pct,"
         "extrapolated,selected\n";
  std::vector<char> selected(r.cases.size(), 0);
  for (std::size_t idx : r.testcase_indices) selected[idx] = 1;
  for (std::size_t i = 0; i < r.cases.size(); ++i) {
    const CurrentValidationCase& c = r.cases[i];
    out += strfmt("%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%.12g,%.12g,%.6f,%d,%d\n", i,
                  c.params.length / units::nm, c.params.width / units::um,
                  c.params.t_ox / units::nm, c.params.v_th0,
                  c.params.u0 / units::cm2_per_vs, c.simulated_a, c.analytical_a, c.error_pct,
                  c.extrapolated ? 1 : 0, selected[i] ? 1 : 0);
  }
  return out;
}

nlohmann::ordered_json to_json_report(const CurrentValidationReport& r) {
  nlohmann::ordered_json cases = nlohmann::ordered_json::array();
  for (const CurrentValidationCase& c : r.cases)
    cases.push_back(nlohmann::ordered_json{{"params", params_json(c.params)},
                                           {"idsat_sim", c.simulated_a},
                                           {"idsat_model", c.analytical_a},
                                           {"error_pct", c.error_pct},
                                           {"extrapolated", c.extrapolated}});
  return nlohmann::ordered_json{
      {"report", "current_validation"},
      {"echo", echo_json(r.echo)},
      {"factorial_dims", r.factorial_dims},
      {"n_cases", r.cases.size()},
      {"avg_error_pct", r.avg_error_pct},
      {"max_error_pct", r.max_error_pct},
      {"limits",
       {{"avg_pct", r.thresholds.current_avg_pct}, {"max_pct", r.thresholds.current_max_pct}}},
      {"passed", r.passed},
      {"testcase_indices", r.testcase_indices},
      {"cases", std::move(cases)},
  };
}

std::string render_text(const DelayValidationReport& r) {
  std::string out;
  out += "delay model validation\n";
  out += "======================\n";
  out += echo_block(r.echo);
  std::string loads = "(";
  for (std::size_t i = 0; i < r.loads.size(); ++i) {
    if (i) loads += ",";
    loads += strfmt("%g", r.loads[i] / units::fF);
  }
  loads += ")fF";
  out += strfmt("eval loads : %s\n", loads.c_str());
  out += strfmt("avg error  : %.3f%%   max error: %.3f%%   limits: avg<=%g%% max<=%g%%   => %s\n",
                r.avg_error_pct, r.max_error_pct, r.thresholds.delay_avg_pct,
                r.thresholds.delay_max_pct, r.passed ? "PASS" : "FAIL");
  out += strfmt("\n no %s%s  simulated_ps%*s  analytical_ps%*s  max_pct  avg_pct\n",
                kParamsHeader, kParamsHeader2, 24, "", 23, "");
  for (const DelayValidationRow& row : r.rows) {
    out += strfmt("%3d %s  %-36s  %-36s  %7.2f  %7.2f%s\n", row.index,
                  params_columns(row.params).c_str(), delay_tuple_ps(row.simulated_s).c_str(),
                  delay_tuple_ps(row.analytical_s).c_str(), row.max_error_pct,
                  row.avg_error_pct, row.extrapolated ? "  [extrapolated]" : "");
  }
  return out;
}

std::string render_csv(const DelayValidationReport& r) {
  std::string out;
  out += strfmt("# config_hash=%s seed=%llu model=%s avg_error_pct=%.6f max_error_pct=%.6f\n",
                r.echo.config_hash.c_str(), static_cast<unsigned long long>(r.echo.seed),
                r.echo.current_model_hash.c_str(), r.avg_error_pct, r.max_error_pct);
  out += "index,L_nm,W_um,TOXE_nm,VTH0_V,U0_cm2_per_Vs,idsat_model_A,load_fF,tphl_sim_s,"
         "tphl_model_s,error_pct,extrapolated\n";
  for (const DelayValidationRow& row : r.rows) {
    for (std::size_t k = 0; k < r.loads.size(); ++k) {
      const double e =
          std::abs(row.analytical_s[k] - row.simulated_s[k]) / row.simulated_s[k] * 100.0;
      out += strfmt("%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.12g,%.10g,%.12g,%.12g,%.6f,%d\n",
                    row.index, row.params.length / units::nm, row.params.width / units::um,
                    row.params.t_ox / units::nm, row.params.v_th0,
                    row.params.u0 / units::cm2_per_vs, row.model_current_a,
                    r.loads[k] / units::fF, row.simulated_s[k], row.analytical_s[k], e,
                    row.extrapolated ? 1 : 0);
    }
  }
  return out;
}

nlohmann::ordered_json to_json_report(const DelayValidationReport& r) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const DelayValidationRow& row : r.rows)
    rows.push_back(nlohmann::ordered_json{{"index", row.index},
                                          {"params", params_json(row.params)},
                                          {"idsat_model", row.model_current_a},
                                          {"tphl_sim", row.simulated_s},
                                          {"tphl_model", row.analytical_s},
                                          {"max_error_pct", row.max_error_pct},
                                          {"avg_error_pct", row.avg_error_pct},
                                          {"extrapolated", row.extrapolated}});
  return nlohmann::ordered_json{
      {"report", "delay_validation"},
      {"echo", echo_json(r.echo)},
      {"loads", r.loads},
      {"avg_error_pct", r.avg_error_pct},
      {"max_error_pct", r.max_error_pct},
      {"limits",
       {{"avg_pct", r.thresholds.delay_avg_pct}, {"max_pct", r.thresholds.delay_max_pct}}},
      {"passed", r.passed},
      {"rows", std::move(rows)},
  };
}

}  // namespace invchar
