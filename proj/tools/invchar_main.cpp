// invchar: CMOS-inverter delay characterization toolkit.
//
// Subcommands:
//   simulate          one transient, prints t_pHL (or t_pLH with --mirrored)
//   sweep             run the configured parameter sweeps, write CSVs
//   fit-current       build the saturation-current model, save as JSON
//   fit-delay         simulate the delay table, save as JSON
//   eval              evaluate the models at given parameters and load
//   validate-current  factorial comparison of model vs reference simulator
//   validate-delay    held-out delay comparison (Table-style report)
//   trace             export I-V curves or a discharge trace as CSV
//
// Global flags: --config <json>, --seed, --out-dir, --format {text,csv,json}.
// Config and CLI units: L/t_ox in nm, W in um, V_th0 in V, u0 in cm^2/Vs,
// loads in fF, times in ps. Validate commands exit with code 2 when an
// error threshold is exceeded.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "invchar/errors.hpp"
#include "invchar/harness.hpp"
#include "invchar/units.hpp"

using namespace invchar;
namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string format = "text";
};

struct DeviceFlags {
  std::optional<double> l_nm, w_um, tox_nm, vth0_v, u0_cm2;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--l-nm", l_nm, "channel length (nm)");
    cmd->add_option("--w-um", w_um, "channel width (um)");
    cmd->add_option("--tox-nm", tox_nm, "oxide thickness (nm)");
    cmd->add_option("--vth0-v", vth0_v, "threshold voltage (V)");
    cmd->add_option("--u0", u0_cm2, "mobility (cm^2/Vs)");
  }

  DeviceParams resolve(const DeviceParams& base) const {
    DeviceParams p = base;
    if (l_nm) p.length = *l_nm * units::nm;
    if (w_um) p.width = *w_um * units::um;
    if (tox_nm) p.t_ox = *tox_nm * units::nm;
    if (vth0_v) p.v_th0 = *vth0_v;
    if (u0_cm2) p.u0 = *u0_cm2 * units::cm2_per_vs;
    return p;
  }
};

ExperimentConfig resolve_config(const GlobalOptions& g) {
  ExperimentConfig cfg =
      g.config_path.empty() ? ExperimentConfig::defaults() : load_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  for (const std::string& note : cfg.lint()) std::cerr << "warning: " << note << "\n";
  return cfg;
}

fs::path ensure_out_dir(const GlobalOptions& g) {
  fs::path dir(g.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << body;
  if (!os) throw IoError("failed to write " + path.string());
  std::cout << "wrote " << path.string() << "\n";
}

CurrentModel obtain_current_model(const ExperimentConfig& cfg, const std::string& model_path,
                                  const fs::path& out_dir) {
  const fs::path path = model_path.empty() ? out_dir / "current_model.json" : fs::path(model_path);
  if (fs::exists(path)) return load_current_model(path);
  std::cout << "building current model (" << path.string() << " not found)\n";
  return build_current_model(cfg.reference, cfg.constants, cfg.surrogate, cfg.sweeps,
                             cfg.fit_degree);
}

int run_simulate(const GlobalOptions& g, const DeviceFlags& dev, double load_ff, double t_rise_ps,
                 double t_start_ps, bool mirrored) {
  const ExperimentConfig cfg = resolve_config(g);
  const DeviceParams p = dev.resolve(cfg.reference);
  const InputRamp ramp{t_rise_ps * units::ps, t_start_ps * units::ps};
  const double c_load = load_ff * units::fF;
  const TransientResult r =
      mirrored ? simulate_tplh_mirrored(p, cfg.constants, cfg.surrogate, c_load, ramp, cfg.sim)
               : simulate_discharge(p, cfg.constants, cfg.surrogate, c_load, ramp, cfg.sim);
  const char* kind = mirrored ? "t_pLH" : "t_pHL";
  if (r.t_phl < 0.0)
    std::cerr << "note: " << kind << " is negative; the input edge (" << t_rise_ps
              << " ps) is slower than the gate, outside the fast-ramp regime\n";
  if (g.format == "json") {
    nlohmann::ordered_json j{{"delay_kind", kind},
                             {"delay_s", r.t_phl},
                             {"delay_ps", r.t_phl / units::ps},
                             {"t_in50_s", r.t_in50},
                             {"t_out50_s", r.t_out50},
                             {"samples", r.samples.size()}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("%s = %.4f ps  (t_in50 = %.4f ps, t_out50 = %.4f ps, %zu samples)\n", kind,
                r.t_phl / units::ps, r.t_in50 / units::ps, r.t_out50 / units::ps,
                r.samples.size());
  }
  return 0;
}

int run_sweep(const GlobalOptions& g, const std::string& parameter) {
  const ExperimentConfig cfg = resolve_config(g);
  const fs::path dir = ensure_out_dir(g);
  for (const SweepSpec& spec : cfg.sweeps) {
    if (parameter != "all" && to_string(spec.parameter) != parameter) continue;
    const auto points = run_parameter_sweep(cfg.reference, cfg.constants, cfg.surrogate, spec);
    std::string csv = "value_si,idsat_A\n";
    char line[64];
    for (const SweepPoint& pt : points) {
      std::snprintf(line, sizeof(line), "%.12g,%.12g\n", pt.value, pt.idsat);
      csv += line;
    }
    std::string name = "sweep_" + std::string(to_string(spec.parameter)) + ".csv";
    write_file(dir / name, csv);
  }
  return 0;
}

int run_fit_current(const GlobalOptions& g) {
  const ExperimentConfig cfg = resolve_config(g);
  const fs::path dir = ensure_out_dir(g);
  const CurrentModel cm = build_current_model(cfg.reference, cfg.constants, cfg.surrogate,
                                              cfg.sweeps, cfg.fit_degree);
  save_current_model(cm, dir / "current_model.json");
  std::cout << "wrote " << (dir / "current_model.json").string() << "\n";
  std::printf("idsat_ref = %.6g A, %d sweep evaluations + 1 reference\n", cm.idsat_ref,
              cm.sweep_evaluations);
  for (const RatioFit& f : cm.fits)
    std::printf("  %-6s degree %d fit over ratio [%.4g, %.4g]: rmse=%.3e r2=%.9f\n",
                std::string(to_string(f.parameter)).c_str(), f.poly.degree(), f.ratio_min,
                f.ratio_max, f.gof.rmse, f.gof.r2);
  return 0;
}

int run_fit_delay(const GlobalOptions& g, const std::string& model_path) {
  const ExperimentConfig cfg = resolve_config(g);
  const fs::path dir = ensure_out_dir(g);
  const CurrentModel cm = obtain_current_model(cfg, model_path, dir);
  const std::vector<DeviceParams> testcases = select_build_testcases(cfg, cm);
  DelayBuildOptions opt;
  opt.ramp = cfg.ramp;
  opt.sim = cfg.sim;
  const DelayModel dm = build_delay_model(cm, testcases, cfg.build_loads, opt);
  save_delay_model(dm, dir / "delay_model.json");
  std::cout << "wrote " << (dir / "delay_model.json").string() << "\n";
  std::printf("delay table: %zu currents x %zu loads = %zu nodes (%d testcases, %d merged)\n",
              dm.surface.xs.size(), dm.surface.ys.size(), dm.surface.zs.size(),
              dm.meta.n_testcases, dm.meta.merged_testcases);
  for (const std::string& w : dm.meta.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int run_eval(const GlobalOptions& g, const DeviceFlags& dev, double load_ff,
             const std::string& current_model_path, const std::string& delay_model_path,
             bool allow_mismatch) {
  const ExperimentConfig cfg = resolve_config(g);
  const fs::path dir = ensure_out_dir(g);
  const CurrentModel cm = obtain_current_model(cfg, current_model_path, dir);
  const DeviceParams p = dev.resolve(cfg.reference);
  const CurrentEval ce = eval_current_model(cm, p);

  std::optional<DelayEval> de;
  const fs::path delay_path =
      delay_model_path.empty() ? dir / "delay_model.json" : fs::path(delay_model_path);
  if (fs::exists(delay_path)) {
    const DelayModel dm = load_delay_model(delay_path);
    de = eval_delay_model(dm, cm, p, load_ff * units::fF, allow_mismatch);
  }

  if (g.format == "json") {
    nlohmann::ordered_json j{{"idsat_A", ce.idsat},
                             {"current_extrapolated", ce.extrapolated}};
    if (de) {
      j["load_fF"] = load_ff;
      j["tphl_s"] = de->t_phl;
      j["tphl_ps"] = de->t_phl / units::ps;
      j["delay_extrapolated"] = de->extrapolated;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("I_DnSat-A = %.6g A%s\n", ce.idsat, ce.extrapolated ? "  [extrapolated]" : "");
    if (de)
      std::printf("t_pHL(%g fF) = %.4f ps%s\n", load_ff, de->t_phl / units::ps,
                  de->extrapolated ? "  [extrapolated]" : "");
    else
      std::printf("(no delay model at %s; run fit-delay first)\n", delay_path.string().c_str());
  }
  return 0;
}

int run_validate_current(const GlobalOptions& g, const std::string& model_path) {
  const ExperimentConfig cfg = resolve_config(g);
  const fs::path dir = ensure_out_dir(g);
  const CurrentModel cm = obtain_current_model(cfg, model_path, dir);
  const CurrentValidationReport r = validate_current(cfg, cm);

  // Reports always come out both human- and machine-readable.
  write_file(dir / "current_validation.txt", render_text(r));
  write_file(dir / "current_validation.csv", render_csv(r));
  write_file(dir / "current_validation.json", to_json_report(r).dump(2) + "\n");
  std::printf("avg error %.3f%% (limit %g%%), max error %.3f%% (limit %g%%): %s\n",
              r.avg_error_pct, r.thresholds.current_avg_pct, r.max_error_pct,
              r.thresholds.current_max_pct, r.passed ? "PASS" : "FAIL");
  return r.passed ? 0 : 2;
}

int run_validate_delay(const GlobalOptions& g, const std::string& current_model_path,
                       const std::string& delay_model_path) {
  const ExperimentConfig cfg = resolve_config(g);
  const fs::path dir = ensure_out_dir(g);
  const CurrentModel cm = obtain_current_model(cfg, current_model_path, dir);

  DelayModel dm;
  const fs::path delay_path =
      delay_model_path.empty() ? dir / "delay_model.json" : fs::path(delay_model_path);
  if (fs::exists(delay_path)) {
    dm = load_delay_model(delay_path);
  } else {
    std::cout << "building delay model (" << delay_path.string() << " not found)\n";
    DelayBuildOptions opt;
    opt.ramp = cfg.ramp;
    opt.sim = cfg.sim;
    dm = build_delay_model(cm, select_build_testcases(cfg, cm), cfg.build_loads, opt);
  }

  const DelayValidationReport r = validate_delay(cfg, cm, dm);
  write_file(dir / "delay_validation.txt", render_text(r));
  write_file(dir / "delay_validation.csv", render_csv(r));
  write_file(dir / "delay_validation.json", to_json_report(r).dump(2) + "\n");
  std::printf("avg error %.3f%% (limit %g%%), max error %.3f%% (limit %g%%): %s\n",
              r.avg_error_pct, r.thresholds.delay_avg_pct, r.max_error_pct,
              r.thresholds.delay_max_pct, r.passed ? "PASS" : "FAIL");
  return r.passed ? 0 : 2;
}

int run_trace(const GlobalOptions& g, const std::string& kind, double load_ff, double t_rise_ps,
              const std::vector<double>& widths_um, int n_points) {
  const ExperimentConfig cfg = resolve_config(g);
  const fs::path dir = ensure_out_dir(g);
  if (kind == "iv" || kind == "iv_curves") {
    std::vector<double> widths;
    for (double w : widths_um) widths.push_back(w * units::um);
    std::ostringstream os;
    export_iv_curves(cfg, widths, n_points, os);
    write_file(dir / "iv_curves.csv", os.str());
  } else if (kind == "discharge") {
    const InputRamp ramp{t_rise_ps * units::ps, 0.0};
    std::ostringstream os;
    export_discharge_trace(cfg, load_ff * units::fF, ramp, os);
    write_file(dir / "discharge_trace.csv", os.str());
  } else {
    throw DomainError("trace: unknown kind '" + kind + "' (use iv or discharge)");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CMOS-inverter delay characterization toolkit"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "experiment config (JSON)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "override the config seed");
  app.add_option("--out-dir", g.out_dir, "output directory (default .)");
  app.add_option("--format", g.format,
                 "stdout format for simulate/eval: text or json "
                 "(validation reports are always written as .txt, .csv and .json)")
      ->check(CLI::IsMember({"text", "csv", "json"}));

  auto* sim = app.add_subcommand("simulate", "run one transient and print the delay");
  DeviceFlags sim_dev;
  sim_dev.add_to(sim);
  double sim_load_ff = 10.0, sim_trise_ps = 10.0, sim_tstart_ps = 0.0;
  bool sim_mirrored = false;
  sim->add_option("--load-ff", sim_load_ff, "load capacitance (fF)");
  sim->add_option("--t-rise-ps", sim_trise_ps, "input transition time (ps), 0 = ideal step");
  sim->add_option("--t-start-ps", sim_tstart_ps, "ramp start time (ps)");
  sim->add_flag("--mirrored", sim_mirrored, "charge direction: report t_pLH instead");

  auto* sweep = app.add_subcommand("sweep", "run configured parameter sweeps, write CSV");
  std::string sweep_param = "all";
  sweep->add_option("--parameter", sweep_param, "L, W, t_ox, V_th0, u0 or all");

  auto* fitc = app.add_subcommand("fit-current", "build and save the current model");

  auto* fitd = app.add_subcommand("fit-delay", "simulate and save the delay table");
  std::string fitd_model;
  fitd->add_option("--current-model", fitd_model, "current model file (default out-dir)");

  auto* eval = app.add_subcommand("eval", "evaluate the models at given parameters");
  DeviceFlags eval_dev;
  eval_dev.add_to(eval);
  double eval_load_ff = 10.0;
  std::string eval_cm, eval_dm;
  bool eval_allow = false;
  eval->add_option("--load-ff", eval_load_ff, "load capacitance (fF)");
  eval->add_option("--current-model", eval_cm, "current model file");
  eval->add_option("--delay-model", eval_dm, "delay model file");
  eval->add_flag("--allow-model-mismatch", eval_allow,
                 "evaluate even if the delay table was built against another model");

  auto* valc = app.add_subcommand("validate-current", "factorial model-vs-simulator check");
  std::string valc_model;
  valc->add_option("--current-model", valc_model, "current model file");

  auto* vald = app.add_subcommand("validate-delay", "held-out delay check");
  std::string vald_cm, vald_dm;
  vald->add_option("--current-model", vald_cm, "current model file");
  vald->add_option("--delay-model", vald_dm, "delay model file");

  auto* trace = app.add_subcommand("trace", "export I-V curves or a discharge trace");
  std::string trace_kind = "discharge";
  double trace_load_ff = 10.0, trace_trise_ps = 10.0;
  int trace_points = 121;
  std::vector<double> trace_widths{1, 2, 3, 4, 5};
  trace->add_option("--kind", trace_kind, "iv or discharge");
  trace->add_option("--load-ff", trace_load_ff, "load capacitance (fF)");
  trace->add_option("--t-rise-ps", trace_trise_ps, "input transition time (ps)");
  trace->add_option("--widths-um", trace_widths, "widths for iv curves (um)");
  trace->add_option("--points", trace_points, "bias points per iv curve");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim)
      return run_simulate(g, sim_dev, sim_load_ff, sim_trise_ps, sim_tstart_ps, sim_mirrored);
    if (*sweep) return run_sweep(g, sweep_param);
    if (*fitc) return run_fit_current(g);
    if (*fitd) return run_fit_delay(g, fitd_model);
    if (*eval) return run_eval(g, eval_dev, eval_load_ff, eval_cm, eval_dm, eval_allow);
    if (*valc) return run_validate_current(g, valc_model);
    if (*vald) return run_validate_delay(g, vald_cm, vald_dm);
    if (*trace)
      return run_trace(g, trace_kind, trace_load_ff, trace_trise_ps, trace_widths, trace_points);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
