#include "invchar/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "invchar/errors.hpp"

namespace invchar {

std::array<ParamRange, 5> sweep_ranges(const ExperimentConfig& cfg) {
  std::array<ParamRange, 5> out{};
  for (const SweepSpec& s : cfg.sweeps) {
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    out[static_cast<std::size_t>(s.parameter)] = {*lo, *hi};
  }
  return out;
}

namespace {

const SweepSpec& sweep_for(const ExperimentConfig& cfg, SweepParameter p) {
  for (const SweepSpec& s : cfg.sweeps)
    if (s.parameter == p) return s;
  throw MissingSweepError("config: missing sweep for parameter " + std::string(to_string(p)));
}

}  // namespace

std::vector<DeviceParams> factorial_combinations(const ExperimentConfig& cfg) {
  const SweepSpec& ls = sweep_for(cfg, SweepParameter::length);
  const SweepSpec& ws = sweep_for(cfg, SweepParameter::width);
  const SweepSpec& ts = sweep_for(cfg, SweepParameter::t_ox);
  const SweepSpec& vs = sweep_for(cfg, SweepParameter::v_th0);
  const SweepSpec& us = sweep_for(cfg, SweepParameter::u0);
  std::vector<DeviceParams> out;
  out.reserve(ls.values.size() * ws.values.size() * ts.values.size() * vs.values.size() *
              us.values.size());
  for (double l : ls.values)
    for (double w : ws.values)
      for (double t : ts.values)
        for (double v : vs.values)
          for (double u : us.values) out.push_back({l, w, t, v, u});
  return out;
}

std::vector<DeviceParams> random_params(const std::array<ParamRange, 5>& ranges, int n,
                                        Rng& rng) {
  if (n < 1) throw DomainError("random_params: n must be >= 1");
  std::vector<DeviceParams> out(static_cast<std::size_t>(n));
  for (DeviceParams& p : out)
    for (SweepParameter which : kSweepParameters) {
      const ParamRange& r = ranges[static_cast<std::size_t>(which)];
      set_param(p, which, rng.uniform(r.lo, r.hi));
    }
  return out;
}

std::vector<std::size_t> select_testcase_indices(const ExperimentConfig& cfg,
                                                 const CurrentModel& cm,
                                                 std::span<const DeviceParams> factorial) {
  const std::size_t n = static_cast<std::size_t>(cfg.n_build_testcases);
  if (n > factorial.size())
    throw DomainError("testcase selection: more testcases requested than combinations exist");

  std::vector<std::size_t> order(factorial.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> currents(factorial.size());
  for (std::size_t i = 0; i < factorial.size(); ++i)
    currents[i] = eval_current_model(cm, factorial[i]).idsat;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return currents[a] != currents[b] ? currents[a] < currents[b] : a < b;
  });

  // One draw per current stratum keeps the table's current axis covering
  // the factorial's full span while staying a seeded random subset.
  Rng rng(cfg.seed, kTestcaseSelectionStream);
  std::vector<std::size_t> picks;
  picks.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t begin = s * factorial.size() / n;
    const std::size_t end = (s + 1) * factorial.size() / n;
    picks.push_back(order[begin + rng.below(end - begin)]);
  }
  return picks;  // stratum order == ascending current
}

std::vector<DeviceParams> select_build_testcases(const ExperimentConfig& cfg,
                                                 const CurrentModel& cm) {
  const std::vector<DeviceParams> factorial = factorial_combinations(cfg);
  std::vector<DeviceParams> out;
  out.reserve(static_cast<std::size_t>(cfg.n_build_testcases));
  for (std::size_t idx : select_testcase_indices(cfg, cm, factorial)) out.push_back(factorial[idx]);
  return out;
}

namespace {

ReportEcho make_echo(const ExperimentConfig& cfg, const CurrentModel& cm) {
  ReportEcho echo;
  echo.config_hash = cfg.hash();
  echo.seed = cfg.seed;
  echo.constants = cfg.constants;
  echo.surrogate = cfg.surrogate;
  echo.ramp = cfg.ramp;
  echo.sim = cfg.sim;
  echo.current_model_hash = current_model_hash(cm);
  return echo;
}

double error_pct(double analytical, double simulated) {
  return std::abs(analytical - simulated) / simulated * 100.0;
}

}  // namespace

CurrentValidationReport validate_current(const ExperimentConfig& cfg, const CurrentModel& cm) {
  cfg.validate();
  CurrentValidationReport report;
  report.echo = make_echo(cfg, cm);
  report.thresholds = cfg.thresholds;
  for (std::size_t i = 0; i < kSweepParameters.size(); ++i)
    report.factorial_dims[i] = sweep_for(cfg, kSweepParameters[i]).values.size();

  const std::vector<DeviceParams> factorial = factorial_combinations(cfg);
  report.cases.reserve(factorial.size());
  double sum = 0.0;
  for (const DeviceParams& p : factorial) {
    CurrentValidationCase c;
    c.params = p;
    c.simulated_a = idsat_reference(p, cfg.constants, cfg.surrogate);
    const CurrentEval ce = eval_current_model(cm, p);
    c.analytical_a = ce.idsat;
    c.extrapolated = ce.extrapolated;
    c.error_pct = error_pct(c.analytical_a, c.simulated_a);
    sum += c.error_pct;
    report.max_error_pct = std::max(report.max_error_pct, c.error_pct);
    report.cases.push_back(c);
  }
  report.avg_error_pct = sum / static_cast<double>(report.cases.size());
  report.testcase_indices = select_testcase_indices(cfg, cm, factorial);
  report.passed = report.avg_error_pct <= report.thresholds.current_avg_pct &&
                  report.max_error_pct <= report.thresholds.current_max_pct;
  return report;
}

DelayValidationReport validate_delay(const ExperimentConfig& cfg, const CurrentModel& cm,
                                     const DelayModel& dm) {
  cfg.validate();
  DelayValidationReport report;
  report.echo = make_echo(cfg, cm);
  report.echo.delay_model_hash = dm.current_model_hash;
  report.thresholds = cfg.thresholds;
  report.loads = cfg.eval_loads;
  std::sort(report.loads.begin(), report.loads.end());

  // All randomness is drawn up front from a dedicated stream.
  Rng rng(cfg.seed, kDelayValidationStream);
  const std::vector<DeviceParams> combos =
      random_params(sweep_ranges(cfg), cfg.n_delay_eval_combos, rng);

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < combos.size(); ++i) {
    DelayValidationRow row;
    row.index = static_cast<int>(i) + 1;
    row.params = combos[i];
    row.model_current_a = eval_current_model(cm, combos[i]).idsat;
    double row_sum = 0.0;
    for (double c_load : report.loads) {
      const double simulated =
          simulate_discharge(combos[i], cfg.constants, cfg.surrogate, c_load, cfg.ramp, cfg.sim)
              .t_phl;
      const DelayEval de = eval_delay_model(dm, cm, combos[i], c_load);
      row.simulated_s.push_back(simulated);
      row.analytical_s.push_back(de.t_phl);
      row.extrapolated = row.extrapolated || de.extrapolated;
      const double e = error_pct(de.t_phl, simulated);
      row.max_error_pct = std::max(row.max_error_pct, e);
      row_sum += e;
      report.max_error_pct = std::max(report.max_error_pct, e);
      sum += e;
      ++count;
    }
    row.avg_error_pct = row_sum / static_cast<double>(report.loads.size());
    report.rows.push_back(std::move(row));
  }
  report.avg_error_pct = sum / static_cast<double>(count);
  report.passed = report.avg_error_pct <= report.thresholds.delay_avg_pct &&
                  report.max_error_pct <= report.thresholds.delay_max_pct;
  return report;
}

void export_iv_curves(const ExperimentConfig& cfg, std::span<const double> widths, int n_points,
                      std::ostream& os) {
  if (widths.empty()) throw DomainError("iv export: need at least one width");
  if (n_points < 2) throw DomainError("iv export: need at least two bias points");
  os << "width_um,vds_V,idn_A\n";
  char line[96];
  for (double w : widths) {
    DeviceParams p = cfg.reference;
    p.width = w;
    for (int k = 0; k < n_points; ++k) {
      const double vds = cfg.constants.vdd * static_cast<double>(k) / (n_points - 1);
      const double i = id_reference(p, cfg.constants, cfg.surrogate, cfg.constants.vdd, vds);
      std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g\n", w / 1e-6, vds, i);
      os << line;
    }
  }
}

void export_discharge_trace(const ExperimentConfig& cfg, double c_load, const InputRamp& ramp,
                            std::ostream& os) {
  const TransientResult res =
      simulate_discharge(cfg.reference, cfg.constants, cfg.surrogate, c_load, ramp, cfg.sim);
  write_transient_csv(res, os);
}

Pipeline run_pipeline(const ExperimentConfig& cfg) {
  cfg.validate();
  Pipeline p;
  p.current_model =
      build_current_model(cfg.reference, cfg.constants, cfg.surrogate, cfg.sweeps, cfg.fit_degree);
  p.testcases = select_build_testcases(cfg, p.current_model);

  DelayBuildOptions opt;
  opt.ramp = cfg.ramp;
  opt.sim = cfg.sim;
  p.delay_model = build_delay_model(p.current_model, p.testcases, cfg.build_loads, opt);

  p.current_report = validate_current(cfg, p.current_model);
  p.delay_report = validate_delay(cfg, p.current_model, p.delay_model);
  return p;
}

std::vector<std::filesystem::path> write_pipeline_files(const Pipeline& p,
                                                        const std::filesystem::path& dir,
                                                        ReportFormat format) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;

  const auto write_text = [&](const std::filesystem::path& path, const std::string& body) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << body;
    if (!os) throw IoError("failed to write " + path.string());
    files.push_back(path);
  };

  save_current_model(p.current_model, dir / "current_model.json");
  files.push_back(dir / "current_model.json");
  save_delay_model(p.delay_model, dir / "delay_model.json");
  files.push_back(dir / "delay_model.json");

  const char* ext = format == ReportFormat::text ? "txt"
                    : format == ReportFormat::csv ? "csv"
                                                  : "json";
  const auto render_current = [&]() -> std::string {
    switch (format) {
      case ReportFormat::text: return render_text(p.current_report);
      case ReportFormat::csv: return render_csv(p.current_report);
      case ReportFormat::json: return to_json_report(p.current_report).dump(2) + "\n";
    }
    throw DomainError("unknown report format");
  };
  const auto render_delay = [&]() -> std::string {
    switch (format) {
      case ReportFormat::text: return render_text(p.delay_report);
      case ReportFormat::csv: return render_csv(p.delay_report);
      case ReportFormat::json: return to_json_report(p.delay_report).dump(2) + "\n";
    }
    throw DomainError("unknown report format");
  };
  write_text(dir / (std::string("current_validation.") + ext), render_current());
  write_text(dir / (std::string("delay_validation.") + ext), render_delay());
  return files;
}

}  // namespace invchar
