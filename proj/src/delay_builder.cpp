#include "invchar/delay_builder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "invchar/errors.hpp"

namespace invchar {

namespace {

std::string cell_warning(const char* what, double current, double load, double a, double b) {
  char msg[160];
  std::snprintf(msg, sizeof(msg), "%s at (I=%.6g A, C_L=%.6g F): %.6g vs %.6g",
                what, current, load, a, b);
  return msg;
}

}  // namespace

DelayModel build_delay_model(const CurrentModel& cm, std::span<const DeviceParams> testcases,
                             std::span<const double> loads, const DelayBuildOptions& opt) {
  if (testcases.size() < 2) throw DomainError("delay build: need at least 2 testcases");
  if (loads.size() < 2) throw DomainError("delay build: need at least 2 loads");

  std::vector<double> load_axis(loads.begin(), loads.end());
  std::sort(load_axis.begin(), load_axis.end());
  if (std::adjacent_find(load_axis.begin(), load_axis.end()) != load_axis.end())
    throw DomainError("delay build: loads must be distinct");
  if (!(load_axis.front() > 0.0)) throw DomainError("delay build: loads must be > 0");

  DelayModel model;
  model.current_model_hash = current_model_hash(cm);
  model.meta.n_testcases = static_cast<int>(testcases.size());
  model.meta.loads = load_axis;
  model.meta.ramp = opt.ramp;
  model.meta.sim = opt.sim;

  // Model current per testcase; this is the surface's x coordinate.
  std::vector<double> currents(testcases.size());
  for (std::size_t i = 0; i < testcases.size(); ++i) {
    const CurrentEval ce = eval_current_model(cm, testcases[i]);
    currents[i] = ce.idsat;
    if (ce.extrapolated) {
      char msg[96];
      std::snprintf(msg, sizeof(msg),
                    "testcase %zu evaluates outside the ratio-fit domain (I=%.6g A)", i,
                    ce.idsat);
      model.meta.warnings.emplace_back(msg);
    }
  }

  // Simulate every (testcase, load) cell, collecting failures per cell.
  std::vector<std::vector<double>> delays(testcases.size(),
                                          std::vector<double>(load_axis.size()));
  std::vector<std::pair<double, double>> failed;
  std::string failure_detail;
  for (std::size_t i = 0; i < testcases.size(); ++i) {
    for (std::size_t k = 0; k < load_axis.size(); ++k) {
      try {
        delays[i][k] = opt.simulate_override
                           ? opt.simulate_override(testcases[i], load_axis[k])
                           : simulate_discharge(testcases[i], cm.constants, cm.surrogate,
                                                load_axis[k], opt.ramp, opt.sim)
                                 .t_phl;
      } catch (const Error& e) {
        failed.emplace_back(currents[i], load_axis[k]);
        if (failure_detail.empty()) failure_detail = e.what();
      }
    }
  }
  if (!failed.empty()) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "delay build: %zu grid cell(s) failed to simulate; first error: %s",
                  failed.size(), failure_detail.c_str());
    throw IncompleteGridError(msg, std::move(failed));
  }

  // Sort testcases by current, then merge near-duplicates so the axis
  // stays strictly increasing.
  std::vector<std::size_t> order(testcases.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return currents[a] < currents[b]; });

  std::vector<double> axis;
  std::vector<std::vector<double>> rows;
  std::vector<int> group_sizes;
  for (std::size_t idx : order) {
    const double x = currents[idx];
    if (!axis.empty() &&
        x - axis.back() <= opt.merge_rel_tol * std::max(std::abs(x), std::abs(axis.back()))) {
      const int k = group_sizes.back();
      axis.back() = (axis.back() * k + x) / (k + 1);
      for (std::size_t j = 0; j < load_axis.size(); ++j)
        rows.back()[j] = (rows.back()[j] * k + delays[idx][j]) / (k + 1);
      group_sizes.back() = k + 1;
      model.meta.merged_testcases += 1;
      char msg[96];
      std::snprintf(msg, sizeof(msg), "merged indistinct current node near %.6g A", x);
      model.meta.warnings.emplace_back(msg);
    } else {
      axis.push_back(x);
      rows.push_back(delays[idx]);
      group_sizes.push_back(1);
    }
  }
  if (axis.size() < 2)
    throw DegenerateAxisError("delay build: fewer than 2 distinct currents survive merging");

  // The table must behave like a delay: longer with load, shorter with drive.
  for (std::size_t i = 0; i < axis.size(); ++i)
    for (std::size_t j = 0; j + 1 < load_axis.size(); ++j)
      if (!(rows[i][j] < rows[i][j + 1]))
        model.meta.warnings.push_back(cell_warning("delay not increasing in C_L", axis[i],
                                                   load_axis[j + 1], rows[i][j],
                                                   rows[i][j + 1]));
  for (std::size_t j = 0; j < load_axis.size(); ++j)
    for (std::size_t i = 0; i + 1 < axis.size(); ++i)
      if (!(rows[i][j] > rows[i + 1][j]))
        model.meta.warnings.push_back(cell_warning("delay not decreasing in current",
                                                   axis[i + 1], load_axis[j], rows[i][j],
                                                   rows[i + 1][j]));

  std::vector<GridSample> samples;
  samples.reserve(axis.size() * load_axis.size());
  for (std::size_t i = 0; i < axis.size(); ++i)
    for (std::size_t j = 0; j < load_axis.size(); ++j)
      samples.push_back({axis[i], load_axis[j], rows[i][j]});
  model.surface = surface_build(axis, load_axis, samples);
  return model;
}

DelayEval eval_delay_model(const DelayModel& dm, const CurrentModel& cm, const DeviceParams& p,
                           double c_load, bool allow_hash_mismatch) {
  if (!allow_hash_mismatch && dm.current_model_hash != current_model_hash(cm))
    throw ModelMismatchError(
        "delay model was built against a different current model (hash mismatch); "
        "pass the override flag to evaluate anyway");
  if (!(c_load > 0.0)) throw DomainError("delay eval: load capacitance must be > 0");
  const CurrentEval ce = eval_current_model(cm, p);
  const SurfaceValue sv = surface_eval(dm.surface, ce.idsat, c_load);
  return {sv.value, ce.extrapolated || sv.extrapolated};
}

namespace {
constexpr const char* kDelayModelFormat = "invchar.delay_model";
}

void to_json(nlohmann::ordered_json& j, const DelayModel& m) {
  nlohmann::ordered_json surface;
  to_json(surface, m.surface);
  j = nlohmann::ordered_json{
      {"format", kDelayModelFormat},
      {"version", 1},
      {"current_model_hash", m.current_model_hash},
      {"surface", std::move(surface)},
      {"build",
       {{"n_testcases", m.meta.n_testcases},
        {"loads", m.meta.loads},
        {"t_rise", m.meta.ramp.t_rise},
        {"t_start", m.meta.ramp.t_start},
        {"dt_max", m.meta.sim.dt_max},
        {"tol", m.meta.sim.tol},
        {"merged_testcases", m.meta.merged_testcases},
        {"warnings", m.meta.warnings}}},
  };
}

void from_json(const nlohmann::ordered_json& j, DelayModel& m) {
  if (j.value("format", "") != kDelayModelFormat)
    throw IoError("delay model: unrecognized file format");
  if (j.value("version", 0) != 1) throw IoError("delay model: unsupported version");
  m.current_model_hash = j.at("current_model_hash").get<std::string>();
  from_json(j.at("surface"), m.surface);
  const auto& b = j.at("build");
  m.meta.n_testcases = b.at("n_testcases").get<int>();
  b.at("loads").get_to(m.meta.loads);
  m.meta.ramp.t_rise = b.at("t_rise").get<double>();
  m.meta.ramp.t_start = b.at("t_start").get<double>();
  m.meta.sim.dt_max = b.at("dt_max").get<double>();
  m.meta.sim.tol = b.at("tol").get<double>();
  m.meta.merged_testcases = b.at("merged_testcases").get<int>();
  b.at("warnings").get_to(m.meta.warnings);
}

void save_delay_model(const DelayModel& m, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  to_json(j, m);
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw IoError("failed to write " + path.string());
}

DelayModel load_delay_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed model file " + path.string() + ": " + e.what());
  }
  DelayModel m;
  from_json(j, m);
  return m;
}

}  // namespace invchar
