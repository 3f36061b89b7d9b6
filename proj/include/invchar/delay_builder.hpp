#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "invchar/current_builder.hpp"
#include "invchar/fitting.hpp"
#include "invchar/transient_sim.hpp"

namespace invchar {

struct DelayBuildMeta {
  int n_testcases = 0;
  std::vector<double> loads;  // F, sorted
  InputRamp ramp{};
  SimOptions sim{};
  int merged_testcases = 0;               // testcases absorbed into shared current nodes
  std::vector<std::string> warnings;      // monotonicity violations, merges
};

/// Bilinear delay table t_pHL(I_DnSat-A, C_L). The current axis holds the
/// model-evaluated currents of the build testcases, sorted ascending.
struct DelayModel {
  GridSurface surface;             // xs = currents (A), ys = loads (F)
  std::string current_model_hash;  // model this table was built against
  DelayBuildMeta meta;
};

struct DelayBuildOptions {
  // Characterization default is an ideal step: the table's premise is that
  // the input edge is fast against every tabulated delay.
  InputRamp ramp{0.0, 0.0};
  SimOptions sim{};
  double merge_rel_tol = 1e-3;  // currents closer than this collapse to one node
  // Test hook: replaces simulate_discharge, returns t_phl for (device, load).
  std::function<double(const DeviceParams&, double c_load)> simulate_override;
};

struct DelayEval {
  double t_phl = 0.0;
  bool extrapolated = false;
};

/// Simulates every (testcase, load) cell, pairs the delays with the model
/// currents of the testcases, and assembles the bilinear surface.
/// Near-duplicate currents are merged (delays averaged) with a warning;
/// non-monotone delay samples are reported as warnings naming the cells.
DelayModel build_delay_model(const CurrentModel& cm, std::span<const DeviceParams> testcases,
                             std::span<const double> loads,
                             const DelayBuildOptions& opt = {});

/// Looks up t_pHL at (model current of p, c_load). Refuses models whose
/// current-model hash disagrees unless allow_hash_mismatch is set. The
/// extrapolation flag combines current-model and surface extrapolation.
DelayEval eval_delay_model(const DelayModel& dm, const CurrentModel& cm, const DeviceParams& p,
                           double c_load, bool allow_hash_mismatch = false);

void to_json(nlohmann::ordered_json& j, const DelayModel& m);
void from_json(const nlohmann::ordered_json& j, DelayModel& m);

void save_delay_model(const DelayModel& m, const std::filesystem::path& path);
DelayModel load_delay_model(const std::filesystem::path& path);

}  // namespace invchar
