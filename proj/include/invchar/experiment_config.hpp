#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "invchar/current_builder.hpp"
#include "invchar/device_model.hpp"
#include "invchar/transient_sim.hpp"

namespace invchar {

/// Pass/fail gates for the validation commands, in percent.
struct ValidationThresholds {
  double current_avg_pct = 5.0;
  double current_max_pct = 10.0;
  double delay_avg_pct = 3.0;
  double delay_max_pct = 8.0;
};

/// Full description of one characterization experiment. Everything the
/// pipeline consumes is in here; reports echo the hash of this structure
/// so no free parameter goes unrecorded.
///
/// Config files use the customary units (nm, um, V, cm^2/Vs, fF, ps); the
/// in-memory structure is SI like the rest of the library.
struct ExperimentConfig {
  DeviceParams reference{};
  PhysicalConstants constants{};
  ReferenceModelConfig surrogate{};
  std::vector<SweepSpec> sweeps;     // exactly five, canonical order
  std::vector<double> build_loads;   // F
  std::vector<double> eval_loads;    // F
  int n_build_testcases = 25;
  int n_delay_eval_combos = 10;
  int fit_degree = 2;
  std::uint64_t seed = 42;
  // Characterization runs default to an ideal step: every tabulated delay
  // must be long against the input edge for the table to be load/current
  // separable. One-shot simulations keep their own 10 ps default.
  InputRamp ramp{0.0, 0.0};
  SimOptions sim{};
  ValidationThresholds thresholds{};

  /// The shipped 90 nm experiment: reference point, five sweep lists,
  /// build loads (10,20,50,100,200) fF, eval loads (13,37,83,123,185) fF,
  /// 25 build testcases, 10 held-out combos, seed 42.
  static ExperimentConfig defaults();

  void validate() const;

  /// Non-fatal observations (e.g. eval loads outside the build-load hull).
  std::vector<std::string> lint() const;

  std::string hash() const;
};

void to_json(nlohmann::ordered_json& j, const ExperimentConfig& cfg);
void from_json(const nlohmann::ordered_json& j, ExperimentConfig& cfg);

/// Loads a config file; missing fields keep their defaults.
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

}  // namespace invchar
