#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "invchar/delay_builder.hpp"
#include "invchar/experiment_config.hpp"
#include "invchar/random.hpp"

namespace invchar {

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Min/max hull of each sweep list, canonical parameter order. Held-out
/// validation parameters are drawn from these ranges.
std::array<ParamRange, 5> sweep_ranges(const ExperimentConfig& cfg);

/// All combinations of the five sweep lists, nested in canonical order
/// (the last parameter varies fastest).
std::vector<DeviceParams> factorial_combinations(const ExperimentConfig& cfg);

/// n i.i.d. uniform draws per parameter from the given ranges.
std::vector<DeviceParams> random_params(const std::array<ParamRange, 5>& ranges, int n, Rng& rng);

/// Seeded random subset of the factorial combinations used both for the
/// validation listing and as the delay-table build testcases. The subset
/// is stratified along the model current so the delay table spans the
/// full current range: combinations are sorted by I_DnSat-A, split into
/// n equal strata, and one member is drawn per stratum. Returned in
/// ascending-current order.
std::vector<std::size_t> select_testcase_indices(const ExperimentConfig& cfg,
                                                 const CurrentModel& cm,
                                                 std::span<const DeviceParams> factorial);
std::vector<DeviceParams> select_build_testcases(const ExperimentConfig& cfg,
                                                 const CurrentModel& cm);

/// Everything a report needs to be reproduced.
struct ReportEcho {
  std::string config_hash;
  std::uint64_t seed = 0;
  PhysicalConstants constants{};
  ReferenceModelConfig surrogate{};
  InputRamp ramp{};
  SimOptions sim{};
  std::string current_model_hash;
  std::string delay_model_hash;  // empty for current-only reports
};

struct CurrentValidationCase {
  DeviceParams params;
  double simulated_a = 0.0;   // surrogate reference current
  double analytical_a = 0.0;  // model current
  double error_pct = 0.0;     // |analytical - simulated| / simulated * 100
  bool extrapolated = false;
};

struct CurrentValidationReport {
  std::array<std::size_t, 5> factorial_dims{};
  std::vector<CurrentValidationCase> cases;     // full factorial
  std::vector<std::size_t> testcase_indices;    // selected subset, ascending current
  double avg_error_pct = 0.0;
  double max_error_pct = 0.0;
  ValidationThresholds thresholds{};
  bool passed = false;
  ReportEcho echo;
};

/// Evaluates the current model against the surrogate over the full
/// factorial and selects the seeded testcase subset for the listing.
CurrentValidationReport validate_current(const ExperimentConfig& cfg, const CurrentModel& cm);

struct DelayValidationRow {
  int index = 0;  // 1-based test number
  DeviceParams params;
  double model_current_a = 0.0;
  std::vector<double> simulated_s;   // one delay per eval load
  std::vector<double> analytical_s;  // one lookup per eval load
  double max_error_pct = 0.0;
  double avg_error_pct = 0.0;
  bool extrapolated = false;
};

struct DelayValidationReport {
  std::vector<double> loads;  // F, the held-out eval loads
  std::vector<DelayValidationRow> rows;
  double avg_error_pct = 0.0;
  double max_error_pct = 0.0;
  ValidationThresholds thresholds{};
  bool passed = false;
  ReportEcho echo;
};

/// Draws the held-out parameter combinations, simulates each at every
/// eval load, and compares against the delay-table lookups.
DelayValidationReport validate_delay(const ExperimentConfig& cfg, const CurrentModel& cm,
                                     const DelayModel& dm);

enum class ReportFormat { text, csv, json };
ReportFormat report_format_from_string(std::string_view name);
std::string_view to_string(ReportFormat f);

std::string render_text(const CurrentValidationReport& r);
std::string render_csv(const CurrentValidationReport& r);
nlohmann::ordered_json to_json_report(const CurrentValidationReport& r);

std::string render_text(const DelayValidationReport& r);
std::string render_csv(const DelayValidationReport& r);
nlohmann::ordered_json to_json_report(const DelayValidationReport& r);

/// I-V curves at vgs = vdd for a list of widths; long-format CSV with
/// columns width_um,vds_V,idn_A.
void export_iv_curves(const ExperimentConfig& cfg, std::span<const double> widths,
                      int n_points, std::ostream& os);

/// One discharge trace down to vdd/2; CSV columns t_s,vin_V,vout_V,idn_A.
void export_discharge_trace(const ExperimentConfig& cfg, double c_load, const InputRamp& ramp,
                            std::ostream& os);

/// The full experiment: build the current model, pick the testcases,
/// build the delay table, run both validations.
struct Pipeline {
  CurrentModel current_model;
  std::vector<DeviceParams> testcases;
  DelayModel delay_model;
  CurrentValidationReport current_report;
  DelayValidationReport delay_report;
};

Pipeline run_pipeline(const ExperimentConfig& cfg);

/// Writes current_model.json, delay_model.json and both validation
/// reports (in the chosen format) into dir. Returns the file list.
std::vector<std::filesystem::path> write_pipeline_files(const Pipeline& p,
                                                        const std::filesystem::path& dir,
                                                        ReportFormat format);

}  // namespace invchar
