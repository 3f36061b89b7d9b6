#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "invchar/device_model.hpp"
#include "invchar/fitting.hpp"

namespace invchar {

/// The five process/model parameters a sweep may vary, in canonical order.
enum class SweepParameter { length, width, t_ox, v_th0, u0 };

inline constexpr std::array<SweepParameter, 5> kSweepParameters = {
    SweepParameter::length, SweepParameter::width, SweepParameter::t_ox,
    SweepParameter::v_th0, SweepParameter::u0};

std::string_view to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(std::string_view name);

double get_param(const DeviceParams& p, SweepParameter which);
void set_param(DeviceParams& p, SweepParameter which, double value);

/// One parameter's sweep list (SI values). Must hold at least three
/// distinct positive values and contain the reference value, so the
/// ratio data always passes through 1.0.
struct SweepSpec {
  SweepParameter parameter = SweepParameter::length;
  std::vector<double> values;

  /// Values must be nonempty, positive and distinct.
  void validate_values() const;
  /// Full invariant for model building: validate_values, at least three
  /// entries, and the reference value is a member.
  void validate(double reference_value) const;
};

struct SweepPoint {
  double value;  // swept parameter value (SI)
  double idsat;  // simulated saturation current (A)
};

/// Fitted current-ratio curve for one parameter: poly maps
/// value/reference_value to idsat/idsat_ref.
struct RatioFit {
  SweepParameter parameter = SweepParameter::length;
  double reference_value = 0.0;
  Polynomial poly;
  GoodnessOfFit gof;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
};

/// Multiplicative saturation-current model: the product of the five
/// ratio-fit curves times the reference current.
struct CurrentModel {
  DeviceParams reference;
  PhysicalConstants constants;
  ReferenceModelConfig surrogate;
  double idsat_ref = 0.0;
  std::array<RatioFit, 5> fits;  // canonical parameter order
  int fit_degree = 2;
  int sweep_evaluations = 0;  // reference-model evaluations spent on sweeps

  const RatioFit& fit_for(SweepParameter which) const;
};

struct CurrentEval {
  double idsat = 0.0;
  bool extrapolated = false;  // some ratio left its sweep's ratio domain
};

/// Evaluates the reference model once per sweep value, all other
/// parameters held at their reference values. Order is preserved.
std::vector<SweepPoint> run_parameter_sweep(const DeviceParams& ref, const PhysicalConstants& c,
                                            const ReferenceModelConfig& r, const SweepSpec& spec);

/// Least-squares fit of the ratio curve for one parameter. Points are
/// sorted by ratio internally, so the result is independent of sweep order.
RatioFit fit_parameter(SweepParameter parameter, std::span<const SweepPoint> sweep_result,
                       double reference_value, double idsat_ref, int degree = 2);

/// Runs the full build: one reference evaluation, one sweep and one ratio
/// fit per parameter. Throws MissingSweepError unless exactly one spec is
/// given for each of the five parameters.
CurrentModel build_current_model(const DeviceParams& ref, const PhysicalConstants& c,
                                 const ReferenceModelConfig& r,
                                 std::span<const SweepSpec> sweeps, int degree = 2);

/// Product of the five ratio polynomials times idsat_ref. Ratios outside
/// their fit domain are evaluated anyway but flagged; a non-positive
/// result raises NonPhysicalError instead of being clamped.
CurrentEval eval_current_model(const CurrentModel& m, const DeviceParams& p);

void to_json(nlohmann::ordered_json& j, const CurrentModel& m);
void from_json(const nlohmann::ordered_json& j, CurrentModel& m);

/// FNV-1a hash of the canonical serialized model, for pairing delay models
/// with the current model they were built from.
std::string current_model_hash(const CurrentModel& m);

void save_current_model(const CurrentModel& m, const std::filesystem::path& path);
CurrentModel load_current_model(const std::filesystem::path& path);

}  // namespace invchar
