#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "invchar/errors.hpp"
#include "invchar/harness.hpp"
#include "invchar/units.hpp"

using namespace invchar;

namespace {

const ExperimentConfig& cfg() {
  static const ExperimentConfig c = ExperimentConfig::defaults();
  return c;
}

const CurrentModel& model() {
  static const CurrentModel m = build_current_model(cfg().reference, cfg().constants,
                                                    cfg().surrogate, cfg().sweeps, 2);
  return m;
}

}  // namespace

TEST_CASE("random parameter draws") {
  SUBCASE("degenerate range collapses to its endpoint") {
    std::array<ParamRange, 5> ranges = sweep_ranges(cfg());
    ranges[0] = {85e-9, 85e-9};
    Rng rng(3, 0);
    for (const DeviceParams& p : random_params(ranges, 8, rng)) CHECK(p.length == 85e-9);
  }
  SUBCASE("same seed, same sequence") {
    Rng a(42, kDelayValidationStream), b(42, kDelayValidationStream);
    const auto pa = random_params(sweep_ranges(cfg()), 10, a);
    const auto pb = random_params(sweep_ranges(cfg()), 10, b);
    for (int i = 0; i < 10; ++i) {
      CHECK(pa[i].length == pb[i].length);
      CHECK(pa[i].u0 == pb[i].u0);
    }
  }
  SUBCASE("draws fill the range with the right mean") {
    std::array<ParamRange, 5> ranges{};
    for (auto& r : ranges) r = {1.0, 2.0};
    ranges[0] = {80e-9, 90e-9};
    Rng rng(42, 0);
    const auto draws = random_params(ranges, 10000, rng);
    double lo = 1e9, hi = 0.0, mean = 0.0;
    for (const DeviceParams& p : draws) {
      lo = std::min(lo, p.length);
      hi = std::max(hi, p.length);
      mean += p.length;
    }
    mean /= draws.size();
    CHECK(lo >= 80e-9);
    CHECK(hi <= 90e-9);
    CHECK(std::abs(mean - 85e-9) <= 0.01 * 85e-9);
  }
}

TEST_CASE("factorial enumeration covers all 1600 combinations") {
  const auto combos = factorial_combinations(cfg());
  CHECK(combos.size() == 1600);
  // The nesting order puts u0 innermost.
  CHECK(combos[0].u0 == doctest::Approx(550e-4));
  CHECK(combos[1].u0 == doctest::Approx(540e-4));
  CHECK(combos[0].length == combos[1].length);
}

TEST_CASE("testcase selection is seeded, stratified and deterministic") {
  const auto a = select_build_testcases(cfg(), model());
  const auto b = select_build_testcases(cfg(), model());
  REQUIRE(a.size() == 25);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].length == b[i].length);
    CHECK(a[i].width == b[i].width);
  }
  // Ascending in model current, spanning a wide slice of the factorial range.
  std::vector<double> currents;
  for (const DeviceParams& p : a) currents.push_back(eval_current_model(model(), p).idsat);
  CHECK(std::is_sorted(currents.begin(), currents.end()));

  const auto factorial = factorial_combinations(cfg());
  double lo = 1e9, hi = 0.0;
  for (const DeviceParams& p : factorial) {
    const double i = eval_current_model(model(), p).idsat;
    lo = std::min(lo, i);
    hi = std::max(hi, i);
  }
  CHECK(currents.front() <= lo * 1.30);
  CHECK(currents.back() >= hi * 0.80);

  ExperimentConfig other = cfg();
  other.seed = 1;
  const auto c = select_build_testcases(other, model());
  bool any_difference = false;
  for (std::size_t i = 0; i < c.size(); ++i)
    any_difference = any_difference || c[i].width != a[i].width || c[i].length != a[i].length;
  CHECK(any_difference);
}

TEST_CASE("current validation over the factorial") {
  const CurrentValidationReport r = validate_current(cfg(), model());
  CHECK(r.cases.size() == 1600);
  CHECK(r.factorial_dims == std::array<std::size_t, 5>{5, 5, 4, 4, 4});
  CHECK(r.testcase_indices.size() == 25);
  CHECK(r.avg_error_pct <= 5.0);
  CHECK(r.max_error_pct <= 10.0);
  CHECK(r.passed);
  CHECK(r.echo.seed == 42);
  CHECK_FALSE(r.echo.config_hash.empty());
  CHECK(r.echo.current_model_hash == current_model_hash(model()));

  SUBCASE("aggregates recompute from the per-case rows") {
    double sum = 0.0, worst = 0.0;
    for (const CurrentValidationCase& c : r.cases) {
      const double expect = std::abs(c.analytical_a - c.simulated_a) / c.simulated_a * 100.0;
      CHECK(c.error_pct == doctest::Approx(expect).epsilon(1e-12));
      sum += c.error_pct;
      worst = std::max(worst, c.error_pct);
    }
    CHECK(r.avg_error_pct == doctest::Approx(sum / r.cases.size()).epsilon(1e-12));
    CHECK(r.max_error_pct == doctest::Approx(worst).epsilon(1e-12));
    CHECK(r.avg_error_pct <= r.max_error_pct);
  }

  SUBCASE("renderings are deterministic and carry the echo") {
    const std::string text = render_text(r);
    CHECK(text == render_text(r));
    CHECK(text.find("seed: 42") != std::string::npos);
    CHECK(text.find("alpha=1.3") != std::string::npos);
    CHECK(text.find("1600 combinations") != std::string::npos);
    CHECK(text.find("PASS") != std::string::npos);

    const std::string csv = render_csv(r);
    std::size_t lines = 0;
    for (char ch : csv)
      if (ch == '\n') ++lines;
    CHECK(lines == 1600 + 2);  // echo comment + header + rows

    const nlohmann::ordered_json j = to_json_report(r);
    CHECK(j.at("n_cases").get<std::size_t>() == 1600);
    CHECK(j.at("echo").at("seed").get<std::uint64_t>() == 42);
    CHECK(j.at("cases").size() == 1600);
    CHECK(j.dump() == to_json_report(r).dump());
  }
}

TEST_CASE("trace exports") {
  SUBCASE("I-V curves: five widths, monotone in vds") {
    std::ostringstream os;
    const std::vector<double> widths{1e-6, 2e-6, 3e-6, 4e-6, 5e-6};
    export_iv_curves(cfg(), widths, 25, os);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "width_um,vds_V,idn_A");
    double w, vds, i;
    char comma;
    double prev_i = -1.0, prev_w = 0.0;
    std::size_t rows = 0;
    std::string line;
    while (std::getline(is, line)) {
      std::istringstream ls(line);
      ls >> w >> comma >> vds >> comma >> i;
      if (w != prev_w) prev_i = -1.0;  // new curve
      CHECK(i >= prev_i);
      prev_i = i;
      prev_w = w;
      ++rows;
    }
    CHECK(rows == widths.size() * 25);
  }
  SUBCASE("discharge trace ends at the crossing with visibly varying current") {
    std::ostringstream os;
    export_discharge_trace(cfg(), 10e-15, InputRamp{0.0, 0.0}, os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);  // header
    double i_min = 1e9, i_max = 0.0, last_vout = 0.0, prev_vout = 0.0;
    while (std::getline(is, line)) {
      double t, vin, vout, idn;
      char c;
      std::istringstream ls(line);
      ls >> t >> c >> vin >> c >> vout >> c >> idn;
      i_min = std::min(i_min, idn);
      i_max = std::max(i_max, idn);
      prev_vout = last_vout;
      last_vout = vout;
    }
    CHECK(last_vout <= 0.6);
    CHECK(prev_vout > 0.6);
    CHECK(i_min < 0.95 * i_max);
  }
}

TEST_CASE("config serialization, hashing and linting") {
  SUBCASE("defaults are valid and round-trip through JSON") {
    const ExperimentConfig c = ExperimentConfig::defaults();
    c.validate();
    nlohmann::ordered_json j;
    to_json(j, c);
    ExperimentConfig back;
    from_json(j, back);
    CHECK(back.hash() == c.hash());
    CHECK(back.reference.length == c.reference.length);
    CHECK(back.sweeps[2].values == c.sweeps[2].values);
    CHECK(back.build_loads == c.build_loads);
    CHECK(back.seed == c.seed);
  }
  SUBCASE("files round-trip") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "invchar_test_config.json";
    save_config(cfg(), path);
    const ExperimentConfig loaded = load_config(path);
    CHECK(loaded.hash() == cfg().hash());
    fs::remove(path);
  }
  SUBCASE("partial configs inherit defaults") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "invchar_partial_config.json";
    std::ofstream(path) << R"({"seed": 7, "constants": {"alpha": 1.5}})";
    const ExperimentConfig loaded = load_config(path);
    CHECK(loaded.seed == 7);
    CHECK(loaded.constants.alpha == 1.5);
    CHECK(loaded.reference.length == ExperimentConfig::defaults().reference.length);
    CHECK(loaded.sweeps.size() == 5);
    fs::remove(path);
  }
  SUBCASE("lint flags eval loads outside the build hull") {
    ExperimentConfig c = ExperimentConfig::defaults();
    CHECK(c.lint().empty());
    c.eval_loads.push_back(500e-15);
    const auto notes = c.lint();
    REQUIRE_FALSE(notes.empty());
    CHECK(notes[0].find("outside the build-load hull") != std::string::npos);
  }
  SUBCASE("invalid configs are rejected") {
    ExperimentConfig c = ExperimentConfig::defaults();
    c.sweeps[3].values = {0.4, 0.35, 1.3};  // threshold above vdd
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = ExperimentConfig::defaults();
    c.sweeps.pop_back();
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = ExperimentConfig::defaults();
    c.build_loads = {10e-15};
    CHECK_THROWS_AS(c.validate(), DomainError);
  }
}

TEST_CASE("small pipeline is deterministic end to end") {
  ExperimentConfig small = ExperimentConfig::defaults();
  small.n_build_testcases = 6;
  small.n_delay_eval_combos = 2;
  small.eval_loads = {37e-15, 123e-15};

  const Pipeline a = run_pipeline(small);
  const Pipeline b = run_pipeline(small);
  CHECK(current_model_hash(a.current_model) == current_model_hash(b.current_model));
  CHECK(a.delay_model.surface.zs == b.delay_model.surface.zs);
  CHECK(render_csv(a.delay_report) == render_csv(b.delay_report));
  CHECK(render_text(a.current_report) == render_text(b.current_report));

  CHECK(a.delay_report.rows.size() == 2);
  for (const DelayValidationRow& row : a.delay_report.rows) {
    CHECK(row.simulated_s.size() == 2);
    CHECK(row.analytical_s.size() == 2);
    double worst = 0.0, sum = 0.0;
    for (std::size_t k = 0; k < row.simulated_s.size(); ++k) {
      const double e =
          std::abs(row.analytical_s[k] - row.simulated_s[k]) / row.simulated_s[k] * 100.0;
      worst = std::max(worst, e);
      sum += e;
    }
    CHECK(row.max_error_pct == doctest::Approx(worst).epsilon(1e-12));
    CHECK(row.avg_error_pct == doctest::Approx(sum / 2.0).epsilon(1e-12));
  }

  SUBCASE("written files are byte-identical across runs") {
    namespace fs = std::filesystem;
    const fs::path d1 = fs::temp_directory_path() / "invchar_pipe_a";
    const fs::path d2 = fs::temp_directory_path() / "invchar_pipe_b";
    write_pipeline_files(a, d1, ReportFormat::json);
    write_pipeline_files(b, d2, ReportFormat::json);
    for (const char* name :
         {"current_model.json", "delay_model.json", "current_validation.json",
          "delay_validation.json"}) {
      std::ifstream f1(d1 / name), f2(d2 / name);
      std::stringstream s1, s2;
      s1 << f1.rdbuf();
      s2 << f2.rdbuf();
      CHECK(s1.str() == s2.str());
      CHECK_FALSE(s1.str().empty());
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
  }
}
