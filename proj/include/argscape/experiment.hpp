#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "argscape/random.hpp"

namespace argscape {

using Json = nlohmann::ordered_json;

inline constexpr std::uint64_t kDefaultMasterSeed = 20240917;

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t master_seed = kDefaultMasterSeed;
  /// 0 selects the experiment's default.
  std::size_t replicates = 0;
  /// Overrides of the experiment's default parameters.
  Json parameters = Json::object();
  /// Empty: nothing is written.
  std::filesystem::path output_dir;
  std::size_t workers = 1;
  /// Also write per-replicate tables under raw/.
  bool write_raw = false;
};

/// How `pass` follows from the stored numbers of a row.
enum class Check {
  abs_z_le,         // |z| <= threshold
  abs_z_gt,         // |z| > threshold
  le_ref_plus_se,   // estimate <= reference + threshold * std_error
  gt,               // estimate > threshold
  le,               // estimate <= threshold
  eq,               // estimate == reference
  abs_diff_le,      // |estimate - reference| <= threshold
  finite,           // estimate is finite
  info,             // reported only, always passes
  not_run,          // could not be evaluated, fails
};

std::string to_string(Check check);

struct ReportRow {
  std::string point;
  std::string quantity;
  std::size_t replicates = 0;
  double estimate = 0.0;
  double reference = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  Check check = Check::info;
  double threshold = 0.0;
  bool pass = true;
  std::string note;
};

/// Recomputes `pass` (and `z` when a standard error is present).
void evaluate(ReportRow& row);

struct RawTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct VerificationReport {
  std::string experiment;
  std::uint64_t master_seed = 0;
  std::size_t replicates = 0;
  std::size_t workers = 1;
  Json parameters;
  std::vector<ReportRow> rows;
  std::vector<RawTable> raw;
  double wall_seconds = 0.0;

  bool all_pass() const;
  /// Rows that assert something (everything except info rows).
  std::size_t assertion_count() const;
};

/// Fixed-column CSV, one header line, '.' decimal separator.
void write_report_csv(std::ostream& out, const VerificationReport& report);
std::string report_csv(const VerificationReport& report);
Json report_to_json(const VerificationReport& report);

/// Typed access to validated parameters.
class Parameters {
 public:
  explicit Parameters(Json values) : values_(std::move(values)) {}
  double number(const std::string& name) const;
  std::size_t count(const std::string& name) const;
  std::string text(const std::string& name) const;
  std::vector<double> numbers(const std::string& name) const;
  std::vector<std::size_t> counts(const std::string& name) const;
  std::vector<std::string> texts(const std::string& name) const;
  const Json& json() const { return values_; }

 private:
  const Json& at(const std::string& name) const;
  Json values_;
};

/// What an experiment body sees.
class ExperimentContext {
 public:
  ExperimentContext(const ExperimentConfig& config, Parameters parameters, std::size_t replicates)
      : config_(config), parameters_(std::move(parameters)), replicates_(replicates) {}

  const Parameters& params() const { return parameters_; }
  std::size_t replicates() const { return replicates_; }
  std::size_t workers() const { return config_.workers; }
  bool write_raw() const { return config_.write_raw; }
  /// Independent stream for replicate `rep` of parameter point `point`.
  RandomSource stream(std::size_t point, std::size_t rep) const;

 private:
  const ExperimentConfig& config_;
  Parameters parameters_;
  std::size_t replicates_;
};

struct ExperimentOutput {
  std::vector<ReportRow> rows;
  std::vector<RawTable> raw;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::size_t default_replicates;
  /// Every accepted parameter with its default; overrides must have the same
  /// JSON type (integers and reals are interchangeable, and a single value
  /// stands for a one-element list).
  Json defaults;
  std::function<ExperimentOutput(const ExperimentContext&)> run;
};

const std::vector<ExperimentInfo>& experiment_registry();
/// Throws unknown_experiment.
const ExperimentInfo& find_experiment(const std::string& name);

/// Defaults merged with the overrides; throws invalid_parameter on unknown
/// names or mismatched types.
Json resolve_parameters(const ExperimentInfo& info, const Json& overrides);

/// Validates, runs and (when output_dir is set) writes report.csv,
/// report.json and raw/*.csv. Throws unknown_experiment, invalid_parameter
/// or io_error.
VerificationReport run_experiment(const ExperimentConfig& config);

/// Helpers shared by experiment bodies.
ReportRow proportion_row(std::string point, std::string quantity, std::size_t hits, std::size_t reps,
                         double reference, double z_limit = 3.0);
ReportRow mean_row(std::string point, std::string quantity, std::span<const double> values, double reference,
                   double z_limit = 3.0);
ReportRow bound_row(std::string point, std::string quantity, std::span<const double> values, double bound,
                    double se_multiplier = 3.0);
ReportRow value_row(std::string point, std::string quantity, double estimate, Check check, double reference,
                    double threshold, std::size_t replicates = 0, std::string note = {});

// Experiment bodies, grouped by the modules they exercise.
ExperimentOutput run_verify_lemma51(const ExperimentContext& ctx);
ExperimentOutput run_verify_same_pair(const ExperimentContext& ctx);
ExperimentOutput run_compare_smc(const ExperimentContext& ctx);
ExperimentOutput run_verify_aux(const ExperimentContext& ctx);
ExperimentOutput run_aux_independence(const ExperimentContext& ctx);
ExperimentOutput run_mixing(const ExperimentContext& ctx);
ExperimentOutput run_verify_daux(const ExperimentContext& ctx);
ExperimentOutput run_tightness(const ExperimentContext& ctx);
ExperimentOutput run_gh_linear(const ExperimentContext& ctx);
ExperimentOutput run_variation(const ExperimentContext& ctx);
ExperimentOutput run_structure(const ExperimentContext& ctx);
ExperimentOutput run_second_moment(const ExperimentContext& ctx);
ExperimentOutput run_projectivity(const ExperimentContext& ctx);
ExperimentOutput run_kingman_small_time(const ExperimentContext& ctx);

}  // namespace argscape
