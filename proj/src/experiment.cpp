#include "argscape/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "argscape/errors.hpp"
#include "argscape/format.hpp"
#include "argscape/stats.hpp"

namespace argscape {

std::string to_string(Check check) {
  switch (check) {
    case Check::abs_z_le:
      return "abs_z_le";
    case Check::abs_z_gt:
      return "abs_z_gt";
    case Check::le_ref_plus_se:
      return "le_ref_plus_se";
    case Check::gt:
      return "gt";
    case Check::le:
      return "le";
    case Check::eq:
      return "eq";
    case Check::abs_diff_le:
      return "abs_diff_le";
    case Check::finite:
      return "finite";
    case Check::info:
      return "info";
    case Check::not_run:
      return "not_run";
  }
  return "unknown";
}

void evaluate(ReportRow& row) {
  if (row.std_error > 0.0) row.z = (row.estimate - row.reference) / row.std_error;
  const double diff = row.estimate - row.reference;
  switch (row.check) {
    case Check::abs_z_le:
      // A zero standard error only passes on an exact match.
      row.pass = row.std_error > 0.0 ? std::abs(row.z) <= row.threshold : diff == 0.0;
      break;
    case Check::abs_z_gt:
      row.pass = row.std_error > 0.0 && std::abs(row.z) > row.threshold;
      break;
    case Check::le_ref_plus_se:
      row.pass = row.estimate <= row.reference + row.threshold * row.std_error;
      break;
    case Check::gt:
      row.pass = row.estimate > row.threshold;
      break;
    case Check::le:
      row.pass = row.estimate <= row.threshold;
      break;
    case Check::eq:
      row.pass = row.estimate == row.reference;
      break;
    case Check::abs_diff_le:
      row.pass = std::abs(diff) <= row.threshold;
      break;
    case Check::finite:
      row.pass = std::isfinite(row.estimate);
      break;
    case Check::info:
      row.pass = true;
      break;
    case Check::not_run:
      row.pass = false;
      break;
  }
}

bool VerificationReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

std::size_t VerificationReport::assertion_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return r.check != Check::info; }));
}

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

void write_csv_line(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_field(fields[i]);
  }
  out << '\n';
}

Json number_or_text(double value) {
  if (std::isfinite(value)) return value;
  return format_double(value);
}

}  // namespace

void write_report_csv(std::ostream& out, const VerificationReport& report) {
  write_csv_line(out, {"experiment", "point", "quantity", "replicates", "estimate", "reference", "std_error", "z",
                       "check", "threshold", "pass", "note"});
  for (const ReportRow& r : report.rows)
    write_csv_line(out, {report.experiment, r.point, r.quantity, std::to_string(r.replicates),
                         format_double(r.estimate), format_double(r.reference), format_double(r.std_error),
                         format_double(r.z), to_string(r.check), format_double(r.threshold),
                         r.pass ? "true" : "false", r.note});
}

std::string report_csv(const VerificationReport& report) {
  std::ostringstream out;
  write_report_csv(out, report);
  return out.str();
}

Json report_to_json(const VerificationReport& report) {
  Json j;
  j["experiment"] = report.experiment;
  j["master_seed"] = report.master_seed;
  j["replicates"] = report.replicates;
  j["workers"] = report.workers;
  j["parameters"] = report.parameters;
  j["wall_seconds"] = report.wall_seconds;
  j["all_pass"] = report.all_pass();
  j["assertions"] = report.assertion_count();
  j["multiplicity_note"] =
      "each assertion uses its own threshold (3 sigma or p > 0.01) without Bonferroni correction; with " +
      std::to_string(report.assertion_count()) + " assertions a family-wise 1% level would need p > " +
      format_double(0.01 / static_cast<double>(std::max<std::size_t>(report.assertion_count(), 1)));
  Json rows = Json::array();
  for (const ReportRow& r : report.rows) {
    Json row;
    row["point"] = r.point;
    row["quantity"] = r.quantity;
    row["replicates"] = r.replicates;
    row["estimate"] = number_or_text(r.estimate);
    row["reference"] = number_or_text(r.reference);
    row["std_error"] = number_or_text(r.std_error);
    row["z"] = number_or_text(r.z);
    row["check"] = to_string(r.check);
    row["threshold"] = number_or_text(r.threshold);
    row["pass"] = r.pass;
    if (!r.note.empty()) row["note"] = r.note;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

const Json& Parameters::at(const std::string& name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) throw invalid_parameter("missing parameter '" + name + "'");
  return *it;
}

double Parameters::number(const std::string& name) const {
  const Json& v = at(name);
  if (!v.is_number()) throw invalid_parameter("parameter '" + name + "' must be a number");
  return v.get<double>();
}

std::size_t Parameters::count(const std::string& name) const {
  const double v = number(name);
  if (!(v >= 0.0) || v != std::floor(v)) throw invalid_parameter("parameter '" + name + "' must be a count");
  return static_cast<std::size_t>(v);
}

std::string Parameters::text(const std::string& name) const {
  const Json& v = at(name);
  if (!v.is_string()) throw invalid_parameter("parameter '" + name + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> Parameters::numbers(const std::string& name) const {
  const Json& v = at(name);
  std::vector<double> out;
  for (const Json& x : v) {
    if (!x.is_number()) throw invalid_parameter("parameter '" + name + "' must be a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::size_t> Parameters::counts(const std::string& name) const {
  std::vector<std::size_t> out;
  for (double x : numbers(name)) {
    if (!(x >= 0.0) || x != std::floor(x)) throw invalid_parameter("parameter '" + name + "' must list counts");
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

std::vector<std::string> Parameters::texts(const std::string& name) const {
  const Json& v = at(name);
  std::vector<std::string> out;
  for (const Json& x : v) {
    if (!x.is_string()) throw invalid_parameter("parameter '" + name + "' must be a list of strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

RandomSource ExperimentContext::stream(std::size_t point, std::size_t rep) const {
  return RandomSource(config_.master_seed, (static_cast<std::uint64_t>(point) << 40) | rep);
}

ReportRow proportion_row(std::string point, std::string quantity, std::size_t hits, std::size_t reps,
                         double reference, double z_limit) {
  ReportRow row;
  row.point = std::move(point);
  row.quantity = std::move(quantity);
  row.replicates = reps;
  row.estimate = static_cast<double>(hits) / static_cast<double>(reps);
  row.reference = reference;
  // Standard error under the reference probability.
  row.std_error = std::sqrt(reference * (1.0 - reference) / static_cast<double>(reps));
  row.check = Check::abs_z_le;
  row.threshold = z_limit;
  evaluate(row);
  return row;
}

ReportRow mean_row(std::string point, std::string quantity, std::span<const double> values, double reference,
                   double z_limit) {
  const Summary s = summarize(values);
  ReportRow row;
  row.point = std::move(point);
  row.quantity = std::move(quantity);
  row.replicates = s.count;
  row.estimate = s.mean;
  row.reference = reference;
  row.std_error = s.standard_error();
  row.check = Check::abs_z_le;
  row.threshold = z_limit;
  evaluate(row);
  return row;
}

ReportRow bound_row(std::string point, std::string quantity, std::span<const double> values, double bound,
                    double se_multiplier) {
  const Summary s = summarize(values);
  ReportRow row;
  row.point = std::move(point);
  row.quantity = std::move(quantity);
  row.replicates = s.count;
  row.estimate = s.mean;
  row.reference = bound;
  row.std_error = s.standard_error();
  row.check = Check::le_ref_plus_se;
  row.threshold = se_multiplier;
  evaluate(row);
  return row;
}

ReportRow value_row(std::string point, std::string quantity, double estimate, Check check, double reference,
                    double threshold, std::size_t replicates, std::string note) {
  ReportRow row;
  row.point = std::move(point);
  row.quantity = std::move(quantity);
  row.replicates = replicates;
  row.estimate = estimate;
  row.reference = reference;
  row.check = check;
  row.threshold = threshold;
  row.note = std::move(note);
  evaluate(row);
  return row;
}

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> registry = [] {
    const Json grid = Json::array({0, 0.5, 1, 2, 5, 10});
    std::vector<ExperimentInfo> r;
    r.push_back({"verify-lemma51",
                 "P(R12 at 0 = R34 at v) from the backward graph vs 2/(9 + 13 rho v + 2 rho^2 v^2)", 100000,
                 Json{{"rho_v", grid}, {"model", "hudson"}}, run_verify_lemma51});
    r.push_back({"verify-same-pair",
                 "P(R12 at 0 = R12 at v) from the backward graph and the full genome walk vs the first-event "
                 "system",
                 100000,
                 Json{{"rho_v", grid},
                      {"arms", Json::array({"arg", "walk-full"})},
                      {"model", "hudson"},
                      {"max_expected_splits", 5000}},
                 run_verify_same_pair});
    r.push_back({"compare-smc", "same-pair statistic along the genome for the walk variants", 100000,
                 Json{{"n", 4},
                      {"rho_v", Json::array({0.5, 1, 2, 5, 10})},
                      {"variants", Json::array({"full", "smc", "smc-prime", "macs(5)"})},
                      {"max_expected_splits", 5000},
                      {"deviation_sigma", 5}},
                 run_compare_smc});
    r.push_back({"verify-aux", "P(some decoupling event) in the auxiliary graph vs 2/(9 + 7 rho u + rho^2 u^2)",
                 100000,
                 Json{{"rho_u", Json::array({0, 1, 5, 20})},
                      {"union_n", Json::array({2, 3, 4})},
                      {"extreme_rho_u", 100},
                      {"extreme_limit", 0.002}},
                 run_verify_aux});
    r.push_back({"aux-independence", "independence and coalescent marginals of the auxiliary trees", 10000,
                 Json{{"n", 4}, {"rho_u", 1.0}}, run_aux_independence});
    r.push_back({"mixing", "covariance of threshold polynomials at two loci vs 2 n^4/(9 + 7 rho u + rho^2 u^2)",
                 1000000,
                 Json{{"n", 2},
                      {"rho_u", Json::array({2, 5, 10, 20, 40})},
                      {"threshold", 1.0},
                      {"slope_rho", 1.0},
                      {"slope_range", Json::array({10, 100})}},
                 run_mixing});
    r.push_back({"verify-daux", "d_aux under re-marking of fixed trees, its mean bound and conditional independence",
                 10000,
                 Json{{"n", 10},
                      {"rho", 1.0},
                      {"loci", Json::array({0.25, 0.75})},
                      {"fixed_trees", 20},
                      {"graph_replicates", 10000},
                      {"independence_replicates", 100000},
                      {"independence_loci", Json::array({0.0, 0.5, 1.0})},
                      {"height_bins", 20}},
                 run_verify_daux});
    r.push_back({"second-moment", "E[(S_2 + ... + S_N)^2] for the coalescent height", 1000000, Json{{"n", 10}},
                 run_second_moment});
    r.push_back({"tightness", "E[d_aux(T_-h, T_0) d_aux(T_0, T_h)] vs rho^2 h^2 E[height^2]", 20000,
                 Json{{"n", Json::array({5, 20})}, {"h", Json::array({0.05, 0.1, 0.2})}, {"rho", 1.0}},
                 run_tightness});
    r.push_back({"gh-linear", "mean Gromov-Hausdorff upper bound against locus separation", 10000,
                 Json{{"n", Json::array({5, 10})},
                      {"separations", Json::array({0.01, 0.02, 0.05, 0.1, 0.15, 0.2})},
                      {"rho", 1.0},
                      {"max_relative_residual", 0.15}},
                 run_gh_linear});
    r.push_back({"variation", "d_aux path variation over [0, L] against L", 10000,
                 Json{{"n", 10}, {"lengths", Json::array({0.25, 0.5, 1})}, {"rho", 1.0}, {"tolerance", 0.1}},
                 run_variation});
    r.push_back({"structure", "distinct trees, metric inequalities, ultrametricity and hand-built fixtures", 10000,
                 Json{{"n_min", 2},
                      {"n_max", 8},
                      {"rho", 1.0},
                      {"coupled_pairs", 1000},
                      {"coupled_max_n", 6},
                      {"measure_pairs", 1000},
                      {"ultrametric_trees", 10000}},
                 run_structure});
    r.push_back({"projectivity", "leaf subsampling and genome restriction of the backward graph", 100000,
                 Json{{"n", 6},
                      {"subsample", Json::array({1, 3, 5})},
                      {"rho", 1.0},
                      {"restrict_n", 5},
                      {"restrict", Json::array({0.25, 0.75})},
                      {"equality_checks", 1000}},
                 run_projectivity});
    r.push_back({"kingman-small-time", "eps times the number of lineages at depth eps", 100,
                 Json{{"n", 10000}, {"eps", 0.01}, {"center", 2.0}, {"half_width", 0.4}}, run_kingman_small_time});
    return r;
  }();
  return registry;
}

const ExperimentInfo& find_experiment(const std::string& name) {
  for (const auto& info : experiment_registry())
    if (info.name == name) return info;
  throw unknown_experiment("unknown experiment '" + name + "'");
}

namespace {

bool same_kind(const Json& expected, const Json& given) {
  if (expected.is_number()) return given.is_number();
  if (expected.is_string()) return given.is_string();
  if (expected.is_boolean()) return given.is_boolean();
  if (expected.is_array()) {
    if (!given.is_array()) return false;
    if (expected.empty()) return true;
    return std::all_of(given.begin(), given.end(), [&](const Json& x) { return same_kind(expected.front(), x); });
  }
  return false;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw io_error("failed writing " + path.string());
}

}  // namespace

Json resolve_parameters(const ExperimentInfo& info, const Json& overrides) {
  if (!overrides.is_object()) throw invalid_parameter("parameters must be a JSON object");
  Json merged = info.defaults;
  for (const auto& [key, value] : overrides.items()) {
    const auto it = merged.find(key);
    if (it == merged.end()) throw invalid_parameter("experiment " + info.name + " has no parameter '" + key + "'");
    // A single value is accepted where a list is expected.
    if (it->is_array() && !value.is_array() && same_kind(*it, Json::array({value}))) {
      *it = Json::array({value});
      continue;
    }
    if (!same_kind(*it, value))
      throw invalid_parameter("parameter '" + key + "' of " + info.name + " expects " + std::string(it->type_name()) +
                              " like " + it->dump());
    *it = value;
  }
  return merged;
}

VerificationReport run_experiment(const ExperimentConfig& config) {
  const ExperimentInfo& info = find_experiment(config.experiment);
  const Json parameters = resolve_parameters(info, config.parameters);
  if (config.workers == 0) throw invalid_parameter("workers must be at least 1");
  const std::size_t replicates = config.replicates ? config.replicates : info.default_replicates;

  if (!config.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw io_error("cannot create " + config.output_dir.string() + ": " + ec.message());
  }

  const auto start = std::chrono::steady_clock::now();
  ExperimentContext ctx(config, Parameters(parameters), replicates);
  ExperimentOutput output;
  try {
    output = info.run(ctx);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_parameter(std::string("bad parameter value: ") + e.what());
  }
  const auto stop = std::chrono::steady_clock::now();

  VerificationReport report;
  report.experiment = info.name;
  report.master_seed = config.master_seed;
  report.replicates = replicates;
  report.workers = config.workers;
  report.parameters = parameters;
  report.rows = std::move(output.rows);
  report.raw = std::move(output.raw);
  report.wall_seconds = std::chrono::duration<double>(stop - start).count();

  if (!config.output_dir.empty()) {
    write_file(config.output_dir / "report.csv", report_csv(report));
    write_file(config.output_dir / "report.json", report_to_json(report).dump(2) + "\n");
    if (config.write_raw && !report.raw.empty()) {
      const auto raw_dir = config.output_dir / "raw";
      std::error_code ec;
      std::filesystem::create_directories(raw_dir, ec);
      if (ec) throw io_error("cannot create " + raw_dir.string() + ": " + ec.message());
      for (const RawTable& table : report.raw) {
        std::ostringstream out;
        write_csv_line(out, table.header);
        for (const auto& row : table.rows) write_csv_line(out, row);
        write_file(raw_dir / (table.name + ".csv"), out.str());
      }
    }
  }
  return report;
}

}  // namespace argscape
