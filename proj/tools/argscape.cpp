#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "argscape/arg.hpp"
#include "argscape/errors.hpp"
#include "argscape/experiment.hpp"
#include "argscape/format.hpp"
#include "argscape/newick.hpp"
#include "argscape/serialize.hpp"
#include "argscape/tree_path.hpp"
#include "argscape/walk.hpp"

namespace fs = std::filesystem;
using namespace argscape;

namespace {

constexpr int kExitAssertions = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitInvalid = 3;
constexpr int kExitIo = 4;
constexpr int kExitOther = 5;

// "--rho-v 1,2" style value: JSON if it parses, otherwise a comma list of
// numbers or strings, otherwise the raw string.
Json parse_value(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error&) {
  }
  if (text.find(',') == std::string::npos) return text;
  Json list = Json::array();
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      list.push_back(Json::parse(item));
    } catch (const Json::parse_error&) {
      list.push_back(item);
    }
  }
  return list;
}

std::string parameter_name(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

// Leftover "--key value" or "--key=value" pairs become parameter overrides.
Json parse_extras(const std::vector<std::string>& extras) {
  Json out = Json::object();
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() <= 2) throw invalid_parameter("unexpected argument '" + arg + "'");
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      out[parameter_name(arg.substr(2, eq - 2))] = parse_value(arg.substr(eq + 1));
      continue;
    }
    if (i + 1 >= extras.size()) throw invalid_parameter("missing value for '" + arg + "'");
    out[parameter_name(arg.substr(2))] = parse_value(extras[++i]);
  }
  return out;
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw invalid_parameter("config " + path.string() + ": " + e.what());
  }
}

std::uint64_t parse_seed(const std::string& text, const std::string& origin) {
  try {
    std::size_t used = 0;
    const unsigned long long value = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw invalid_parameter(origin + " must be a non-negative integer, got '" + text + "'");
  }
}

struct RunOptions {
  std::string experiment;
  std::string seed;
  std::size_t replicates = 0;
  std::size_t workers = 0;
  std::string out;
  std::string config;
  bool raw = false;
};

ExperimentConfig build_config(const RunOptions& opts, const std::vector<std::string>& extras) {
  ExperimentConfig config;
  Json parameters = Json::object();
  if (!opts.config.empty()) {
    const Json file = read_json_file(opts.config);
    if (!file.is_object()) throw invalid_parameter("config file must hold a JSON object");
    try {
      config.experiment = file.value("experiment", std::string());
      config.master_seed = file.value("master_seed", kDefaultMasterSeed);
      config.replicates = file.value("replicates", std::size_t{0});
      config.workers = file.value("workers", std::size_t{1});
      config.write_raw = file.value("raw", false);
      config.output_dir = file.value("output_dir", std::string());
      if (file.contains("parameters")) parameters = file.at("parameters");
    } catch (const Json::exception& e) {
      throw invalid_parameter(std::string("config file: ") + e.what());
    }
  }
  if (!opts.experiment.empty()) config.experiment = opts.experiment;
  if (config.experiment.empty()) throw invalid_parameter("no experiment given");
  if (const char* env = std::getenv("ARGSCAPE_SEED"); env && *env)
    config.master_seed = parse_seed(env, "ARGSCAPE_SEED");
  if (!opts.seed.empty()) config.master_seed = parse_seed(opts.seed, "--seed");
  if (opts.replicates) config.replicates = opts.replicates;
  if (opts.workers) config.workers = opts.workers;
  if (!opts.out.empty()) config.output_dir = opts.out;
  if (opts.raw) config.write_raw = true;
  const Json overrides = parse_extras(extras);
  for (const auto& [key, value] : overrides.items()) parameters[key] = value;
  config.parameters = parameters;
  return config;
}

void print_report(const VerificationReport& report) {
  std::cout << "experiment " << report.experiment << " seed " << report.master_seed << " replicates "
            << report.replicates << " workers " << report.workers << '\n';
  for (const auto& row : report.rows) {
    std::cout << (row.check == Check::info ? "info" : row.pass ? "PASS" : "FAIL") << "  " << row.point << "  "
              << row.quantity << "  estimate=" << format_double(row.estimate);
    if (row.check != Check::info && row.check != Check::not_run)
      std::cout << " reference=" << format_double(row.reference) << " check=" << to_string(row.check)
                << " threshold=" << format_double(row.threshold);
    if (row.std_error > 0.0 && row.check != Check::info) std::cout << " se=" << format_double(row.std_error) << " z=" << format_double(row.z);
    if (!row.note.empty()) std::cout << "  (" << row.note << ")";
    std::cout << '\n';
  }
  std::size_t failed = 0;
  for (const auto& row : report.rows) failed += !row.pass;
  std::cout << (report.all_pass() ? "all " : "") << report.assertion_count() - failed << "/"
            << report.assertion_count() << " assertions pass, wall " << format_double(report.wall_seconds) << " s\n";
}

struct SimulateOptions {
  std::size_t n = 5;
  double rho = 1.0;
  std::string genome = "0:1";
  std::string seed;
  std::string model = "griffiths";
  std::string variant = "full";
  std::string out;
};

std::pair<double, double> parse_genome(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw invalid_parameter("genome must be a:b, got '" + text + "'");
  double a = 0.0, b = 0.0;
  try {
    a = std::stod(text.substr(0, colon));
    b = std::stod(text.substr(colon + 1));
  } catch (const std::logic_error&) {
    throw invalid_parameter("genome must be a:b with numbers, got '" + text + "'");
  }
  if (!(b > a)) throw invalid_parameter("genome needs a < b, got '" + text + "'");
  return {a, b};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  out << content;
  if (!out) throw io_error("failed writing " + path.string());
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create " + dir.string() + ": " + ec.message());
}

void write_trees(const fs::path& dir, const TreePath& path) {
  make_dirs(dir / "trees");
  std::string all;
  for (std::size_t i = 0; i < path.trees.size(); ++i) all += newick_encode(path.trees[i]) + "\n";
  write_file(dir / "trees" / "trees.nwk", all);
}

void print_summary(const ArgEventLog& log, const TreePath& path) {
  const auto counts = particle_counts(log);
  std::cout << "max particles " << *std::max_element(counts.begin(), counts.end()) << '\n';
  std::cout << "splits " << log.split_count() << '\n';
  std::cout << "breakpoints " << path.breakpoints.size();
  for (double b : path.breakpoints) std::cout << ' ' << format_double(b);
  std::cout << "\ntrees " << path.trees.size() << '\n';
}

std::uint64_t simulate_seed(const SimulateOptions& opts) {
  std::uint64_t seed = kDefaultMasterSeed;
  if (const char* env = std::getenv("ARGSCAPE_SEED"); env && *env) seed = parse_seed(env, "ARGSCAPE_SEED");
  if (!opts.seed.empty()) seed = parse_seed(opts.seed, "--seed");
  return seed;
}

void check_simulate(const SimulateOptions& opts) {
  if (opts.n < 1) throw invalid_parameter("n must be at least 1");
  if (!(opts.rho > 0.0) || !std::isfinite(opts.rho))
    throw invalid_parameter("rho must be > 0; use a tiny value such as 1e-12 for the no-recombination limit");
}

void simulate_arg(const SimulateOptions& opts) {
  check_simulate(opts);
  const auto [a, b] = parse_genome(opts.genome);
  ArgModel model;
  if (opts.model == "griffiths")
    model = ArgModel::griffiths;
  else if (opts.model == "hudson")
    model = ArgModel::hudson;
  else
    throw invalid_parameter("model must be griffiths or hudson");
  RandomSource rng(simulate_seed(opts), 0);
  auto sampled = sample_arg(model, opts.n, a, b, opts.rho, rng);
  sampled.seed = rng.master_seed();
  auto log = std::make_shared<const ArgEventLog>(std::move(sampled));
  const auto path = tree_path(log, all_leaves(*log));
  print_summary(*log, path);
  if (opts.out.empty()) return;
  const fs::path dir = opts.out;
  make_dirs(dir / "logs");
  write_file(dir / "logs" / "arg.jsonl", arg_to_jsonl(*log));
  write_trees(dir, path);
  write_file(dir / "tree_path.json", tree_path_to_json(path) + "\n");
}

void simulate_walk(const SimulateOptions& opts) {
  check_simulate(opts);
  const auto [a, b] = parse_genome(opts.genome);
  WalkVariant variant;
  try {
    variant = WalkVariant::parse(opts.variant);
  } catch (const std::invalid_argument& e) {
    throw invalid_parameter(e.what());
  }
  RandomSource rng(simulate_seed(opts), 0);
  const auto walk = sample_walk(opts.n, a, b, opts.rho, variant, rng);
  print_summary(*walk.graph, walk.path);
  if (opts.out.empty()) return;
  const fs::path dir = opts.out;
  make_dirs(dir / "logs");
  write_file(dir / "logs" / "walk_graph.jsonl", arg_to_jsonl(*walk.graph));
  write_trees(dir, walk.path);
  write_file(dir / "tree_path.json", tree_path_to_json(walk.path) + "\n");
}

void add_simulate_options(CLI::App* cmd, SimulateOptions& opts) {
  cmd->add_option("--n", opts.n, "Number of leaves")->capture_default_str();
  cmd->add_option("--rho", opts.rho, "Recombination rate per unit genome length (> 0)")->capture_default_str();
  cmd->add_option("--genome", opts.genome, "Genome interval a:b")->capture_default_str();
  cmd->add_option("--seed", opts.seed, "Master seed (default 20240917 or ARGSCAPE_SEED)");
  cmd->add_option("--out", opts.out, "Output directory; nothing is written without it");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ancestral recombination graph simulation and verification experiments"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List experiments with their default parameters");

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a verification experiment; extra --name value pairs set parameters");
  run_cmd->add_option("experiment", run.experiment, "Experiment name (see 'list')");
  run_cmd->add_option("--seed", run.seed, "Master seed (overrides ARGSCAPE_SEED and the config file)");
  run_cmd->add_option("--replicates", run.replicates, "Replicates per point (default: the experiment's)");
  run_cmd->add_option("--workers", run.workers, "Worker threads");
  run_cmd->add_option("--out", run.out, "Output directory for report.csv, report.json and raw/");
  run_cmd->add_option("--config", run.config, "JSON config file");
  run_cmd->add_flag("--raw", run.raw, "Also write per-replicate CSV tables");
  run_cmd->allow_extras();

  auto* sim = app.add_subcommand("simulate", "Simulate one graph or genome walk and write it out");
  sim->require_subcommand(1);
  SimulateOptions arg_opts, walk_opts;
  auto* sim_arg = sim->add_subcommand("arg", "Backward-in-time graph");
  add_simulate_options(sim_arg, arg_opts);
  sim_arg->add_option("--model", arg_opts.model, "griffiths or hudson")->capture_default_str();
  auto* sim_walk = sim->add_subcommand("walk", "Forward walk along the genome");
  add_simulate_options(sim_walk, walk_opts);
  sim_walk->add_option("--variant", walk_opts.variant, "full, smc, smc-prime or macs(k)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (list->parsed()) {
      for (const auto& info : experiment_registry()) {
        std::cout << info.name << "  (" << info.default_replicates << " replicates)  " << info.description << '\n';
        std::cout << "    " << info.defaults.dump() << '\n';
      }
      return 0;
    }
    if (run_cmd->parsed()) {
      const auto config = build_config(run, run_cmd->remaining());
      const auto report = run_experiment(config);
      print_report(report);
      return report.all_pass() ? 0 : kExitAssertions;
    }
    if (sim_arg->parsed()) {
      simulate_arg(arg_opts);
      return 0;
    }
    if (sim_walk->parsed()) {
      simulate_walk(walk_opts);
      return 0;
    }
  } catch (const unknown_experiment& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnknown;
  } catch (const invalid_parameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return 0;
}
