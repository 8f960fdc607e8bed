// Runs every acceptance criterion at its stated replicate counts and
// tolerances and prints one PASS/FAIL line per criterion.
//
//   acceptance [--out DIR] [--workers K] [--only N]
//
// Exit status 0 iff every criterion passes.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "argscape/experiment.hpp"
#include "argscape/format.hpp"

namespace fs = std::filesystem;
using namespace argscape;

namespace {

struct Criterion {
  int number;
  std::string experiment;
  std::string summary;
};

const std::vector<Criterion> kCriteria{
    {1, "verify-lemma51", "cross-pair equality probability vs closed form"},
    {2, "verify-same-pair", "same-pair equality probability, backward graph and full walk"},
    {3, "verify-aux", "decoupling probability and union bounds"},
    {4, "aux-independence", "independent marginals of the auxiliary trees"},
    {5, "verify-daux", "d_aux under re-marking and its mean bound"},
    {6, "second-moment", "second moment of the coalescent height"},
    {7, "tightness", "product of adjacent d_aux values"},
    {8, "mixing", "covariance decay and slope of the bound"},
    {9, "gh-linear", "Gromov-Hausdorff upper bound linear in separation"},
    {10, "variation", "path variation linear in interval length"},
    {11, "structure", "structural counts, inequalities and fixtures"},
    {12, "projectivity", "subsampling and genome restriction"},
    {13, "kingman-small-time", "lineage count at small depth"},
};

std::size_t failed_rows(const VerificationReport& report) {
  std::size_t failed = 0;
  for (const auto& row : report.rows) failed += !row.pass;
  return failed;
}

void print_failures(const VerificationReport& report) {
  for (const auto& row : report.rows) {
    if (row.pass) continue;
    std::cout << "    failed: " << row.point << " | " << row.quantity << " | estimate " << format_double(row.estimate)
              << " reference " << format_double(row.reference) << " check " << to_string(row.check) << " threshold "
              << format_double(row.threshold);
    if (!row.note.empty()) std::cout << " | " << row.note;
    std::cout << '\n';
  }
}

bool run_criterion(const Criterion& c, const fs::path& out, std::size_t workers) {
  ExperimentConfig config;
  config.experiment = c.experiment;
  config.workers = workers;
  if (!out.empty()) config.output_dir = out / c.experiment;
  const auto report = run_experiment(config);
  const std::size_t failed = failed_rows(report);
  const std::size_t asserted = report.assertion_count();
  std::cout << "criterion " << c.number << " [" << c.experiment << "]: " << (failed == 0 ? "PASS" : "FAIL") << " ("
            << asserted - failed << "/" << asserted << " assertions, " << c.summary << ", "
            << format_double(report.wall_seconds) << " s)\n";
  print_failures(report);
  return failed == 0;
}

// Byte-identical report.csv across repeated runs and worker counts.
bool run_determinism(std::size_t replicates) {
  const std::vector<std::string> experiments{"verify-lemma51", "verify-aux", "tightness"};
  std::size_t mismatches = 0;
  for (const auto& name : experiments) {
    ExperimentConfig config;
    config.experiment = name;
    config.replicates = replicates;
    config.workers = 1;
    const std::string first = report_csv(run_experiment(config));
    const std::string again = report_csv(run_experiment(config));
    config.workers = 8;
    const std::string parallel = report_csv(run_experiment(config));
    if (first != again) {
      ++mismatches;
      std::cout << "    " << name << ": repeated run differs\n";
    }
    if (first != parallel) {
      ++mismatches;
      std::cout << "    " << name << ": 1 vs 8 workers differ\n";
    }
  }
  std::cout << "criterion 14 [determinism]: " << (mismatches == 0 ? "PASS" : "FAIL") << " ("
            << 2 * experiments.size() - mismatches << "/" << 2 * experiments.size()
            << " comparisons identical, verify-lemma51 verify-aux tightness at " << replicates << " replicates)\n";
  return mismatches == 0;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out;
  std::size_t workers = 1;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (i + 1 < argc && arg == "--out") {
      out = argv[++i];
    } else if (i + 1 < argc && arg == "--workers") {
      workers = std::stoul(argv[++i]);
    } else if (i + 1 < argc && arg == "--only") {
      only = std::stoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--out DIR] [--workers K] [--only N]\n";
      return 2;
    }
  }
  int passed = 0, total = 0;
  try {
    for (const auto& c : kCriteria) {
      if (only && c.number != only) continue;
      ++total;
      passed += run_criterion(c, out, workers);
    }
    if (!only || only == 14) {
      ++total;
      passed += run_determinism(5000);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::cout << passed << "/" << total << " criteria pass\n";
  return passed == total ? EXIT_SUCCESS : EXIT_FAILURE;
}
