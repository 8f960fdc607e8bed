#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "argscape/analytic.hpp"
#include "argscape/arg.hpp"
#include "argscape/errors.hpp"
#include "argscape/experiment.hpp"
#include "argscape/format.hpp"
#include "argscape/parallel.hpp"
#include "argscape/walk.hpp"

namespace argscape {

namespace {

// Genome and loci realising a recombination distance rho*v. Zero distance
// reads both trees at the same locus.
struct TwoLoci {
  double a = 0.0;
  double b = 1.0;
  double rho = 1.0;
  double v = 1.0;
};

TwoLoci two_loci(double rho_v) {
  if (rho_v < 0.0) throw invalid_parameter("rho_v must be non-negative");
  if (rho_v == 0.0) return {0.0, 1.0, 1.0, 0.0};
  return {0.0, 1.0, rho_v, 1.0};
}

ArgModel parse_model(const std::string& text) {
  if (text == "griffiths") return ArgModel::griffiths;
  if (text == "hudson") return ArgModel::hudson;
  throw invalid_parameter("model must be griffiths or hudson, got '" + text + "'");
}

std::string point_label(const std::string& name, double value) { return name + "=" + format_double(value); }

std::size_t count_hits(const std::vector<char>& hits) {
  std::size_t total = 0;
  for (char h : hits) total += h != 0;
  return total;
}

void add_raw_hits(ExperimentOutput& out, const ExperimentContext& ctx, const std::string& table,
                  const std::string& point, const std::vector<char>& hits) {
  if (!ctx.write_raw()) return;
  RawTable* target = nullptr;
  for (auto& t : out.raw)
    if (t.name == table) target = &t;
  if (!target) {
    out.raw.push_back({table, {"point", "replicate", "hit"}, {}});
    target = &out.raw.back();
  }
  for (std::size_t r = 0; r < hits.size(); ++r)
    target->rows.push_back({point, std::to_string(r), hits[r] ? "1" : "0"});
}

const std::vector<Particle> kFirstPair{1, 2};
const std::vector<Particle> kSecondPair{3, 4};

// Same-pair indicator for a genome walk of n leaves.
std::vector<char> walk_same_pair(const ExperimentContext& ctx, std::size_t point, std::size_t n,
                                 const TwoLoci& loci, WalkVariant variant) {
  return run_replicates<char>(ctx.replicates(), ctx.workers(), [&](std::size_t r) -> char {
    RandomSource rng = ctx.stream(point, r);
    const auto walk = sample_walk(n, loci.a, loci.b, loci.rho, variant, rng);
    return walk.path.at(loci.a).mrca_node(0, 1) == walk.path.at(loci.a + loci.v).mrca_node(0, 1);
  });
}

ReportRow not_run_row(std::string point, std::string quantity, double expected_splits, double limit) {
  return value_row(std::move(point), std::move(quantity), std::nan(""), Check::not_run, 0.0, 0.0, 0,
                   "not run: the full walk builds the whole graph, expected " + format_double(expected_splits) +
                       " splits per replicate exceeds the limit " + format_double(limit));
}

}  // namespace

ExperimentOutput run_verify_lemma51(const ExperimentContext& ctx) {
  const auto grid = ctx.params().numbers("rho_v");
  const ArgModel model = parse_model(ctx.params().text("model"));
  ExperimentOutput out;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const TwoLoci loci = two_loci(grid[p]);
    const auto hits = run_replicates<char>(ctx.replicates(), ctx.workers(), [&](std::size_t r) -> char {
      RandomSource rng = ctx.stream(p, r);
      const auto log = sample_arg(model, 4, loci.a, loci.b, loci.rho, rng);
      return extract_tree(log, kFirstPair, loci.a).root_node() ==
             extract_tree(log, kSecondPair, loci.a + loci.v).root_node();
    });
    const std::string point = point_label("rho_v", grid[p]);
    out.rows.push_back(proportion_row(point, "P(R12_0 = R34_v)", count_hits(hits), hits.size(),
                                      prob_equal_cross_pair(grid[p])));
    add_raw_hits(out, ctx, "cross_pair", point, hits);
  }
  return out;
}

ExperimentOutput run_verify_same_pair(const ExperimentContext& ctx) {
  const auto grid = ctx.params().numbers("rho_v");
  const auto arms = ctx.params().texts("arms");
  const ArgModel model = parse_model(ctx.params().text("model"));
  const double limit = ctx.params().number("max_expected_splits");
  ExperimentOutput out;
  for (std::size_t arm = 0; arm < arms.size(); ++arm) {
    if (arms[arm] != "arg" && arms[arm] != "walk-full")
      throw invalid_parameter("arms must be 'arg' or 'walk-full', got '" + arms[arm] + "'");
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const TwoLoci loci = two_loci(grid[p]);
      const std::string point = arms[arm] + " " + point_label("rho_v", grid[p]);
      const std::string quantity = "P(R12_0 = R12_v)";
      const std::size_t stream_point = arm * grid.size() + p;
      std::vector<char> hits;
      if (arms[arm] == "arg") {
        hits = run_replicates<char>(ctx.replicates(), ctx.workers(), [&](std::size_t r) -> char {
          RandomSource rng = ctx.stream(stream_point, r);
          const auto log = sample_arg(model, 4, loci.a, loci.b, loci.rho, rng);
          return extract_tree(log, kFirstPair, loci.a).root_node() ==
                 extract_tree(log, kFirstPair, loci.a + loci.v).root_node();
        });
      } else {
        const double expected = expected_split_count(4, loci.rho * (loci.b - loci.a));
        if (expected > limit) {
          out.rows.push_back(not_run_row(point, quantity, expected, limit));
          continue;
        }
        hits = walk_same_pair(ctx, stream_point, 4, loci, WalkVariant::full());
      }
      out.rows.push_back(
          proportion_row(point, quantity, count_hits(hits), hits.size(), prob_equal_same_pair(grid[p])));
      add_raw_hits(out, ctx, "same_pair", point, hits);
    }
  }
  return out;
}

ExperimentOutput run_compare_smc(const ExperimentContext& ctx) {
  const std::size_t n = ctx.params().count("n");
  if (n < 2) throw invalid_parameter("n must be at least 2");
  const auto grid = ctx.params().numbers("rho_v");
  const auto names = ctx.params().texts("variants");
  const double limit = ctx.params().number("max_expected_splits");
  const double sigma = ctx.params().number("deviation_sigma");
  double largest = 0.0;
  for (double g : grid) {
    if (!(g > 0.0)) throw invalid_parameter("compare-smc needs positive rho_v values");
    largest = std::max(largest, g);
  }
  ExperimentOutput out;
  for (std::size_t k = 0; k < names.size(); ++k) {
    WalkVariant variant;
    try {
      variant = WalkVariant::parse(names[k]);
    } catch (const std::invalid_argument& e) {
      throw invalid_parameter(e.what());
    }
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const TwoLoci loci = two_loci(grid[p]);
      const std::string point = variant.name() + " " + point_label("rho_v", grid[p]);
      const std::string quantity = "P(R12_0 = R12_v)";
      const bool full = variant.kind == WalkVariant::Kind::full;
      if (full) {
        const double expected = expected_split_count(n, loci.rho * (loci.b - loci.a));
        if (expected > limit) {
          ReportRow row = not_run_row(point, quantity, expected, limit);
          // The analytic value is the reference here, so a skipped full arm
          // does not invalidate the comparison.
          row.check = Check::info;
          evaluate(row);
          out.rows.push_back(row);
          continue;
        }
      }
      const auto hits = walk_same_pair(ctx, k * grid.size() + p, n, loci, variant);
      ReportRow row = proportion_row(point, quantity, count_hits(hits), hits.size(), prob_equal_same_pair(grid[p]));
      if (!full) {
        row.check = Check::info;
        evaluate(row);
      }
      out.rows.push_back(row);
      if (variant.kind == WalkVariant::Kind::smc && grid[p] == largest) {
        ReportRow deviation = row;
        deviation.quantity = "deviation from the graph value";
        deviation.check = Check::abs_z_gt;
        deviation.threshold = sigma;
        evaluate(deviation);
        out.rows.push_back(deviation);
      }
      add_raw_hits(out, ctx, "same_pair", point, hits);
    }
  }
  return out;
}

}  // namespace argscape
