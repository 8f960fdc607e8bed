#include <cmath>
#include <string>
#include <vector>

#include "argscape/analytic.hpp"
#include "argscape/arg.hpp"
#include "argscape/coalescent.hpp"
#include "argscape/errors.hpp"
#include "argscape/experiment.hpp"
#include "argscape/format.hpp"
#include "argscape/parallel.hpp"
#include "argscape/stats.hpp"

namespace argscape {

ExperimentOutput run_second_moment(const ExperimentContext& ctx) {
  const std::size_t n = ctx.params().count("n");
  if (n < 2) throw invalid_parameter("n must be at least 2");
  const auto squares = run_replicates<double>(ctx.replicates(), ctx.workers(), [&](std::size_t r) {
    RandomSource rng = ctx.stream(0, r);
    const double h = sample_kingman(n, rng).root_time();
    return h * h;
  });
  ExperimentOutput out;
  out.rows.push_back(mean_row("n=" + std::to_string(n), "E[(S_2 + ... + S_N)^2]", squares, height_second_moment(n)));
  const double limit = height_second_moment_limit();
  const double crude = height_second_moment_crude_bound();
  out.rows.push_back(value_row("N=infinity", "exact limit 4 + 4(pi^2/3 - 3) vs 11", limit, Check::le, 11.0, 11.0));
  out.rows.push_back(value_row("N=infinity", "series bound 8(pi^2/3 - 3) + 8 vs 11", crude, Check::le, 11.0, 11.0));
  out.rows.push_back(value_row("N=infinity", "exact limit vs series bound", limit, Check::le, crude, crude));
  return out;
}

ExperimentOutput run_projectivity(const ExperimentContext& ctx) {
  const auto& p = ctx.params();
  const std::size_t n = p.count("n");
  const auto subsample = p.counts("subsample");
  const double rho = p.number("rho");
  const std::size_t restrict_n = p.count("restrict_n");
  const auto window = p.numbers("restrict");
  const std::size_t checks = p.count("equality_checks");
  if (subsample.size() < 2) throw invalid_parameter("subsample needs at least two leaves");
  for (std::size_t leaf : subsample)
    if (leaf < 1 || leaf > n) throw invalid_parameter("subsample leaves must lie in 1..n");
  if (!(rho > 0.0)) throw invalid_parameter("rho must be positive");
  if (restrict_n < 2) throw invalid_parameter("restrict_n must be at least 2");
  if (window.size() != 2 || !(window[0] >= 0.0 && window[1] > window[0] && window[1] <= 1.0))
    throw invalid_parameter("restrict must be [c, d] with 0 <= c < d <= 1");
  const std::size_t reps = ctx.replicates();
  ExperimentOutput out;

  const std::vector<Particle> pair{subsample[0], subsample[1]};
  const std::vector<Particle> triple(subsample.begin(), subsample.end());
  struct First {
    char pair_split = 0;
    char set_split = 0;
  };
  const auto firsts = run_replicates<First>(reps, ctx.workers(), [&](std::size_t r) {
    RandomSource rng = ctx.stream(0, r);
    const auto log = sample_arg(n, 0.0, 1.0, rho, rng);
    const auto a = subsample_arg(log, pair);
    const auto b = subsample_arg(log, triple);
    return First{static_cast<char>(a.events.front().type == ArgEventType::split),
                 static_cast<char>(b.events.front().type == ArgEventType::split)};
  });
  const auto direct = run_replicates<char>(reps, ctx.workers(), [&](std::size_t r) -> char {
    RandomSource rng = ctx.stream(1, r);
    return sample_arg(triple.size(), 0.0, 1.0, rho, rng).events.front().type == ArgEventType::split;
  });
  std::size_t pair_hits = 0;
  std::vector<std::size_t> sub_counts(2, 0), direct_counts(2, 0);
  for (const auto& f : firsts) {
    pair_hits += f.pair_split != 0;
    ++sub_counts[f.set_split ? 0 : 1];
  }
  for (char d : direct) ++direct_counts[d ? 0 : 1];
  const std::string label = "n=" + std::to_string(n) + " rho=" + format_double(rho);
  out.rows.push_back(proportion_row(label + " |B|=2", "P(first event of the subsample is a split)", pair_hits, reps,
                                    2 * rho / (1 + 2 * rho)));
  out.rows.push_back(value_row(label + " |B|=" + std::to_string(triple.size()),
                               "chi-square p-value of the first transition vs a direct ARG",
                               chi_square_two_sample(sub_counts, direct_counts).p_value, Check::gt, 0.0, 0.01, reps));

  const double c = window[0], d = window[1];
  const auto mismatches = run_replicates<char>(checks, ctx.workers(), [&](std::size_t r) -> char {
    RandomSource rng = ctx.stream(2, r);
    const auto log = sample_arg(restrict_n, 0.0, 1.0, rho, rng);
    const auto restricted = restrict_genome(log, c, d);
    const double u = rng.uniform(c, d);
    return !(extract_tree(restricted, u) == extract_tree(log, u));
  });
  std::size_t mismatch_count = 0;
  for (char m : mismatches) mismatch_count += m != 0;
  const std::string window_label = "n=" + std::to_string(restrict_n) + " [c,d]=[" + format_double(c) + "," +
                                   format_double(d) + "]";
  out.rows.push_back(value_row(window_label, "extracted trees differing after restriction",
                               static_cast<double>(mismatch_count), Check::eq, 0.0, 0.0, checks));

  const auto restricted_splits = run_replicates<double>(reps, ctx.workers(), [&](std::size_t r) {
    RandomSource rng = ctx.stream(3, r);
    return static_cast<double>(restrict_genome(sample_arg(restrict_n, 0.0, 1.0, rho, rng), c, d).split_count());
  });
  const auto direct_splits = run_replicates<double>(reps, ctx.workers(), [&](std::size_t r) {
    RandomSource rng = ctx.stream(4, r);
    return static_cast<double>(sample_arg(restrict_n, c, d, rho, rng).split_count());
  });
  out.rows.push_back(mean_row(window_label, "mean split count of the restricted ARG", restricted_splits,
                              expected_split_count(restrict_n, rho * (d - c))));
  const Summary rs = summarize(restricted_splits), ds = summarize(direct_splits);
  ReportRow diff;
  diff.point = window_label;
  diff.quantity = "restricted minus direct mean split count";
  diff.replicates = reps;
  diff.estimate = rs.mean - ds.mean;
  diff.reference = 0.0;
  diff.std_error = std::hypot(rs.standard_error(), ds.standard_error());
  diff.check = Check::abs_z_le;
  diff.threshold = 3.0;
  evaluate(diff);
  out.rows.push_back(diff);
  return out;
}

ExperimentOutput run_kingman_small_time(const ExperimentContext& ctx) {
  const std::size_t n = ctx.params().count("n");
  const double eps = ctx.params().number("eps");
  const double center = ctx.params().number("center");
  const double half_width = ctx.params().number("half_width");
  if (n < 2) throw invalid_parameter("n must be at least 2");
  if (!(eps > 0.0)) throw invalid_parameter("eps must be positive");
  const auto values = run_replicates<double>(ctx.replicates(), ctx.workers(), [&](std::size_t r) {
    RandomSource rng = ctx.stream(0, r);
    return eps * static_cast<double>(lineage_count_at_depth(sample_kingman(n, rng), eps));
  });
  const Summary s = summarize(values);
  ReportRow row = value_row("n=" + std::to_string(n) + " eps=" + format_double(eps),
                            "mean eps * lineages alive at depth eps", s.mean, Check::abs_diff_le, center, half_width,
                            s.count);
  row.std_error = s.standard_error();
  ExperimentOutput out;
  out.rows.push_back(row);
  return out;
}

}  // namespace argscape
