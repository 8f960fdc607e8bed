#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "argscape/analytic.hpp"
#include "argscape/arg.hpp"
#include "argscape/coalescent.hpp"
#include "argscape/errors.hpp"
#include "argscape/experiment.hpp"
#include "argscape/fixtures.hpp"
#include "argscape/format.hpp"
#include "argscape/metrics.hpp"
#include "argscape/parallel.hpp"
#include "argscape/stats.hpp"
#include "argscape/tree_path.hpp"

namespace argscape {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) throw invalid_parameter(std::string(name) + " must be positive");
}

void require_leaves(std::size_t n, const char* name) {
  if (n < 2) throw invalid_parameter(std::string(name) + " must be at least 2");
}

std::string n_label(std::size_t n) { return "n=" + std::to_string(n); }

// Residuals of x and y about their bin means, bins given per replicate.
double binned_residual_correlation(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::vector<std::size_t>& bin, std::size_t bins) {
  std::vector<double> sx(bins, 0.0), sy(bins, 0.0), count(bins, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx[bin[i]] += x[i];
    sy[bin[i]] += y[i];
    count[bin[i]] += 1.0;
  }
  std::vector<double> rx(x.size()), ry(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    rx[i] = x[i] - sx[bin[i]] / count[bin[i]];
    ry[i] = y[i] - sy[bin[i]] / count[bin[i]];
  }
  return correlation(rx, ry);
}

}  // namespace

ExperimentOutput run_verify_daux(const ExperimentContext& ctx) {
  const auto& p = ctx.params();
  const std::size_t n = p.count("n");
  const double rho = p.number("rho");
  const auto loci = p.numbers("loci");
  const std::size_t fixed_trees = p.count("fixed_trees");
  const std::size_t graph_reps = p.count("graph_replicates");
  const std::size_t indep_reps = p.count("independence_replicates");
  const auto triple = p.numbers("independence_loci");
  const std::size_t bins = p.count("height_bins");
  require_leaves(n, "n");
  require_positive(rho, "rho");
  if (loci.size() != 2 || !(loci[0] >= 0.0 && loci[1] > loci[0] && loci[1] <= 1.0))
    throw invalid_parameter("loci must be [u, v] with 0 <= u < v <= 1");
  if (triple.size() != 3 || !(triple[0] < triple[1] && triple[1] < triple[2]))
    throw invalid_parameter("independence_loci must be increasing [u, v, w]");
  if (graph_reps < 2 || indep_reps < 2 || bins < 1) throw invalid_parameter("replicate counts must be at least 2");
  const double u = loci[0], v = loci[1], delta = v - u;
  ExperimentOutput out;

  // Re-marking fixed trees: marks on the genome [0, 1].
  for (std::size_t t = 0; t < fixed_trees; ++t) {
    RandomSource tree_rng = ctx.stream(0, t);
    const auto tree = sample_kingman(n, tree_rng);
    const auto values = run_replicates<double>(ctx.replicates(), ctx.workers(), [&](std::size_t r) {
      RandomSource rng = ctx.stream(1 + t, r);
      const auto marks = sample_branch_marks(tree, rho, 0.0, 1.0, rng);
      return d_aux(tree, marks, u, v);
    });
    out.rows.push_back(mean_row("tree " + std::to_string(t) + " height=" + format_double(tree.root_time()),
                                "mean d_aux over re-marking vs 1 - exp(-rho delta L)", values,
                                1.0 - std::exp(-rho * delta * tree.root_time())));
  }

  // Unconditional mean on the backward graph.
  const std::size_t graph_point = 1 + fixed_trees;
  struct GraphSample {
    double d = 0.0;
    double height = 0.0;
  };
  const auto graph = run_replicates<GraphSample>(graph_reps, ctx.workers(), [&](std::size_t r) {
    RandomSource rng = ctx.stream(graph_point, r);
    auto log = std::make_shared<const ArgEventLog>(sample_arg(n, 0.0, 1.0, rho, rng));
    const auto pair = make_coupled_pair(log, u, v);
    return GraphSample{d_aux(pair), pair.tree_u.root_time()};
  });
  std::vector<double> d_values, centred;
  for (const auto& g : graph) {
    d_values.push_back(g.d);
    centred.push_back(g.d - (1.0 - std::exp(-rho * delta * g.height)));
  }
  const std::string graph_label = n_label(n) + " rho=" + format_double(rho) + " delta=" + format_double(delta);
  out.rows.push_back(bound_row(graph_label, "mean d_aux vs rho delta E[height]", d_values,
                               rho * delta * expected_height(n)));
  out.rows.push_back(mean_row(graph_label, "mean of d_aux - (1 - exp(-rho delta height))", centred, 0.0));

  // Conditional independence of the two cuts relative to the middle tree.
  const double a = triple.front(), b = triple.back(), mid = triple[1];
  struct Cuts {
    double left = 0.0, right = 0.0, height = 0.0;
  };
  const auto cuts = run_replicates<Cuts>(indep_reps, ctx.workers(), [&](std::size_t r) {
    RandomSource rng = ctx.stream(graph_point + 1, r);
    const auto log = sample_arg(n, a, b, rho, rng);
    const auto leaves = all_leaves(log);
    const auto tree = extract_tree(log, leaves, mid);
    const auto marks = path_marks(log, leaves, mid);
    return Cuts{d_aux(tree, marks, a, mid), d_aux(tree, marks, mid, b), tree.root_time()};
  });
  std::vector<double> left, right, heights;
  std::vector<double> left_res, right_res;
  for (const auto& c : cuts) {
    left.push_back(c.left);
    right.push_back(c.right);
    heights.push_back(c.height);
    left_res.push_back(c.left - (1.0 - std::exp(-rho * (mid - a) * c.height)));
    right_res.push_back(c.right - (1.0 - std::exp(-rho * (b - mid) * c.height)));
  }
  std::vector<double> sorted = heights;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> bin(heights.size());
  for (std::size_t i = 0; i < heights.size(); ++i) {
    const auto rank = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), heights[i]) -
                                               sorted.begin());
    bin[i] = std::min(bins - 1, rank * bins / heights.size());
  }
  const double limit = 3.0 / std::sqrt(static_cast<double>(indep_reps));
  const std::string indep_label = n_label(n) + " loci=" + format_double(a) + "," + format_double(mid) + "," +
                                  format_double(b);
  out.rows.push_back(value_row(indep_label, "correlation of d_aux(v->u) and d_aux(v->w) about 1 - exp(-rho delta L)",
                               correlation(left_res, right_res), Check::abs_diff_le, 0.0, limit, indep_reps));
  out.rows.push_back(value_row(indep_label,
                               "correlation of d_aux(v->u) and d_aux(v->w) within " + std::to_string(bins) +
                                   " height bins",
                               binned_residual_correlation(left, right, bin, bins), Check::info, 0.0, limit,
                               indep_reps, "bin means leave a small positive term from the height spread"));
  out.rows.push_back(value_row(indep_label, "unconditional correlation", correlation(left, right), Check::info, 0.0,
                               0.0, indep_reps));
  return out;
}

ExperimentOutput run_tightness(const ExperimentContext& ctx) {
  const auto sizes = ctx.params().counts("n");
  const auto hs = ctx.params().numbers("h");
  const double rho = ctx.params().number("rho");
  require_positive(rho, "rho");
  ExperimentOutput out;
  std::size_t point = 0;
  for (std::size_t n : sizes) {
    require_leaves(n, "n");
    for (double h : hs) {
      require_positive(h, "h");
      const auto products = run_replicates<double>(ctx.replicates(), ctx.workers(), [&](std::size_t r) {
        RandomSource rng = ctx.stream(point, r);
        const auto log = sample_arg(n, -h, h, rho, rng);
        const auto leaves = all_leaves(log);
        const auto tree = extract_tree(log, leaves, 0.0);
        const auto marks = path_marks(log, leaves, 0.0);
        return d_aux(tree, marks, -h, 0.0) * d_aux(tree, marks, 0.0, h);
      });
      ++point;
      const auto rhs = tightness_rhs(rho, h, n);
      const std::string label = n_label(n) + " h=" + format_double(h);
      out.rows.push_back(
          bound_row(label, "E[d_aux(T_-h,T_0) d_aux(T_0,T_h)] vs rho^2 h^2 E[height^2]", products, rhs.squared_form));
      const Summary s = summarize(products);
      out.rows.push_back(value_row(label, "printed form 11 rho h^2", s.mean, Check::info, rhs.printed_form, 0.0,
                                   s.count, s.mean <= rhs.printed_form ? "estimate below" : "estimate above"));
    }
  }
  return out;
}

ExperimentOutput run_gh_linear(const ExperimentContext& ctx) {
  const auto sizes = ctx.params().counts("n");
  auto seps = ctx.params().numbers("separations");
  const double rho = ctx.params().number("rho");
  const double max_residual = ctx.params().number("max_relative_residual");
  require_positive(rho, "rho");
  if (seps.empty()) throw invalid_parameter("separations must not be empty");
  for (double s : seps) require_positive(s, "separations");
  const double span = *std::max_element(seps.begin(), seps.end());
  ExperimentOutput out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::size_t n = sizes[i];
    require_leaves(n, "n");
    // One graph per replicate; every separation is read off the same graph.
    const auto uppers = run_replicates<std::vector<double>>(ctx.replicates(), ctx.workers(), [&](std::size_t r) {
      RandomSource rng = ctx.stream(i, r);
      auto log = std::make_shared<const ArgEventLog>(sample_arg(n, 0.0, span, rho, rng));
      std::vector<double> row;
      for (double s : seps) row.push_back(gh_bounds(make_coupled_pair(log, 0.0, s)).upper);
      return row;
    });
    std::vector<double> x, y;
    for (std::size_t k = 0; k < seps.size(); ++k) {
      std::vector<double> column;
      for (const auto& u : uppers) column.push_back(u[k]);
      const Summary s = summarize(column);
      x.push_back(rho * seps[k]);
      y.push_back(s.mean);
      ReportRow row = value_row(n_label(n) + " separation=" + format_double(seps[k]), "mean gh upper bound",
                                s.mean, Check::info, 0.0, 0.0, s.count);
      row.std_error = s.standard_error();
      out.rows.push_back(row);
    }
    const double slope = slope_through_origin(x, y);
    double res = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      res += (y[k] - slope * x[k]) * (y[k] - slope * x[k]);
      norm += y[k] * y[k];
    }
    const double relative = norm > 0.0 ? std::sqrt(res / norm) : 0.0;
    out.rows.push_back(value_row(n_label(n), "relative residual of the fit through the origin", relative, Check::le,
                                 0.0, max_residual, ctx.replicates()));
    out.rows.push_back(value_row(n_label(n), "fitted slope c in E[upper] = c rho (v - u)", slope, Check::finite, 0.0,
                                 0.0, ctx.replicates()));
  }
  return out;
}

ExperimentOutput run_variation(const ExperimentContext& ctx) {
  const std::size_t n = ctx.params().count("n");
  const auto lengths = ctx.params().numbers("lengths");
  const double rho = ctx.params().number("rho");
  const double tolerance = ctx.params().number("tolerance");
  require_leaves(n, "n");
  require_positive(rho, "rho");
  if (lengths.empty()) throw invalid_parameter("lengths must not be empty");
  for (double l : lengths) require_positive(l, "lengths");
  const double span = *std::max_element(lengths.begin(), lengths.end());
  // Nested intervals [0, L] of one path per replicate.
  const auto variations = run_replicates<std::vector<double>>(ctx.replicates(), ctx.workers(), [&](std::size_t r) {
    RandomSource rng = ctx.stream(0, r);
    auto log = std::make_shared<const ArgEventLog>(sample_arg(n, 0.0, span, rho, rng));
    const auto path = tree_path(log, all_leaves(*log));
    std::vector<double> row;
    for (double l : lengths) row.push_back(path_variation(path.restrict(0.0, l), PathDistance::d_aux_chain));
    return row;
  });
  ExperimentOutput out;
  std::vector<double> ratios;
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    std::vector<double> column;
    for (const auto& v : variations) column.push_back(v[k] / lengths[k]);
    const Summary s = summarize(column);
    ratios.push_back(s.mean);
    ReportRow row = value_row(n_label(n) + " L=" + format_double(lengths[k]), "mean variation / L", s.mean,
                              Check::info, 0.0, 0.0, s.count);
    row.std_error = s.standard_error();
    out.rows.push_back(row);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
  out.rows.push_back(value_row(n_label(n), "(max - min) / mean of variation / L", (*hi - *lo) / mean, Check::le, 0.0,
                               tolerance, ctx.replicates()));
  return out;
}

namespace {

DistanceMatrix matrix_from(const std::vector<std::vector<double>>& entries) {
  DistanceMatrix m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = i + 1; j < entries.size(); ++j) m.set(i, j, entries[i][j]);
  return m;
}

}  // namespace

ExperimentOutput run_structure(const ExperimentContext& ctx) {
  const auto& p = ctx.params();
  const std::size_t n_min = p.count("n_min"), n_max = p.count("n_max");
  const double rho = p.number("rho");
  const std::size_t coupled = p.count("coupled_pairs"), coupled_max = p.count("coupled_max_n");
  const std::size_t measures = p.count("measure_pairs"), ultra = p.count("ultrametric_trees");
  require_leaves(n_min, "n_min");
  if (n_max < n_min) throw invalid_parameter("n_max must be at least n_min");
  require_positive(rho, "rho");
  require_leaves(coupled_max, "coupled_max_n");
  if (coupled_max > kGtvExactMaxPoints)
    throw invalid_parameter("coupled_max_n must be at most " + std::to_string(kGtvExactMaxPoints));
  ExperimentOutput out;
  const std::string range = "n in [" + std::to_string(n_min) + "," + std::to_string(n_max) + "]";

  struct Count {
    std::size_t splits = 0, trees = 0;
  };
  const auto counts = run_replicates<Count>(ctx.replicates(), ctx.workers(), [&](std::size_t r) {
    RandomSource rng = ctx.stream(0, r);
    const std::size_t n = n_min + rng.index(n_max - n_min + 1);
    const auto c = distinct_tree_count(sample_arg(n, 0.0, 1.0, rho, rng));
    return Count{c.splits, c.trees};
  });
  std::size_t over = 0, with_splits = 0, single = 0;
  for (const auto& c : counts) {
    over += c.trees > c.splits + 1;
    with_splits += c.splits > 0;
    single += c.splits > 0 && c.trees == 1;
  }
  out.rows.push_back(value_row(range, "ARGs with more than R+1 distinct trees", static_cast<double>(over), Check::eq,
                               0.0, 0.0, counts.size()));
  out.rows.push_back(value_row(range, "ARGs with splits but a single tree", static_cast<double>(single), Check::info,
                               0.0, 0.0, counts.size(),
                               "out of " + std::to_string(with_splits) + " ARGs with at least one split"));

  const auto gtv_violations = run_replicates<char>(coupled, ctx.workers(), [&](std::size_t r) -> char {
    RandomSource rng = ctx.stream(1, r);
    const std::size_t n = 2 + rng.index(coupled_max - 1);
    auto log = std::make_shared<const ArgEventLog>(sample_arg(n, 0.0, 1.0, rho, rng));
    const double u = rng.uniform(), v = rng.uniform();
    const auto pair = make_coupled_pair(log, u, v);
    return gtv_exact(pair.tree_u, pair.tree_v) > d_aux(pair) + 1e-12;
  });
  out.rows.push_back(value_row("n in [2," + std::to_string(coupled_max) + "]", "coupled pairs with gtv_exact > d_aux",
                               static_cast<double>(std::count(gtv_violations.begin(), gtv_violations.end(), 1)),
                               Check::eq, 0.0, 0.0, coupled));

  const auto prohorov_violations = run_replicates<char>(measures, ctx.workers(), [&](std::size_t r) -> char {
    RandomSource rng = ctx.stream(2, r);
    const std::size_t k = 2 + rng.index(7);
    // Points on a line give a metric with many ties and many distinct values.
    std::vector<double> x(k), mu1(k), mu2(k);
    for (auto& xi : x) xi = std::floor(rng.uniform() * 10.0) / 10.0;
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      mu1[i] = rng.coin() ? rng.exponential(1.0) : 0.0;
      mu2[i] = rng.exponential(1.0);
      s1 += mu1[i];
      s2 += mu2[i];
    }
    if (s1 == 0.0) {
      mu1[0] = 1.0;
      s1 = 1.0;
    }
    for (std::size_t i = 0; i < k; ++i) {
      mu1[i] /= s1;
      mu2[i] /= s2;
    }
    DistanceMatrix m(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) m.set(i, j, std::abs(x[i] - x[j]));
    return prohorov_distance(mu1, mu2, m) > total_variation(mu1, mu2) + 1e-12;
  });
  out.rows.push_back(value_row("2 to 8 points", "measure pairs with Prohorov > total variation",
                               static_cast<double>(std::count(prohorov_violations.begin(), prohorov_violations.end(), 1)),
                               Check::eq, 0.0, 0.0, measures));

  const auto ultra_violations = run_replicates<char>(ultra, ctx.workers(), [&](std::size_t r) -> char {
    RandomSource rng = ctx.stream(3, r);
    const std::size_t n = n_min + rng.index(n_max - n_min + 1);
    const auto log = sample_arg(n, 0.0, 1.0, rho, rng);
    const auto m = extract_tree(log, rng.uniform()).distance_matrix();
    return !(m.is_symmetric_with_zero_diagonal() && m.is_ultrametric());
  });
  out.rows.push_back(value_row(range, "extracted trees that are not ultrametric",
                               static_cast<double>(std::count(ultra_violations.begin(), ultra_violations.end(), 1)),
                               Check::eq, 0.0, 0.0, ultra));

  // Hand-built fixtures with their trees written out as leaf distance tables.
  const auto two = two_mark_fixture();
  const auto path = tree_path(two);
  const auto left = matrix_from({{0, 14, 14, 14, 14},
                                 {14, 0, 10, 12, 12},
                                 {14, 10, 0, 12, 12},
                                 {14, 12, 12, 0, 2},
                                 {14, 12, 12, 2, 0}});
  const auto middle = matrix_from({{0, 4.6, 10, 12, 12},
                                   {4.6, 0, 10, 12, 12},
                                   {10, 10, 0, 12, 12},
                                   {12, 12, 12, 0, 2},
                                   {12, 12, 12, 2, 0}});
  const auto right = matrix_from({{0, 4.6, 12, 12, 12},
                                  {4.6, 0, 12, 12, 12},
                                  {12, 12, 0, 8, 8},
                                  {12, 12, 8, 0, 2},
                                  {12, 12, 8, 2, 0}});
  out.rows.push_back(value_row("two-mark fixture", "breakpoints", static_cast<double>(path.breakpoints.size()),
                               Check::eq, 2.0, 0.0));
  out.rows.push_back(value_row("two-mark fixture", "distinct trees",
                               static_cast<double>(distinct_tree_count(two).trees), Check::eq, 3.0, 0.0));
  const std::vector<DistanceMatrix> drawn{left, middle, right};
  const std::vector<std::string> names{"left", "middle", "right"};
  for (std::size_t k = 0; k < drawn.size(); ++k) {
    const bool same = k < path.trees.size() && path.trees[k].distance_matrix() == drawn[k];
    out.rows.push_back(value_row("two-mark fixture", names[k] + " tree matches the drawn distances",
                                 same ? 1.0 : 0.0, Check::eq, 1.0, 0.0));
  }
  auto one = std::make_shared<const ArgEventLog>(one_mark_fixture());
  const auto pair = make_coupled_pair(one, kOneMarkLeftLocus, kOneMarkRightLocus);
  out.rows.push_back(value_row("one-mark fixture", "d_aux", d_aux(pair), Check::eq, 0.4, 0.0));
  out.rows.push_back(value_row("one-mark fixture", "gtv_exact", gtv_exact(pair.tree_u, pair.tree_v), Check::le, 0.4,
                               0.4));
  return out;
}

}  // namespace argscape
