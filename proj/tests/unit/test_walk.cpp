#include <doctest.h>

#include <cmath>
#include <vector>

#include "argscape/analytic.hpp"
#include "argscape/arg.hpp"
#include "argscape/coalescent.hpp"
#include "argscape/errors.hpp"
#include "argscape/random.hpp"
#include "argscape/stats.hpp"
#include "argscape/walk.hpp"

using namespace argscape;

namespace {

const std::vector<WalkVariant> all_variants{WalkVariant::full(), WalkVariant::smc(),
                                            WalkVariant::smc_prime(), WalkVariant::macs(3)};

bool within(double estimate, double expected, double se, double k = 4.0) {
  return std::abs(estimate - expected) <= k * se;
}

}  // namespace

TEST_CASE("variant names round trip") {
  for (const auto& v : all_variants) {
    const auto parsed = WalkVariant::parse(v.name());
    CHECK(parsed.kind == v.kind);
    CHECK(parsed.window == v.window);
  }
  CHECK(WalkVariant::parse("macs5").window == 5);
  CHECK_THROWS(WalkVariant::parse("hudson"));
  CHECK_THROWS(WalkVariant::macs(0));
}

TEST_CASE("zero recombination gives a single tree") {
  for (const auto& v : all_variants) {
    RandomSource rng(10, 0);
    const auto walk = sample_walk(6, 0.0, 1.0, 1e-12, v, rng);
    CHECK(walk.path.trees.size() == 1);
    CHECK(walk.path.breakpoints.empty());
  }
}

TEST_CASE("walk output is a valid path over the interval") {
  for (const auto& v : all_variants) {
    for (int r = 0; r < 200; ++r) {
      RandomSource rng(11, r);
      const auto walk = sample_walk(5, 0.0, 2.0, 1.5, v, rng);
      const auto& p = walk.path;
      REQUIRE(p.trees.size() == p.breakpoints.size() + 1);
      double previous = 0.0;
      for (double u : p.breakpoints) {
        REQUIRE(u > previous);
        REQUIRE(u <= 2.0);
        previous = u;
      }
      for (std::size_t i = 1; i < p.trees.size(); ++i)
        REQUIRE_FALSE(p.trees[i].same_genealogy(p.trees[i - 1]));
      REQUIRE_NOTHROW(validate(*walk.graph));
      REQUIRE(walk.positions.size() == walk.lengths.size());
      REQUIRE(walk.positions.back() > 2.0);
    }
  }
}

TEST_CASE("walks are reproducible from the stream") {
  for (const auto& v : all_variants) {
    RandomSource a(12, 3), b(12, 3);
    const auto x = sample_walk(5, 0.0, 3.0, 2.0, v, a);
    const auto y = sample_walk(5, 0.0, 3.0, 2.0, v, b);
    CHECK(x.path.breakpoints == y.path.breakpoints);
    CHECK(x.graph->events.size() == y.graph->events.size());
  }
}

TEST_CASE("walk can start from a given tree") {
  RandomSource rng(13, 0);
  const auto start = sample_kingman(4, rng);
  const auto walk = sample_walk_from(start, 0.0, 1.0, 1.0, WalkVariant::full(), rng);
  CHECK(walk.path.at(0.0).distance_matrix()(0, 1) == doctest::Approx(start.distance_matrix()(0, 1)));
  CHECK(walk.path.at(0.0).distance_matrix()(2, 3) == doctest::Approx(start.distance_matrix()(2, 3)));
}

TEST_CASE("intensity check on synthetic gaps") {
  RandomSource rng(14, 0);
  std::vector<double> gaps, lengths;
  for (int i = 0; i < 100000; ++i) {
    gaps.push_back(rng.exponential(6.0));
    lengths.push_back(3.0);
  }
  CHECK(breakpoint_intensity_check(gaps, lengths, 2.0).p_value > 0.01);
  CHECK(breakpoint_intensity_check(gaps, lengths, 2.5).p_value < 1e-6);
}

TEST_CASE("candidate positions follow the retained length") {
  for (const auto& v : all_variants) {
    std::vector<double> gaps, lengths;
    for (int r = 0; r < 2000; ++r) {
      RandomSource rng(15, r);
      const auto walk = sample_walk(4, 0.0, 2.0, 1.0, v, rng);
      const auto g = walk_gaps(walk, 0.0);
      gaps.insert(gaps.end(), g.begin(), g.end());
      lengths.insert(lengths.end(), walk.lengths.begin(), walk.lengths.end());
    }
    REQUIRE(gaps.size() == lengths.size());
    CHECK(breakpoint_intensity_check(gaps, lengths, 1.0).p_value > 1e-3);
  }
}

TEST_CASE("every variant keeps the coalescent marginal at the far end") {
  for (const auto& v : all_variants) {
    std::vector<std::vector<double>> levels(3);
    for (int r = 0; r < 5000; ++r) {
      RandomSource rng(16, r);
      const auto walk = sample_walk(4, 0.0, 1.5, 1.0, v, rng);
      const auto times = level_times(walk.path.at(1.5));
      for (std::size_t i = 0; i < 3; ++i) levels[i].push_back(times[i]);
    }
    for (std::size_t i = 0; i < 3; ++i) {
      const double k = 4.0 - double(i);
      CHECK(ks_test_exponential(levels[i], k * (k - 1) / 2).p_value > 1e-3);
    }
  }
}

TEST_CASE("full walk matches the backward graph on pair statistics") {
  const int reps = 20000;
  int same = 0, cross = 0;
  for (int r = 0; r < reps; ++r) {
    RandomSource rng(17, r);
    const auto walk = sample_walk(4, 0.0, 1.0, 1.0, WalkVariant::full(), rng);
    const auto& left = walk.path.at(0.0);
    const auto& right = walk.path.at(1.0);
    same += left.mrca_node(0, 1) == right.mrca_node(0, 1);
    cross += left.mrca_node(0, 1) == right.mrca_node(2, 3);
  }
  const double z = prob_equal_same_pair(1.0), x = prob_equal_cross_pair(1.0);
  CHECK(within(same / double(reps), z, std::sqrt(z * (1 - z) / reps)));
  CHECK(within(cross / double(reps), x, std::sqrt(x * (1 - x) / reps)));
}

TEST_CASE("full walk and backward graph agree on breakpoint counts") {
  std::vector<double> walk_counts, arg_counts;
  for (int r = 0; r < 5000; ++r) {
    RandomSource a(18, r), b(19, r);
    const auto walk = sample_walk(4, 0.0, 1.0, 1.0, WalkVariant::full(), a);
    walk_counts.push_back(double(walk.path.breakpoints.size()));
    const auto log = sample_arg(4, 0.0, 1.0, 1.0, b);
    arg_counts.push_back(double(tree_path(log).breakpoints.size()));
  }
  const auto w = summarize(walk_counts), g = summarize(arg_counts);
  const double se = std::sqrt(w.variance / w.count + g.variance / g.count);
  CHECK(within(w.mean, g.mean, se));
}

TEST_CASE("smc with two leaves changes the tree at every split") {
  // Every split creates a new root, so the first breakpoint given the height
  // T is Exp(2 rho T) and P(gap > g) = 1 / (1 + 2 rho g).
  const double rho = 2.0, horizon = 5.0;
  std::vector<double> first;
  int same = 0;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    RandomSource rng(20, r);
    const auto walk = sample_walk(2, 0.0, horizon, rho, WalkVariant::smc(), rng);
    const double u = walk.path.breakpoints.empty() ? horizon : walk.path.breakpoints.front();
    if (u < horizon) first.push_back(u);
    same += u > 0.5;
  }
  // Conditional on a breakpoint before the horizon.
  const auto f = [&](double g) { return g <= 0 ? 0.0 : 1.0 - 1.0 / (1.0 + 2.0 * rho * g); };
  CHECK(ks_test(first, [&](double g) { return f(g) / f(horizon); }).p_value > 1e-3);
  const double z = 1.0 / (1.0 + 2.0 * rho * 0.5);
  CHECK(within(same / double(reps), z, std::sqrt(z * (1 - z) / reps)));
}

TEST_CASE("step budget is enforced") {
  RandomSource rng(21, 0);
  CHECK_THROWS_AS(sample_walk(10, 0.0, 1000.0, 10.0, WalkVariant::full(), rng, 50), resource_limit);
}
