#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "argscape/coalescent.hpp"
#include "argscape/errors.hpp"
#include "argscape/newick.hpp"
#include "argscape/polynomial.hpp"
#include "argscape/serialize.hpp"
#include "argscape/stats.hpp"

using namespace argscape;

namespace {

UltrametricTree two_leaf(double t) {
  return UltrametricTree({"a", "b"}, {{t, 0, 1, 3}});
}

}  // namespace

TEST_CASE("tree constructor rejects broken merge lists") {
  CHECK_THROWS_AS(UltrametricTree({"a", "b"}, {}), std::invalid_argument);
  CHECK_THROWS_AS(UltrametricTree({"a", "b", "c"}, {{1.0, 0, 1, 4}, {0.5, 2, 3, 5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(UltrametricTree({"a", "b", "c"}, {{1.0, 0, 1, 4}, {2.0, 0, 2, 5}}),
                  std::invalid_argument);
  CHECK_NOTHROW(UltrametricTree({"a", "b", "c"}, {{1.0, 0, 1, 4}, {2.0, 3, 2, 5}}));
}

TEST_CASE("kingman with one or two leaves") {
  RandomSource rng(1, 0);
  const auto single = sample_kingman(1, rng);
  CHECK(single.leaf_count() == 1);
  CHECK(single.merges().empty());
  CHECK(single.root_time() == 0.0);
  CHECK_THROWS_AS(sample_kingman(0, rng), std::invalid_argument);

  double total = 0.0;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) {
    RandomSource s(11, r);
    total += sample_kingman(2, s).root_time();
  }
  CHECK(std::abs(total / reps - 1.0) < 0.01);
}

TEST_CASE("kingman root time for ten leaves has mean 1.8") {
  std::vector<double> roots;
  for (int r = 0; r < 100000; ++r) {
    RandomSource s(12, r);
    roots.push_back(sample_kingman(10, s).root_time());
  }
  // Mean and variance of a sum of independent Exp(k(k-1)/2), k = 2..10.
  double mean = 0.0, variance = 0.0;
  for (int k = 2; k <= 10; ++k) {
    const double rate = 0.5 * k * (k - 1);
    mean += 1.0 / rate;
    variance += 1.0 / (rate * rate);
  }
  CHECK(mean == doctest::Approx(1.8).epsilon(1e-12));
  const auto s = summarize(roots);
  CHECK(std::abs(s.mean - 1.8) <= 3.0 * std::sqrt(variance / roots.size()));
}

TEST_CASE("level durations are independent exponentials") {
  const std::size_t n = 5;
  std::vector<std::vector<double>> levels(n - 1);
  for (int r = 0; r < 10000; ++r) {
    RandomSource s(13, r);
    const auto tree = sample_kingman(n, s);
    const auto durations = level_times(tree);
    REQUIRE(durations.size() == n - 1);
    CHECK(std::accumulate(durations.begin(), durations.end(), 0.0) ==
          doctest::Approx(tree.root_time()).epsilon(1e-12));
    for (std::size_t i = 0; i < durations.size(); ++i) levels[i].push_back(durations[i]);
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double k = static_cast<double>(n - i);
    CHECK(ks_test_exponential(levels[i], 0.5 * k * (k - 1)).p_value > 0.01);
  }
  CHECK(level_times(two_leaf(0.7)) == std::vector<double>{0.7});
  CHECK(level_times(UltrametricTree::leaf("x")).empty());
}

TEST_CASE("sampled trees give ultrametric distance matrices") {
  for (int r = 0; r < 10000; ++r) {
    RandomSource s(14, r);
    const auto d = sample_kingman(6, s).distance_matrix();
    REQUIRE(d.is_symmetric_with_zero_diagonal());
    REQUIRE(d.is_ultrametric(0.0));
  }
}

TEST_CASE("mm-space of small trees") {
  const auto single = to_mm_space(UltrametricTree::leaf("x"));
  CHECK(single.size() == 1);
  CHECK(single.weights[0] == 1.0);
  const auto pair = to_mm_space(two_leaf(0.25));
  CHECK(pair.distances(0, 1) == 0.5);
  CHECK(pair.distances(1, 0) == 0.5);
  CHECK(pair.distances(0, 0) == 0.0);
  CHECK(pair.has_uniform_weights());
}

TEST_CASE("mrca queries and leaf restriction keep node identities") {
  // ((a,b)@1,(c,d)@2)@3
  const UltrametricTree t({"a", "b", "c", "d"}, {{1.0, 0, 1, 10}, {2.0, 2, 3, 11}, {3.0, 4, 5, 12}});
  CHECK(t.mrca_time(0, 1) == 1.0);
  CHECK(t.mrca_time(0, 3) == 3.0);
  CHECK(t.mrca_node(2, 3) == 11);
  const std::vector<std::size_t> keep{0, 2, 3};
  const auto r = restrict_leaves(t, keep);
  CHECK(r.leaf_labels() == std::vector<std::string>{"a", "c", "d"});
  REQUIRE(r.merges().size() == 2);
  CHECK(r.merges()[0].node == 11);
  CHECK(r.merges()[1].node == 12);
  CHECK(r.mrca_time(0, 1) == 3.0);
}

TEST_CASE("sampled submatrices") {
  RandomSource rng(15, 0);
  const auto space = to_mm_space(two_leaf(1.0));
  const auto single = sample_distance_submatrix(space, 1, rng);
  CHECK(single.size() == 1);
  CHECK(single(0, 0) == 0.0);

  int zeros = 0;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r)
    if (sample_distance_submatrix(space, 2, rng)(0, 1) == 0.0) ++zeros;
  // P = 1/2 from the four equally likely ordered pairs.
  CHECK(std::abs(zeros / double(reps) - 0.5) <= 3.0 * std::sqrt(0.25 / reps));

  std::vector<double> halves;
  for (int r = 0; r < 10000; ++r) {
    RandomSource s(16, r);
    const auto tree_space = to_mm_space(sample_kingman(7, s));
    halves.push_back(sample_distinct_distance_submatrix(tree_space, 2, s)(0, 1) / 2.0);
  }
  CHECK(ks_test_exponential(halves, 1.0).p_value > 0.01);
}

TEST_CASE("polynomial on a two-leaf tree") {
  RandomSource rng(17, 0);
  const double t = 0.8, lambda = 0.6;
  const auto space = to_mm_space(two_leaf(t));
  const auto poly = PolynomialDescriptor::exponential_pair(lambda);
  CHECK(evaluate_polynomial(space, poly, PolynomialMode::exact, rng) ==
        doctest::Approx((1.0 + std::exp(-2.0 * lambda * t)) / 2.0).epsilon(1e-14));
  CHECK(evaluate_polynomial(space, poly, PolynomialMode::exact_distinct, rng) ==
        doctest::Approx(std::exp(-2.0 * lambda * t)).epsilon(1e-14));
  CHECK(poly.sup_norm_bound() == 1.0);
}

TEST_CASE("distinct-pair polynomial over kingman trees") {
  const double lambda = 0.7;
  const auto poly = PolynomialDescriptor::exponential_pair(lambda);
  std::vector<double> values;
  for (int r = 0; r < 100000; ++r) {
    RandomSource s(18, r);
    values.push_back(evaluate_polynomial(to_mm_space(sample_kingman(4, s)), poly,
                                         PolynomialMode::exact_distinct, s));
  }
  const auto sum = summarize(values);
  // E[exp(-2 lambda T)] with T ~ Exp(1).
  CHECK(std::abs(sum.mean - 1.0 / (1.0 + 2.0 * lambda)) <= 3.0 * sum.standard_error());
}

TEST_CASE("exact and monte-carlo polynomial evaluation agree") {
  for (int r = 0; r < 100; ++r) {
    RandomSource s(19, r);
    const std::size_t size = 2 + s.index(6);
    const auto space = to_mm_space(sample_kingman(size, s));
    const std::size_t degree = 2 + s.index(2);
    std::vector<PairKernel> factors;
    for (std::size_t i = 0; i < degree; ++i)
      for (std::size_t j = i + 1; j < degree; ++j) {
        if (s.coin())
          factors.push_back({PairKernel::Kind::threshold, i, j, s.uniform(0.0, 3.0)});
        else
          factors.push_back({PairKernel::Kind::exponential, i, j, s.uniform(0.0, 2.0)});
      }
    const PolynomialDescriptor poly(degree, factors, s.uniform(-2.0, 2.0));
    const std::size_t reps = 4000;
    const double exact = evaluate_polynomial(space, poly, PolynomialMode::exact, s);
    const double mc = evaluate_polynomial(space, poly, PolynomialMode::monte_carlo, s, reps);
    CHECK(std::abs(exact) <= poly.sup_norm_bound() + 1e-12);
    CHECK(std::abs(exact - mc) <= 4.0 / std::sqrt(double(reps)) * poly.sup_norm_bound());
  }
}

TEST_CASE("gap between all tuples and distinct tuples shrinks with size") {
  const auto poly = PolynomialDescriptor::threshold(2, 0, 1, 0.5);
  double previous_gap = 2.0;
  for (std::size_t size : {10u, 100u, 1000u}) {
    RandomSource s(20, size);
    const auto space = to_mm_space(sample_kingman(size, s));
    const double all = evaluate_polynomial(space, poly, PolynomialMode::exact, s);
    const double distinct = evaluate_polynomial(space, poly, PolynomialMode::exact_distinct, s);
    const double n = static_cast<double>(size);
    const double diagonal_mass = 1.0 - n * (n - 1.0) / (n * n);
    const double gap = std::abs(all - distinct);
    CHECK(gap <= poly.sup_norm_bound() * diagonal_mass + 1e-12);
    CHECK(gap <= previous_gap);
    previous_gap = gap;
  }
  CHECK(previous_gap < 2e-3);
}

TEST_CASE("exact polynomial refuses oversized enumerations") {
  RandomSource s(21, 0);
  const auto space = to_mm_space(sample_kingman(200, s));
  const PolynomialDescriptor poly(4, {{PairKernel::Kind::threshold, 0, 3, 1.0}});
  CHECK_THROWS_AS(evaluate_polynomial(space, poly, PolynomialMode::exact, s), resource_limit);
}

TEST_CASE("lineage counts at small depth") {
  const UltrametricTree t({"a", "b", "c"}, {{1.0, 0, 1, 4}, {2.0, 3, 2, 5}});
  CHECK(lineage_count_at_depth(t, 0.5) == 3);
  CHECK(lineage_count_at_depth(t, 1.5) == 2);
  CHECK(lineage_count_at_depth(t, 2.0) == 1);
  CHECK(lineage_count_at_depth(t, 9.0) == 1);
  CHECK_THROWS_AS(lineage_count_at_depth(t, 0.0), std::invalid_argument);

  double total = 0.0;
  for (int r = 0; r < 100; ++r) {
    RandomSource s(22, r);
    total += 0.01 * static_cast<double>(lineage_count_at_depth(sample_kingman(10000, s), 0.01));
  }
  const double mean = total / 100.0;
  CHECK(mean >= 1.6);
  CHECK(mean <= 2.4);
}

TEST_CASE("newick encoding and decoding") {
  CHECK(newick_encode(UltrametricTree({"a", "b"}, {{0.5, 0, 1, 3}})) == "(a:0.5,b:0.5);");
  const auto decoded = newick_decode("(a:0.5,b:0.5);");
  REQUIRE(decoded.merges().size() == 1);
  CHECK(decoded.merges()[0].time == 0.5);
  CHECK(decoded.leaf_labels() == std::vector<std::string>{"a", "b"});
  CHECK(newick_decode("x;").leaf_count() == 1);
  CHECK(newick_decode(" ( a : 1 , ( b:0.25 , c:0.25 ) : 0.75 ) ; ").root_time() == 1.0);

  try {
    newick_decode("(a:0.5,b:0.4);");
    FAIL("expected a parse error");
  } catch (const parse_error& e) {
    CHECK(std::string(e.what()).find("unequal depth") != std::string::npos);
  }
  CHECK_THROWS_AS(newick_decode("(a:0.5,b:-0.5);"), parse_error);
  CHECK_THROWS_AS(newick_decode("(a:0.5,b:0.5"), parse_error);
  CHECK_THROWS_AS(newick_decode("(a:1,b:1,c:1);"), parse_error);
  CHECK_THROWS_AS(newick_decode("(a,b);"), parse_error);
  try {
    newick_decode("(a:0.5,b:0.5)x;y");
    FAIL("expected a parse error");
  } catch (const parse_error& e) {
    CHECK(e.position() == 15);
  }
}

TEST_CASE("newick round trip preserves the distance matrix") {
  for (int r = 0; r < 500; ++r) {
    RandomSource s(23, r);
    const auto tree = sample_kingman(1 + s.index(12), s);
    const auto back = newick_decode(newick_encode(tree));
    REQUIRE(back.leaf_count() == tree.leaf_count());
    // Leaf order may change; compare through labels.
    const auto d1 = tree.distance_matrix(), d2 = back.distance_matrix();
    std::vector<std::size_t> where(tree.leaf_count());
    for (std::size_t i = 0; i < tree.leaf_count(); ++i)
      for (std::size_t j = 0; j < back.leaf_count(); ++j)
        if (back.leaf_labels()[j] == tree.leaf_labels()[i]) where[i] = j;
    for (std::size_t i = 0; i < tree.leaf_count(); ++i)
      for (std::size_t j = 0; j < tree.leaf_count(); ++j)
        REQUIRE(d2(where[i], where[j]) == doctest::Approx(d1(i, j)).epsilon(1e-12));
  }
}

TEST_CASE("tree json round trip is exact") {
  RandomSource s(24, 0);
  const auto tree = sample_kingman(9, s);
  CHECK(tree_from_json(tree_to_json(tree)) == tree);
}

TEST_CASE("identical streams give identical trees") {
  RandomSource x(25, 3), y(25, 3);
  CHECK(sample_kingman(50, x) == sample_kingman(50, y));
}
