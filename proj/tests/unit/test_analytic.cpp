#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "argscape/analytic.hpp"
#include "argscape/coalescent.hpp"
#include "argscape/random.hpp"
#include "argscape/stats.hpp"

using namespace argscape;

TEST_CASE("first-event system at zero distance") {
  const auto s = solve_first_event_system({FirstEventSystem::Variant::arg, 0.0});
  CHECK(s.x == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  CHECK(s.y == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(s.z == doctest::Approx(1.0).epsilon(1e-14));
  const auto aux = solve_first_event_system({FirstEventSystem::Variant::aux, 0.0});
  CHECK(aux.x == doctest::Approx(s.x).epsilon(1e-14));
  CHECK(aux.z == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("first-event system at unit distance") {
  CHECK(solve_first_event_system({FirstEventSystem::Variant::arg, 1.0}).x ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(solve_first_event_system({FirstEventSystem::Variant::aux, 1.0}).x ==
        doctest::Approx(2.0 / 17.0).epsilon(1e-14));
  CHECK_THROWS_AS(solve_first_event_system({FirstEventSystem::Variant::arg, -1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(prob_equal_cross_pair(-0.5), std::invalid_argument);
}

TEST_CASE("linear solve and closed forms agree") {
  RandomSource rng(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const double r = rng.uniform(0.0, 50.0);
    const auto arg = solve_first_event_system({FirstEventSystem::Variant::arg, r});
    const auto aux = solve_first_event_system({FirstEventSystem::Variant::aux, r});
    REQUIRE(std::abs(arg.x - prob_equal_cross_pair(r)) <= 1e-12);
    REQUIRE(std::abs(arg.z - prob_equal_same_pair(r)) <= 1e-12);
    REQUIRE(std::abs(aux.x - prob_decoupling_event(r)) <= 1e-12);
    for (double p : {arg.x, arg.y, arg.z, aux.x, aux.y, aux.z}) REQUIRE((p >= 0.0 && p <= 1.0));
    if (r > 1e-9) REQUIRE(arg.x != doctest::Approx(aux.x).epsilon(1e-12));
  }
}

TEST_CASE("cross-pair probability at zero equals the kingman balanced-split probability") {
  // Enumerate the first two merges of a 4-coalescent: leaves 0..3, the pair
  // (0,1) and the pair (2,3) share their MRCA exactly when the tree is
  // balanced with 0,1 on opposite sides and 2,3 on opposite sides.
  const std::vector<std::pair<int, int>> pairs{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  double probability = 0.0;
  for (const auto& [i, j] : pairs) {
    // Cherry {i,j}; the remaining two leaves merge next with probability 1/3
    // which makes the tree balanced.
    const bool separates_01 = ((i == 0 || j == 0) && !(i == 1 || j == 1)) || ((i == 1 || j == 1) && !(i == 0 || j == 0));
    const bool separates_23 = ((i == 2 || j == 2) && !(i == 3 || j == 3)) || ((i == 3 || j == 3) && !(i == 2 || j == 2));
    if (separates_01 && separates_23) probability += (1.0 / 6.0) * (1.0 / 3.0);
  }
  CHECK(probability == doctest::Approx(prob_equal_cross_pair(0.0)).epsilon(1e-14));

  // Monte Carlo on sampled trees as a second route.
  int hits = 0;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) {
    RandomSource s(2, r);
    const auto tree = sample_kingman(4, s);
    hits += tree.mrca_node(0, 1) == tree.mrca_node(2, 3);
  }
  const double p = 2.0 / 9.0;
  CHECK(std::abs(hits / double(reps) - p) <= 3.0 * std::sqrt(p * (1 - p) / reps));
}

TEST_CASE("union bounds") {
  CHECK(cross_pair_union_bound(2, 0.7) == doctest::Approx(prob_equal_cross_pair(0.7)).epsilon(1e-15));
  CHECK(cross_pair_union_bound(3, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(cross_pair_union_bound(4, 10.0) == doctest::Approx(72.0 / 339.0).epsilon(1e-14));
  CHECK_THROWS_AS(cross_pair_union_bound(1, 1.0), std::invalid_argument);
  CHECK(decoupling_union_bound(2, 3.0) == doctest::Approx(prob_decoupling_event(3.0)).epsilon(1e-15));
}

TEST_CASE("mixing bound") {
  CHECK(mixing_bound(2, 1e-12) == doctest::Approx(32.0 / 9.0).epsilon(1e-9));
  CHECK(mixing_bound(2, 20.0) == doctest::Approx(32.0 / 549.0).epsilon(1e-14));
  double previous = mixing_bound(3, 0.01);
  for (double r = 0.02; r < 100.0; r *= 1.1) {
    const double value = mixing_bound(3, r);
    CHECK(value < previous);
    previous = value;
  }
  CHECK(flag_vacuous(mixing_bound(2, 0.5), 2.0).vacuous);
  CHECK_FALSE(flag_vacuous(mixing_bound(2, 20.0), 2.0).vacuous);
}

TEST_CASE("height second moment") {
  CHECK(height_second_moment(2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(height_second_moment(10) == doctest::Approx(4.398141849332325).epsilon(1e-6));
  CHECK(height_second_moment_limit() == doctest::Approx(5.1594725).epsilon(1e-7));
  CHECK(height_second_moment_crude_bound() == doctest::Approx(10.318945).epsilon(1e-6));
  CHECK(height_second_moment_crude_bound() < 11.0);
  CHECK(height_second_moment_crude_bound() >= height_second_moment_limit());
  CHECK(std::abs(height_second_moment(100000) - height_second_moment_limit()) < 1e-4);

  std::vector<double> squares;
  for (int r = 0; r < 100000; ++r) {
    RandomSource s(3, r);
    const double h = sample_kingman(10, s).root_time();
    squares.push_back(h * h);
  }
  const auto sum = summarize(squares);
  CHECK(std::abs(sum.mean - height_second_moment(10)) <= 3.0 * sum.standard_error());
}

TEST_CASE("tightness bound forms") {
  const auto b = tightness_rhs(1.0, 0.1, 0);
  CHECK(b.squared_form == doctest::Approx(0.051596).epsilon(1e-4));
  CHECK(b.printed_form == doctest::Approx(0.11).epsilon(1e-12));
  CHECK(tightness_rhs(1.0, 1e-6, 5).squared_form < 1e-11);
  CHECK(tightness_rhs(2.0, 0.2, 20).squared_form > tightness_rhs(2.0, 0.1, 20).squared_form);
  CHECK(expected_height(10) == doctest::Approx(1.8));
}
