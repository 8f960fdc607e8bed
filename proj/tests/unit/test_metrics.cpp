#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include "argscape/arg.hpp"
#include "argscape/coalescent.hpp"
#include "argscape/errors.hpp"
#include "argscape/fixtures.hpp"
#include "argscape/metrics.hpp"
#include "argscape/random.hpp"
#include "argscape/stats.hpp"
#include "argscape/tree_path.hpp"

using namespace argscape;

namespace {

DistanceMatrix line_metric(const std::vector<double>& positions) {
  DistanceMatrix d(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j) d.set(i, j, std::abs(positions[i] - positions[j]));
  return d;
}

std::vector<double> random_measure(std::size_t n, RandomSource& rng) {
  std::vector<double> mu(n);
  double total = 0.0;
  for (double& p : mu) {
    p = rng.coin() ? rng.uniform() : 0.0;
    total += p;
  }
  if (total == 0.0) {
    mu[0] = 1.0;
    return mu;
  }
  for (double& p : mu) p /= total;
  // Renormalise the rounding error into the largest entry.
  const double drift = 1.0 - std::accumulate(mu.begin(), mu.end(), 0.0);
  *std::max_element(mu.begin(), mu.end()) += drift;
  return mu;
}

// Smallest eps with mu1(F) <= mu2(F^eps) + eps for all subsets F, by
// bisection over eps with the subset condition checked directly.
double prohorov_by_subsets(const std::vector<double>& mu1, const std::vector<double>& mu2,
                           const DistanceMatrix& d) {
  const std::size_t n = mu1.size();
  auto feasible = [&](double eps) {
    for (unsigned f = 1; f < (1u << n); ++f) {
      double inside = 0.0, nearby = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (f & (1u << i)) inside += mu1[i];
      for (std::size_t j = 0; j < n; ++j) {
        bool close = false;
        for (std::size_t i = 0; i < n && !close; ++i)
          if ((f & (1u << i)) && d(i, j) < eps) close = true;
        if (close) nearby += mu2[j];
      }
      if (inside > nearby + eps + 1e-12) return false;
    }
    return true;
  };
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Largest common sub-isometry by enumerating all partial injections.
std::size_t subisometry_by_enumeration(const DistanceMatrix& a, const DistanceMatrix& b) {
  const std::size_t n = a.size();
  std::size_t best = 0;
  std::vector<int> image(n, -1);
  auto go = [&](auto&& self, std::size_t i, std::size_t matched, unsigned used) -> void {
    if (i == n) {
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          if (image[x] >= 0 && image[y] >= 0 && std::abs(a(x, y) - b(image[x], image[y])) > 1e-9) return;
      best = std::max(best, matched);
      return;
    }
    image[i] = -1;
    self(self, i + 1, matched, used);
    for (std::size_t j = 0; j < n; ++j) {
      if (used & (1u << j)) continue;
      image[i] = static_cast<int>(j);
      self(self, i + 1, matched + 1, used | (1u << j));
      image[i] = -1;
    }
  };
  go(go, 0, 0, 0u);
  return best;
}

// Random ultrametric space with coarse heights so partial isometries exist.
FiniteMmSpace coarse_tree_space(std::size_t n, RandomSource& rng) {
  std::vector<Merge> merges;
  std::vector<Lineage> alive(n);
  std::iota(alive.begin(), alive.end(), 0);
  double time = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    time += 1.0 + static_cast<double>(rng.index(2));
    const std::size_t i = rng.index(alive.size());
    Lineage left = alive[i];
    alive.erase(alive.begin() + static_cast<long>(i));
    const std::size_t j = rng.index(alive.size());
    Lineage right = alive[j];
    alive.erase(alive.begin() + static_cast<long>(j));
    merges.push_back({time, left, right, n + 1 + k});
    alive.push_back(static_cast<Lineage>(n + k));
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i + 1));
  return to_mm_space(UltrametricTree(labels, merges));
}

UltrametricTree cherry(double height) {
  return UltrametricTree({"1", "2"}, {{height, 0, 1, 3}});
}

}  // namespace

TEST_CASE("hausdorff distance") {
  const auto d = line_metric({0.0, 1.0, 3.0});
  const std::vector<std::size_t> a{0, 1}, b{2}, p{0};
  CHECK(hausdorff_distance(a, a, d) == 0.0);
  CHECK(hausdorff_distance(p, a, d) == doctest::Approx(1.0));
  CHECK(hausdorff_distance(a, b, d) == doctest::Approx(3.0));
  const std::vector<std::size_t> empty;
  CHECK_THROWS_AS(hausdorff_distance(empty, b, d), std::invalid_argument);
}

TEST_CASE("total variation") {
  const std::vector<double> x{0.5, 0.5}, y{1.0, 0.0}, z{0.0, 1.0};
  CHECK(total_variation(x, x) == 0.0);
  CHECK(total_variation(y, z) == doctest::Approx(1.0));
  CHECK(total_variation(x, y) == doctest::Approx(0.5));
  const std::vector<double> w{1.0};
  CHECK_THROWS_AS(total_variation(x, w), std::invalid_argument);
}

TEST_CASE("prohorov distance examples") {
  const auto d = line_metric({0.0, 1.0});
  const std::vector<double> point{1.0, 0.0}, uniform{0.5, 0.5};
  CHECK(prohorov_distance(uniform, uniform, d) == 0.0);
  CHECK(prohorov_distance(point, uniform, d) == doctest::Approx(0.5).epsilon(1e-12));
  const std::vector<double> bad{0.7, 0.7};
  CHECK_THROWS_AS(prohorov_distance(bad, uniform, d), std::invalid_argument);
}

TEST_CASE("prohorov distance agrees with the subset definition and stays below total variation") {
  RandomSource rng(30, 0);
  int violations = 0;
  for (int r = 0; r < 1000; ++r) {
    const std::size_t n = 2 + rng.index(4);
    std::vector<double> positions(n);
    for (double& x : positions) x = rng.coin() ? rng.uniform() : 0.1 * static_cast<double>(rng.index(6));
    const auto d = line_metric(positions);
    const auto mu1 = random_measure(n, rng), mu2 = random_measure(n, rng);
    const double p = prohorov_distance(mu1, mu2, d);
    if (r < 300) REQUIRE(p == doctest::Approx(prohorov_by_subsets(mu1, mu2, d)).epsilon(1e-8));
    violations += p > total_variation(mu1, mu2) + 1e-12;
  }
  CHECK(violations == 0);
}

TEST_CASE("exact Gromov total variation") {
  const auto x = to_mm_space(cherry(1.0)), y = to_mm_space(cherry(2.0));
  CHECK(gtv_exact(x, x) == 0.0);
  CHECK(gtv_exact(x, y) == doctest::Approx(0.5));

  RandomSource rng(31, 0);
  const auto big = coarse_tree_space(9, rng);
  CHECK_THROWS_AS(gtv_exact(big, big), unsupported_instance);
  CHECK_THROWS_AS(gtv_exact(x, coarse_tree_space(3, rng)), unsupported_instance);
  FiniteMmSpace skewed = x;
  skewed.weights = {0.25, 0.75};
  CHECK_THROWS_AS(gtv_exact(skewed, x), unsupported_instance);
}

TEST_CASE("branch and bound matches enumeration") {
  RandomSource rng(32, 0);
  for (int r = 0; r < 300; ++r) {
    const std::size_t n = 2 + rng.index(4);
    const auto a = coarse_tree_space(n, rng), b = coarse_tree_space(n, rng);
    REQUIRE(max_common_subisometry(a, b) == subisometry_by_enumeration(a.distances, b.distances));
  }
}

TEST_CASE("gtv is a metric on small uniform spaces") {
  RandomSource rng(33, 0);
  int violations = 0;
  for (int r = 0; r < 1000; ++r) {
    const std::size_t n = 2 + rng.index(5);
    const auto x = coarse_tree_space(n, rng), y = coarse_tree_space(n, rng), z = coarse_tree_space(n, rng);
    const double xy = gtv_exact(x, y), yz = gtv_exact(y, z), xz = gtv_exact(x, z);
    REQUIRE(xy == gtv_exact(y, x));
    REQUIRE(xy >= 0.0);
    violations += xz > xy + yz + 1e-12;
  }
  CHECK(violations == 0);
}

TEST_CASE("one-mark fixture cuts two of five leaves") {
  auto log = std::make_shared<const ArgEventLog>(one_mark_fixture());
  const auto pair = make_coupled_pair(log, kOneMarkLeftLocus, kOneMarkRightLocus);
  CHECK(d_aux(pair) == doctest::Approx(0.4));
  const auto marks = path_marks(*log, all_leaves(*log), kOneMarkLeftLocus);
  const auto cut = cut_leaves(pair.tree_u, marks, kOneMarkLeftLocus, kOneMarkRightLocus);
  CHECK(cut == std::vector<char>{0, 0, 0, 1, 1});
  const double gtv = gtv_exact(pair.tree_u, pair.tree_v);
  CHECK(gtv <= 0.4 + 1e-12);
  CHECK(gtv <= d_aux(pair) + 1e-12);
  // No mark between nearby loci on the same side of the split.
  CHECK(d_aux(make_coupled_pair(log, 0.1, 0.3)) == 0.0);
}

TEST_CASE("d_aux rejects logs that drop splits") {
  RandomSource rng(34, 0);
  auto log = std::make_shared<const ArgEventLog>(sample_arg_hudson(4, 0.0, 1.0, 2.0, rng));
  CHECK_THROWS_AS(d_aux(make_coupled_pair(log, 0.1, 0.9)), unsupported_instance);
}

TEST_CASE("re-marking a fixed tree gives the exponential cut probability") {
  // Every leaf-to-root path has length equal to the height L, and marks fall
  // in [u, v] at rate rho * |v - u| per unit length.
  const double rho = 1.0, u = 0.3, v = 0.7;
  for (int t = 0; t < 5; ++t) {
    RandomSource tree_rng(35, t);
    const auto tree = sample_kingman(8, tree_rng);
    const std::size_t n = tree.leaf_count();
    std::vector<double> values;
    for (int r = 0; r < 10000; ++r) {
      RandomSource rng(36, t * 10000 + r);
      std::vector<BranchMark> marks;
      for (std::size_t k = 0; k < tree.merges().size(); ++k) {
        for (Lineage child : {tree.merges()[k].left, tree.merges()[k].right}) {
          const double bottom = child < n ? 0.0 : tree.merges()[child - n].time;
          double time = bottom + rng.exponential(rho);
          while (time < tree.merges()[k].time) {
            marks.push_back({child, time, rng.uniform()});
            time += rng.exponential(rho);
          }
        }
      }
      values.push_back(d_aux(tree, marks, u, v));
    }
    const auto s = summarize(values);
    const double expected = 1.0 - std::exp(-rho * (v - u) * tree.root_time());
    CHECK(std::abs(s.mean - expected) <= 3.0 * s.standard_error());
  }
}

TEST_CASE("gtv is bounded by d_aux on coupled trees") {
  int violations = 0;
  for (int r = 0; r < 1000; ++r) {
    RandomSource rng(37, r);
    const std::size_t n = 2 + rng.index(5);
    auto log = std::make_shared<const ArgEventLog>(sample_arg(n, 0.0, 1.0, 2.0, rng));
    const double u = rng.uniform(), v = rng.uniform();
    const auto pair = make_coupled_pair(log, u, v);
    violations += gtv_exact(pair.tree_u, pair.tree_v) > d_aux(pair) + 1e-12;
  }
  CHECK(violations == 0);
}

TEST_CASE("glued tree is a metric containing both trees") {
  for (int r = 0; r < 500; ++r) {
    RandomSource rng(38, r);
    const std::size_t n = 2 + rng.index(6);
    auto log = std::make_shared<const ArgEventLog>(sample_arg(n, 0.0, 1.0, 1.5, rng));
    const auto pair = make_coupled_pair(log, rng.uniform(), rng.uniform());
    const auto g = glued_distance_matrix(pair);
    const auto du = pair.tree_u.distance_matrix(), dv = pair.tree_v.distance_matrix();
    REQUIRE(g.is_symmetric_with_zero_diagonal());
    for (std::size_t i = 0; i < 2 * n; ++i)
      for (std::size_t j = 0; j < 2 * n; ++j) {
        REQUIRE(g(i, j) >= 0.0);
        if (i < n && j < n) REQUIRE(g(i, j) == du(i, j));
        if (i >= n && j >= n) REQUIRE(g(i, j) == dv(i - n, j - n));
        for (std::size_t k = 0; k < 2 * n; ++k) REQUIRE(g(i, j) <= g(i, k) + g(k, j) + 1e-9);
      }
    // Tree metric: four-point condition.
    for (std::size_t a = 0; a < 2 * n; ++a)
      for (std::size_t b = a + 1; b < 2 * n; ++b)
        for (std::size_t c = b + 1; c < 2 * n; ++c)
          for (std::size_t d = c + 1; d < 2 * n; ++d) {
            std::array<double, 3> s{g(a, b) + g(c, d), g(a, c) + g(b, d), g(a, d) + g(b, c)};
            std::sort(s.begin(), s.end());
            REQUIRE(s[2] <= s[1] + 1e-9);
          }
    const auto marks = path_marks(*log, pair.leaves, pair.locus_u);
    const auto cut = cut_leaves(pair.tree_u, marks, std::min(pair.locus_u, pair.locus_v),
                                std::max(pair.locus_u, pair.locus_v));
    for (std::size_t i = 0; i < n; ++i)
      if (!cut[i]) REQUIRE(g(i, n + i) == 0.0);
    const auto bounds = gh_bounds(pair);
    REQUIRE(bounds.lower <= bounds.upper + 1e-12);
    REQUIRE(bounds.lower == doctest::Approx(std::abs(pair.tree_u.root_time() - pair.tree_v.root_time())));
  }
}

TEST_CASE("gh bounds vanish for identical trees") {
  auto log = std::make_shared<const ArgEventLog>(one_mark_fixture());
  const auto pair = make_coupled_pair(log, 0.1, 0.3);
  const auto bounds = gh_bounds(pair);
  CHECK(bounds.lower == 0.0);
  CHECK(bounds.upper == 0.0);
  const auto apart = gh_bounds(make_coupled_pair(log, kOneMarkLeftLocus, kOneMarkRightLocus));
  CHECK(apart.upper > 0.0);
}

TEST_CASE("path variation") {
  auto log = std::make_shared<const ArgEventLog>(one_mark_fixture());
  const auto leaves = all_leaves(*log);
  const auto path = tree_path(log, leaves);
  REQUIRE(path.breakpoints.size() == 1);
  CHECK(path_variation(path.restrict(0.0, 0.4), PathDistance::d_aux_chain) == 0.0);
  CHECK(path_variation(path.restrict(0.0, 0.4), PathDistance::gtv_exact) == 0.0);
  CHECK(path_variation(path, PathDistance::d_aux_chain) == doctest::Approx(0.4));
  CHECK(path_variation(path, PathDistance::gtv_exact) ==
        doctest::Approx(gtv_exact(path.trees[0], path.trees[1])));
  CHECK(path_variation(path, PathDistance::gh_upper) > 0.0);

  TreePath bare = path;
  bare.source.reset();
  CHECK_THROWS_AS(path_variation(bare, PathDistance::d_aux_chain), unsupported_instance);

  for (int r = 0; r < 1000; ++r) {
    RandomSource rng(39, r);
    const std::size_t n = 2 + rng.index(6);
    auto arg = std::make_shared<const ArgEventLog>(sample_arg(n, 0.0, 1.0, 2.0, rng));
    const auto p = tree_path(arg, all_leaves(*arg));
    const double c = rng.uniform(0.01, 0.99);
    for (auto distance : {PathDistance::d_aux_chain, PathDistance::gtv_exact, PathDistance::gh_upper}) {
      const double whole = path_variation(p, distance);
      const double split = path_variation(p.restrict(0.0, c), distance) + path_variation(p.restrict(c, 1.0), distance);
      REQUIRE(whole == doctest::Approx(split).epsilon(1e-12));
    }
  }
}

TEST_CASE("path distance names") {
  for (auto d : {PathDistance::d_aux_chain, PathDistance::gtv_exact, PathDistance::gh_upper})
    CHECK(parse_path_distance(to_string(d)) == d);
  CHECK_THROWS(parse_path_distance("hausdorff"));
}
