#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "argscape/coalescent.hpp"

namespace argscape {

UltrametricTree sample_kingman(std::size_t n, RandomSource& rng) {
  if (n == 0) throw std::invalid_argument("kingman coalescent needs n >= 1");
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) labels.push_back(std::to_string(i));

  std::vector<Lineage> alive(n);
  std::iota(alive.begin(), alive.end(), Lineage{0});
  std::vector<Merge> merges;
  merges.reserve(n - 1);
  double t = 0.0;
  for (std::size_t k = n; k > 1; --k) {
    t += rng.exponential(0.5 * static_cast<double>(k) * static_cast<double>(k - 1));
    // Uniform unordered pair: first index uniform, second uniform among the rest.
    const std::size_t a = rng.index(k);
    std::size_t b = rng.index(k - 1);
    if (b >= a) ++b;
    const Lineage created = static_cast<Lineage>(n + merges.size());
    merges.push_back({t, alive[a], alive[b], static_cast<NodeId>(n + 1 + merges.size())});
    // Remove both, append the new lineage. Remove the larger index first.
    const std::size_t hi = std::max(a, b), lo = std::min(a, b);
    alive[hi] = alive.back();
    alive.pop_back();
    alive[lo] = created;
  }
  return UltrametricTree(std::move(labels), std::move(merges));
}

namespace {

std::vector<double> cumulative(const std::vector<double>& weights) {
  std::vector<double> c(weights.size());
  std::partial_sum(weights.begin(), weights.end(), c.begin());
  return c;
}

std::size_t draw(const std::vector<double>& cdf, RandomSource& rng) {
  const double u = rng.uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

DistanceMatrix submatrix(const FiniteMmSpace& space, const std::vector<std::size_t>& points) {
  DistanceMatrix out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      out.set(i, j, space.distances(points[i], points[j]));
  return out;
}

}  // namespace

DistanceMatrix sample_distance_submatrix(const FiniteMmSpace& space, std::size_t m,
                                         RandomSource& rng) {
  if (m == 0) throw std::invalid_argument("sample size must be positive");
  space.validate();
  const auto cdf = cumulative(space.weights);
  std::vector<std::size_t> points(m);
  for (auto& p : points) p = draw(cdf, rng);
  return submatrix(space, points);
}

DistanceMatrix sample_distinct_distance_submatrix(const FiniteMmSpace& space, std::size_t m,
                                                  RandomSource& rng) {
  if (m == 0 || m > space.size())
    throw std::invalid_argument("distinct sample size must be in [1, size]");
  space.validate();
  const auto cdf = cumulative(space.weights);
  std::vector<std::size_t> points;
  // Rejection keeps the exact conditional law for non-uniform weights too.
  while (points.size() < m) {
    const std::size_t p = draw(cdf, rng);
    if (std::find(points.begin(), points.end(), p) != points.end()) {
      points.clear();
      continue;
    }
    points.push_back(p);
  }
  return submatrix(space, points);
}

}  // namespace argscape
