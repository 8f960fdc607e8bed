#include "argscape/polynomial.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "argscape/coalescent.hpp"
#include "argscape/errors.hpp"

namespace argscape {

double PairKernel::operator()(double r) const {
  switch (kind) {
    case Kind::threshold:
      return r <= parameter ? 1.0 : 0.0;
    case Kind::exponential:
      return std::exp(-parameter * r);
  }
  return 0.0;
}

PolynomialDescriptor::PolynomialDescriptor(std::size_t degree, std::vector<PairKernel> factors,
                                           double scale)
    : degree_(degree), factors_(std::move(factors)), scale_(scale) {
  if (degree_ == 0) throw std::invalid_argument("polynomial degree must be positive");
  if (!std::isfinite(scale_)) throw std::invalid_argument("kernel scale must be finite");
  for (const auto& f : factors_) {
    if (f.i >= degree_ || f.j >= degree_)
      throw std::invalid_argument("pair kernel index exceeds degree");
    if (f.kind == PairKernel::Kind::exponential && !(f.parameter >= 0.0))
      throw std::invalid_argument("exponential kernel rate must be non-negative");
  }
}

PolynomialDescriptor PolynomialDescriptor::threshold(std::size_t degree, std::size_t i,
                                                     std::size_t j, double t) {
  return PolynomialDescriptor(degree, {{PairKernel::Kind::threshold, i, j, t}});
}

PolynomialDescriptor PolynomialDescriptor::exponential(std::size_t degree,
                                                       std::vector<PairKernel> factors) {
  for (auto& f : factors) f.kind = PairKernel::Kind::exponential;
  return PolynomialDescriptor(degree, std::move(factors));
}

PolynomialDescriptor PolynomialDescriptor::exponential_pair(double lambda) {
  return exponential(2, {{PairKernel::Kind::exponential, 0, 1, lambda}});
}

double PolynomialDescriptor::sup_norm_bound() const noexcept { return std::abs(scale_); }

double PolynomialDescriptor::evaluate(const DistanceMatrix& d, const std::size_t* points) const {
  double value = scale_;
  for (const auto& f : factors_) value *= f(d(points[f.i], points[f.j]));
  return value;
}

double PolynomialDescriptor::evaluate(const DistanceMatrix& sample) const {
  if (sample.size() != degree_) throw std::invalid_argument("sample size differs from degree");
  std::vector<std::size_t> identity(degree_);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  return evaluate(sample, identity.data());
}

namespace {

// Odometer over all tuples in [0, size)^degree; `distinct` skips tuples with
// repeated entries by pruning prefixes.
double enumerate(const FiniteMmSpace& space, const PolynomialDescriptor& poly, bool distinct) {
  const std::size_t n = poly.degree(), size = space.size();
  std::vector<std::size_t> tuple(n, 0);
  std::vector<double> prefix_weight(n + 1, 1.0);
  double total = 0.0, mass = 0.0;
  // Depth-first enumeration with explicit stack positions.
  std::size_t depth = 0;
  std::vector<std::size_t> next(n, 0);
  std::vector<char> used(size, 0);
  while (true) {
    if (depth == n) {
      total += prefix_weight[n] * poly.evaluate(space.distances, tuple.data());
      mass += prefix_weight[n];
      --depth;
      if (distinct) used[tuple[depth]] = 0;
      continue;
    }
    std::size_t& candidate = next[depth];
    while (candidate < size && distinct && used[candidate]) ++candidate;
    if (candidate == size) {
      next[depth] = 0;
      if (depth == 0) break;
      --depth;
      if (distinct) used[tuple[depth]] = 0;
      continue;
    }
    tuple[depth] = candidate;
    prefix_weight[depth + 1] = prefix_weight[depth] * space.weights[candidate];
    ++candidate;
    if (distinct) used[tuple[depth]] = 1;
    ++depth;
  }
  return mass > 0.0 ? total / mass : 0.0;
}

}  // namespace

double evaluate_polynomial(const FiniteMmSpace& space, const PolynomialDescriptor& poly,
                           PolynomialMode mode, RandomSource& rng, std::size_t reps) {
  space.validate();
  switch (mode) {
    case PolynomialMode::exact:
    case PolynomialMode::exact_distinct: {
      const bool distinct = mode == PolynomialMode::exact_distinct;
      if (distinct && poly.degree() > space.size())
        throw std::invalid_argument("degree exceeds space size for distinct tuples");
      const double tuples =
          std::pow(static_cast<double>(space.size()), static_cast<double>(poly.degree()));
      if (tuples > kExactTupleBudget)
        throw resource_limit("exact polynomial evaluation needs " + std::to_string(tuples) +
                             " tuples; use monte-carlo mode");
      return enumerate(space, poly, distinct);
    }
    case PolynomialMode::monte_carlo: {
      if (reps == 0) throw std::invalid_argument("monte-carlo mode needs reps > 0");
      double total = 0.0;
      for (std::size_t r = 0; r < reps; ++r)
        total += poly.evaluate(sample_distance_submatrix(space, poly.degree(), rng));
      return total / static_cast<double>(reps);
    }
  }
  return 0.0;
}

}  // namespace argscape
