#pragma once

#include <cstddef>
#include <vector>

#include "argscape/random.hpp"
#include "argscape/tree.hpp"

namespace argscape {

/// One factor of a product kernel, acting on the distance between sample
/// points i and j.
struct PairKernel {
  enum class Kind { threshold, exponential };
  Kind kind = Kind::threshold;
  std::size_t i = 0;
  std::size_t j = 1;
  /// Threshold t for 1{r <= t}, rate lambda (>= 0) for exp(-lambda r).
  double parameter = 0.0;

  double operator()(double r) const;
};

/// Bounded kernel phi of the degree x degree distance submatrix, written as
/// scale times a product of pair kernels. Every factor lies in [0, 1] on
/// non-negative inputs, so |phi| <= |scale|.
class PolynomialDescriptor {
 public:
  PolynomialDescriptor(std::size_t degree, std::vector<PairKernel> factors, double scale = 1.0);

  static PolynomialDescriptor threshold(std::size_t degree, std::size_t i, std::size_t j, double t);
  /// exp(-sum lambda_ij r_ij) over the listed pairs.
  static PolynomialDescriptor exponential(std::size_t degree,
                                          std::vector<PairKernel> exponential_factors);
  static PolynomialDescriptor exponential_pair(double lambda);

  std::size_t degree() const noexcept { return degree_; }
  const std::vector<PairKernel>& factors() const noexcept { return factors_; }
  double scale() const noexcept { return scale_; }
  double sup_norm_bound() const noexcept;

  /// phi evaluated on distances among the chosen sample points.
  double evaluate(const DistanceMatrix& d, const std::size_t* points) const;
  double evaluate(const DistanceMatrix& sample) const;

 private:
  std::size_t degree_;
  std::vector<PairKernel> factors_;
  double scale_;
};

enum class PolynomialMode { exact, exact_distinct, monte_carlo };

/// Limit on size^degree for exact enumeration.
inline constexpr double kExactTupleBudget = 1e8;

/// exact: weighted mean over all ordered tuples; exact_distinct: weighted mean
/// over tuples with pairwise distinct entries; monte_carlo: mean over `reps`
/// i.i.d. draws from the weights. Throws resource_limit when an exact mode
/// would enumerate more than kExactTupleBudget tuples.
double evaluate_polynomial(const FiniteMmSpace& space, const PolynomialDescriptor& poly,
                           PolynomialMode mode, RandomSource& rng, std::size_t reps = 0);

}  // namespace argscape
