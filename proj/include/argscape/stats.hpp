#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace argscape {

struct TestResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, with the
/// asymptotic Kolmogorov distribution (Stephens' small-sample correction).
TestResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);
TestResult ks_test_exponential(std::span<const double> samples, double rate);
TestResult ks_two_sample(std::span<const double> x, std::span<const double> y);

/// Pearson chi-square goodness of fit; cells with zero expected probability
/// must have zero counts. Degrees of freedom = used cells - 1.
TestResult chi_square_test(std::span<const std::size_t> observed,
                           std::span<const double> expected_probabilities);

/// Pearson chi-square test of homogeneity for two count vectors over the
/// same cells.
TestResult chi_square_two_sample(std::span<const std::size_t> x, std::span<const std::size_t> y);

/// Survival function of the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double standard_error() const;
};

/// Sequential left-to-right accumulation so the result never depends on how
/// replicates were scheduled.
Summary summarize(std::span<const double> values);

double correlation(std::span<const double> x, std::span<const double> y);

/// z-score of an estimate against a reference; +-inf when se = 0 and they
/// differ, 0 when equal.
double z_score(double estimate, double reference, double standard_error);

/// Least-squares slope of y = c x through the origin.
double slope_through_origin(std::span<const double> x, std::span<const double> y);

}  // namespace argscape
