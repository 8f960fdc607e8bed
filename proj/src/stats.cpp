#include "argscape/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace argscape {

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double effective_n) {
  const double root = std::sqrt(effective_n);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

TestResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("KS test needs samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n)};
}

TestResult ks_test_exponential(std::span<const double> samples, double rate) {
  return ks_test(samples, [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); });
}

TestResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("KS test needs samples");
  std::vector<double> a(x.begin(), x.end()), b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

TestResult chi_square_test(std::span<const std::size_t> observed,
                           std::span<const double> expected_probabilities) {
  if (observed.size() != expected_probabilities.size())
    throw std::invalid_argument("chi-square cell counts differ");
  double total = 0.0;
  for (std::size_t o : observed) total += static_cast<double>(o);
  double statistic = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = total * expected_probabilities[i];
    if (expected_probabilities[i] <= 0.0) {
      if (observed[i] != 0) return {std::numeric_limits<double>::infinity(), 0.0};
      continue;
    }
    const double diff = static_cast<double>(observed[i]) - expected;
    statistic += diff * diff / expected;
    ++cells;
  }
  if (cells < 2) return {statistic, 1.0};
  return {statistic, boost::math::gamma_q(0.5 * (cells - 1), 0.5 * statistic)};
}

TestResult chi_square_two_sample(std::span<const std::size_t> x, std::span<const std::size_t> y) {
  if (x.size() != y.size()) throw std::invalid_argument("chi-square cell counts differ");
  double nx = 0.0, ny = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    nx += static_cast<double>(x[i]);
    ny += static_cast<double>(y[i]);
  }
  double statistic = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double column = static_cast<double>(x[i] + y[i]);
    if (column == 0.0) continue;
    const double ex = nx * column / (nx + ny), ey = ny * column / (nx + ny);
    statistic += (x[i] - ex) * (x[i] - ex) / ex + (y[i] - ey) * (y[i] - ey) / ey;
    ++cells;
  }
  if (cells < 2) return {statistic, 1.0};
  return {statistic, boost::math::gamma_q(0.5 * (cells - 1), 0.5 * statistic)};
}

double Summary::standard_error() const {
  return count > 0 ? std::sqrt(variance / static_cast<double>(count)) : 0.0;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  double m2 = 0.0;
  for (double v : values) {
    ++s.count;
    const double delta = v - s.mean;
    s.mean += delta / static_cast<double>(s.count);
    m2 += delta * (v - s.mean);
  }
  s.variance = s.count > 1 ? m2 / static_cast<double>(s.count - 1) : 0.0;
  return s;
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("correlation needs paired samples");
  const Summary sx = summarize(x), sy = summarize(y);
  double cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) cov += (x[i] - sx.mean) * (y[i] - sy.mean);
  cov /= static_cast<double>(x.size() - 1);
  const double denom = std::sqrt(sx.variance * sy.variance);
  return denom > 0.0 ? cov / denom : 0.0;
}

double z_score(double estimate, double reference, double standard_error) {
  const double diff = estimate - reference;
  if (standard_error > 0.0) return diff / standard_error;
  if (diff == 0.0) return 0.0;
  return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

double slope_through_origin(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("slope needs paired samples");
  double xy = 0.0, xx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xy += x[i] * y[i];
    xx += x[i] * x[i];
  }
  return xy / xx;
}

}  // namespace argscape
