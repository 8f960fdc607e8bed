#include "argscape/analytic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace argscape {

namespace {

void require_non_negative(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("distance must be non-negative");
}

double determinant(const std::array<std::array<double, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double binomial2(std::size_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

}  // namespace

FirstEventSolution solve_first_event_system(const FirstEventSystem& system) {
  const double r = system.rho_distance;
  require_non_negative(r);
  // x: four single lines (two per locus). Rates: 4 cross pairs (1) lead to y,
  // 2 same-side pairs (1) end the event with probability 0; splits of single
  // lines do not change the state.
  // y: one double line, one single per side. The double splits (rate r) to x,
  // the two single lines join (rate 1) to z, single-double pairs (rate 2) end
  // it.
  // z: two double lines. Each splits at rate r (total 2r) to y; the pair
  // joins (arg: rate 1) or decouples (aux: rate 2), both counted as success.
  const double z_success = system.variant == FirstEventSystem::Variant::arg ? 1.0 : 2.0;
  // Rows: a x + b y + c z = d.
  const std::array<std::array<double, 3>, 3> m{{
      {1.0, -4.0 / 6.0, 0.0},
      {-r / (r + 3.0), 1.0, -1.0 / (r + 3.0)},
      {0.0, -2.0 * r / (2.0 * r + z_success), 1.0},
  }};
  const std::array<double, 3> d{0.0, 0.0, z_success / (2.0 * r + z_success)};
  const double det = determinant(m);
  FirstEventSolution out;
  double* unknowns[3] = {&out.x, &out.y, &out.z};
  for (int col = 0; col < 3; ++col) {
    auto replaced = m;
    for (int row = 0; row < 3; ++row) replaced[row][col] = d[row];
    *unknowns[col] = determinant(replaced) / det;
  }
  return out;
}

double prob_equal_cross_pair(double rho_v) {
  require_non_negative(rho_v);
  return 2.0 / (9.0 + 13.0 * rho_v + 2.0 * rho_v * rho_v);
}

double prob_equal_same_pair(double rho_v) {
  require_non_negative(rho_v);
  return (rho_v + 9.0) / (9.0 + 13.0 * rho_v + 2.0 * rho_v * rho_v);
}

double prob_decoupling_event(double rho_u) {
  require_non_negative(rho_u);
  return 2.0 / (9.0 + 7.0 * rho_u + rho_u * rho_u);
}

double cross_pair_union_bound(std::size_t n, double rho_v) {
  if (n < 2) throw std::invalid_argument("union bound needs n >= 2");
  const double pairs = binomial2(n);
  return pairs * pairs * prob_equal_cross_pair(rho_v);
}

double decoupling_union_bound(std::size_t n, double rho_u) {
  if (n < 2) throw std::invalid_argument("union bound needs n >= 2");
  const double pairs = binomial2(n);
  return pairs * pairs * prob_decoupling_event(rho_u);
}

double mixing_bound(std::size_t n, double rho_u) {
  if (n < 1) throw std::invalid_argument("mixing bound needs n >= 1");
  if (!(rho_u > 0.0)) throw std::invalid_argument("mixing bound needs rho_u > 0");
  const double n4 = std::pow(static_cast<double>(n), 4);
  return 2.0 * n4 / (9.0 + 7.0 * rho_u + rho_u * rho_u);
}

double height_second_moment(std::size_t n) {
  if (n < 2) throw std::invalid_argument("height moment needs N >= 2");
  double mean = 0.0, variance = 0.0;
  for (std::size_t k = 2; k <= n; ++k) {
    const double rate = binomial2(k);
    mean += 1.0 / rate;
    variance += 1.0 / (rate * rate);
  }
  return mean * mean + variance;
}

double height_second_moment_limit() {
  return 4.0 + 4.0 * (std::numbers::pi * std::numbers::pi / 3.0 - 3.0);
}

double height_second_moment_crude_bound() {
  return 8.0 * (std::numbers::pi * std::numbers::pi / 3.0 - 3.0) + 8.0;
}

double expected_height(std::size_t n) {
  if (n < 1) throw std::invalid_argument("need at least one leaf");
  return 2.0 * (1.0 - 1.0 / static_cast<double>(n));
}

TightnessBound tightness_rhs(double rho, double h, std::size_t n) {
  if (!(rho > 0.0) || !(h > 0.0)) throw std::invalid_argument("rho and h must be positive");
  const double moment = n == 0 ? height_second_moment_limit() : height_second_moment(n);
  return {rho * rho * h * h * moment, 11.0 * rho * h * h};
}

BoundValue flag_vacuous(double value, double trivial_bound) {
  return {value, value > trivial_bound};
}

}  // namespace argscape
