#pragma once

#include <cstddef>

namespace argscape {

/// First-event decomposition for the probabilities that two pairs of lines
/// share their coalescence across two loci at recombination distance r:
///   x: pairs (1,2) at the first locus and (3,4) at the second,
///   y: pairs (1,2) and (2,3),
///   z: the same pair (1,2) at both loci.
/// The arg variant uses joint coalescence of a double pair at rate 1; the aux
/// variant replaces it with the rate-2 decoupling event, which changes the
/// equation for z.
struct FirstEventSystem {
  enum class Variant { arg, aux };
  Variant variant = Variant::arg;
  double rho_distance = 0.0;
};

struct FirstEventSolution {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Builds the 3x3 system from the transition rates and solves it by Cramer's
/// rule. Throws std::invalid_argument for negative distances.
FirstEventSolution solve_first_event_system(const FirstEventSystem& system);

/// 2 / (9 + 13 r + 2 r^2): probability that the cross pairs share their
/// coalescence event.
double prob_equal_cross_pair(double rho_v);

/// (r + 9) / (2 r^2 + 13 r + 9): probability that one pair coalesces in the
/// same event at both loci.
double prob_equal_same_pair(double rho_v);

/// 2 / (9 + 7 r + r^2): probability of at least one decoupling event from
/// two single lines on each side.
double prob_decoupling_event(double rho_u);

/// binom(n,2)^2 times prob_equal_cross_pair. n >= 2.
double cross_pair_union_bound(std::size_t n, double rho_v);

/// binom(n,2)^2 times prob_decoupling_event. n >= 2.
double decoupling_union_bound(std::size_t n, double rho_u);

/// 2 n^4 / (9 + 7 r + r^2), the covariance bound per unit sup-norms.
double mixing_bound(std::size_t n, double rho_u);

/// Exact E[(S_2 + ... + S_N)^2] for independent S_k ~ Exp(k(k-1)/2).
double height_second_moment(std::size_t n);
/// Its limit 4 + 4(pi^2/3 - 3).
double height_second_moment_limit();
/// The cruder series bound 8(pi^2/3 - 3) + 8.
double height_second_moment_crude_bound();

/// E[height] = 2(1 - 1/N).
double expected_height(std::size_t n);

struct TightnessBound {
  double squared_form = 0.0;  // rho^2 h^2 E[height^2]
  double printed_form = 0.0;  // 11 rho h^2
};

/// n = 0 means the N -> infinity limit.
TightnessBound tightness_rhs(double rho, double h, std::size_t n);

/// A bound exceeding the trivial value of its quantity carries no information.
struct BoundValue {
  double value = 0.0;
  bool vacuous = false;
};

BoundValue flag_vacuous(double value, double trivial_bound);

}  // namespace argscape
