#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "argscape/arg.hpp"
#include "argscape/random.hpp"
#include "argscape/stats.hpp"
#include "argscape/tree_path.hpp"

namespace argscape {

/// Which lines a new branch may join and where split points are drawn.
///   full:      the whole graph built so far (exact construction);
///   smc_prime: lines of the current tree plus the line above its root;
///   smc:       as smc_prime, minus the branch from the split point up to
///              the next coalescence node of the current tree;
///   macs:      lines of the current tree and the `window - 1` trees before
///              it, plus the lines above their roots.
struct WalkVariant {
  enum class Kind { full, smc, smc_prime, macs };
  Kind kind = Kind::full;
  std::size_t window = 1;

  static WalkVariant full() { return {Kind::full, 1}; }
  static WalkVariant smc() { return {Kind::smc, 1}; }
  static WalkVariant smc_prime() { return {Kind::smc_prime, 1}; }
  static WalkVariant macs(std::size_t k);

  std::string name() const;
  /// Parses "full", "smc", "smc-prime", "macs(5)" or "macs5".
  static WalkVariant parse(const std::string& text);
};

struct WalkResult {
  TreePath path;
  /// The final graph as an event log; trees of `path` are read off it.
  std::shared_ptr<const ArgEventLog> graph;
  /// Candidate split positions U_1, U_2, ... including the final one beyond
  /// b that stopped the walk, and the retained length L used to draw each.
  std::vector<double> positions;
  std::vector<double> lengths;
};

/// Default cap on the number of split steps before resource_limit is thrown.
inline constexpr std::size_t kDefaultWalkStepBudget = 2'000'000;

/// Tree-valued process along [a, b] built from an n-coalescent at a.
WalkResult sample_walk(std::size_t n, double a, double b, double rho, WalkVariant variant,
                       RandomSource& rng, std::size_t step_budget = kDefaultWalkStepBudget);

/// Same, started from a given tree at position a. Leaf labels must be "1".."n"
/// in order (as produced by sample_kingman).
WalkResult sample_walk_from(const UltrametricTree& start, double a, double b, double rho,
                            WalkVariant variant, RandomSource& rng,
                            std::size_t step_budget = kDefaultWalkStepBudget);

/// KS test that rho * L_n * (U_n - U_{n-1}) are i.i.d. Exp(1), pooling the
/// given gaps and the lengths they were drawn with.
TestResult breakpoint_intensity_check(std::span<const double> gaps, std::span<const double> lengths,
                                      double rho);

/// Gaps between consecutive candidate positions of one walk, starting at a.
std::vector<double> walk_gaps(const WalkResult& walk, double a);

}  // namespace argscape
