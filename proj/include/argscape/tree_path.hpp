#pragma once

#include <memory>
#include <span>
#include <vector>

#include "argscape/arg.hpp"
#include "argscape/tree.hpp"

namespace argscape {

/// Piecewise-constant map from genome position to tree. Tree i covers
/// (breakpoints[i-1], breakpoints[i]], the first tree starts at a and the last
/// ends at b.
struct TreePath {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> breakpoints;
  std::vector<UltrametricTree> trees;
  /// ARG the path was read from, with the followed leaves, when available.
  /// d_aux needs it to see which splits hit which leaves.
  std::shared_ptr<const ArgEventLog> source;
  std::vector<Particle> leaves;

  const UltrametricTree& at(double u) const;
  std::size_t interval_of(double u) const;
  /// Same path on [c, d] with a <= c < d <= b.
  TreePath restrict(double c, double d) const;
};

/// Trees of `leaves` along the whole genome. Candidate breakpoints are the
/// split marks; those where the tree does not change are pruned.
TreePath tree_path(std::shared_ptr<const ArgEventLog> log, std::span<const Particle> leaves);
TreePath tree_path(const ArgEventLog& log, std::span<const Particle> leaves);
TreePath tree_path(const ArgEventLog& log);

struct DistinctTreeCount {
  std::size_t splits = 0;
  std::size_t trees = 0;
};

/// Split count R and the number of distinct trees in the all-leaf path.
DistinctTreeCount distinct_tree_count(const ArgEventLog& log);

}  // namespace argscape
