#include "argscape/tree_path.hpp"

#include <algorithm>
#include <stdexcept>

namespace argscape {

std::size_t TreePath::interval_of(double u) const {
  if (!(u >= a && u <= b)) throw std::invalid_argument("position outside the path's genome");
  return static_cast<std::size_t>(std::lower_bound(breakpoints.begin(), breakpoints.end(), u) -
                                  breakpoints.begin());
}

const UltrametricTree& TreePath::at(double u) const { return trees[interval_of(u)]; }

TreePath TreePath::restrict(double c, double d) const {
  if (!(a <= c && c < d && d <= b)) throw std::invalid_argument("sub-interval must lie in [a, b]");
  TreePath out{c, d, {}, {}, source, leaves};
  const std::size_t first = interval_of(c), last = interval_of(d);
  for (std::size_t i = first; i <= last; ++i) {
    out.trees.push_back(trees[i]);
    if (i < last) out.breakpoints.push_back(breakpoints[i]);
  }
  // A breakpoint equal to c belongs to the tree left of c; drop it.
  if (!out.breakpoints.empty() && out.breakpoints.front() <= c) {
    out.breakpoints.erase(out.breakpoints.begin());
    out.trees.erase(out.trees.begin());
  }
  return out;
}

TreePath tree_path(std::shared_ptr<const ArgEventLog> log, std::span<const Particle> leaves) {
  TreePath path{log->a, log->b, {}, {}, log, {leaves.begin(), leaves.end()}};
  std::vector<double> marks;
  for (const ArgEvent& e : log->events)
    if (e.type == ArgEventType::split && e.mark > log->a && e.mark < log->b) marks.push_back(e.mark);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  // The tree is constant on (U_i, U_{i+1}], so read it at right endpoints.
  path.trees.push_back(extract_tree(*log, leaves, marks.empty() ? log->b : marks.front()));
  for (std::size_t i = 0; i < marks.size(); ++i) {
    const double right = i + 1 < marks.size() ? marks[i + 1] : log->b;
    UltrametricTree next = extract_tree(*log, leaves, right);
    if (next.same_genealogy(path.trees.back())) continue;
    path.breakpoints.push_back(marks[i]);
    path.trees.push_back(std::move(next));
  }
  return path;
}

TreePath tree_path(const ArgEventLog& log, std::span<const Particle> leaves) {
  return tree_path(std::make_shared<const ArgEventLog>(log), leaves);
}

TreePath tree_path(const ArgEventLog& log) {
  const auto leaves = all_leaves(log);
  return tree_path(log, leaves);
}

DistinctTreeCount distinct_tree_count(const ArgEventLog& log) {
  return {log.split_count(), tree_path(log).trees.size()};
}

}  // namespace argscape
