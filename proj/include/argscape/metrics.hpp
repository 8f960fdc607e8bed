#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "argscape/arg.hpp"
#include "argscape/random.hpp"
#include "argscape/tree.hpp"
#include "argscape/tree_path.hpp"

namespace argscape {

/// max(max_a min_b d(a,b), max_b min_a d(a,b)) over index sets of `metric`.
double hausdorff_distance(std::span<const std::size_t> a, std::span<const std::size_t> b,
                          const DistanceMatrix& metric);

/// Half the l1 distance between two probability vectors.
double total_variation(std::span<const double> mu1, std::span<const double> mu2);

/// Infimal eps with mu1(F) <= mu2(F^eps) + eps for every F, F^eps the open
/// eps-neighbourhood. The deficit of the max-flow transport over pairs at
/// distance < eps only changes when eps crosses a matrix entry, so the
/// infimum is found exactly by scanning the sorted distinct distances.
double prohorov_distance(std::span<const double> mu1, std::span<const double> mu2,
                         const DistanceMatrix& metric);

/// Largest number of points in a common sub-isometry of two uniform spaces
/// of equal size, and the Gromov total variation 1 - M/N derived from it.
inline constexpr std::size_t kGtvExactMaxPoints = 8;
std::size_t max_common_subisometry(const FiniteMmSpace& x1, const FiniteMmSpace& x2,
                                   double tolerance = 1e-9);
double gtv_exact(const FiniteMmSpace& x1, const FiniteMmSpace& x2);
double gtv_exact(const UltrametricTree& t1, const UltrametricTree& t2);

/// A split sitting on a branch of a tree: the lineage above which leaves are
/// cut when the mark falls between two loci.
struct BranchMark {
  Lineage lineage = 0;
  double time = 0.0;
  double mark = 0.0;
};

/// Splits on the leaf-to-root paths of the tree of `leaves` at locus u, in
/// the lineage numbering of extract_tree(log, leaves, u).
std::vector<BranchMark> path_marks(const ArgEventLog& log, std::span<const Particle> leaves, double u);

/// Per leaf: is some mark on its path to the root inside [lo, hi]?
std::vector<char> cut_leaves(const UltrametricTree& tree, std::span<const BranchMark> marks, double lo,
                             double hi);

/// Fresh splits on every branch of a fixed tree: a Poisson process of rate
/// rho * (b - a) per unit branch length, marks uniform on [a, b].
std::vector<BranchMark> sample_branch_marks(const UltrametricTree& tree, double rho, double a, double b,
                                            RandomSource& rng);

/// Fraction of leaves cut by marks in [lo, hi].
double d_aux(const UltrametricTree& tree, std::span<const BranchMark> marks, double lo, double hi);

/// Trees of one leaf set at two loci of the same graph, sharing node identities.
struct CoupledTreePair {
  std::shared_ptr<const ArgEventLog> arg;
  std::vector<Particle> leaves;
  double locus_u = 0.0;
  double locus_v = 0.0;
  UltrametricTree tree_u;
  UltrametricTree tree_v;
};

CoupledTreePair make_coupled_pair(std::shared_ptr<const ArgEventLog> arg, std::vector<Particle> leaves,
                                  double u, double v);
CoupledTreePair make_coupled_pair(std::shared_ptr<const ArgEventLog> arg, double u, double v);

/// Fraction of leaves whose path to the root of tree_u carries a split with
/// mark in the closed interval between the loci. Hudson logs do not record
/// splits outside the tracked material, so they are rejected with
/// unsupported_instance.
double d_aux(const CoupledTreePair& pair);

/// Distances among the 2N leaf images (tree_u leaves first, then tree_v) in
/// the common tree obtained by gluing both trees along the paths of the
/// leaves not cut between the loci, up to the root time of tree_u. Without
/// uncut leaves the two roots are identified instead.
DistanceMatrix glued_distance_matrix(const CoupledTreePair& pair);

struct GhBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// lower = |diam(tree_u) - diam(tree_v)| / 2; upper = Hausdorff distance of
/// the two leaf images inside the glued tree.
GhBounds gh_bounds(const CoupledTreePair& pair);

enum class PathDistance { d_aux_chain, gtv_exact, gh_upper };
PathDistance parse_path_distance(const std::string& text);
std::string to_string(PathDistance distance);

/// Total variation of the piecewise-constant path under the given jump
/// distance. d_aux_chain sums d_aux over every split mark in (a, b] since a
/// mark can cut leaves without changing the tree; the other distances sum
/// over the breakpoints. d_aux_chain and gh_upper need path.source.
double path_variation(const TreePath& path, PathDistance distance);

}  // namespace argscape
