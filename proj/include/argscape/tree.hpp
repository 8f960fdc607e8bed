#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace argscape {

/// Identity of a merge node. Trees read off the same graph report the same
/// NodeId for the same coalescence event, so identities (not times) decide
/// whether two loci share a merge.
using NodeId = std::uint64_t;

/// Lineage index inside one UltrametricTree: leaves are 0..n-1, the lineage
/// created by merge i is n+i.
using Lineage = std::uint32_t;

struct Merge {
  double time = 0.0;
  Lineage left = 0;
  Lineage right = 0;
  NodeId node = 0;

  friend bool operator==(const Merge&, const Merge&) = default;
};

class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t size) : size_(size), entries_(size * size, 0.0) {}

  std::size_t size() const noexcept { return size_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * size_ + j]; }
  /// Sets both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double value);

  bool is_symmetric_with_zero_diagonal() const;
  /// r(i,j) <= max(r(i,k), r(j,k)) for all triples, up to `tolerance`.
  bool is_ultrametric(double tolerance = 1e-12) const;

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<double> entries_;
};

/// Leaf-labelled binary genealogy stored as its merge events.
///
/// Leaves sit at time 0 and merges are kept in time order. Distances between
/// leaves are twice the time of their most recent common ancestor.
class UltrametricTree {
 public:
  UltrametricTree() = default;
  /// Validates the invariants: merge times non-decreasing and non-negative,
  /// every lineage merged at most once and only after it exists, and exactly
  /// n-1 merges.
  UltrametricTree(std::vector<std::string> leaf_labels, std::vector<Merge> merges);

  /// Single-leaf tree.
  static UltrametricTree leaf(std::string label);

  std::size_t leaf_count() const noexcept { return labels_.size(); }
  const std::vector<std::string>& leaf_labels() const noexcept { return labels_; }
  const std::vector<Merge>& merges() const noexcept { return merges_; }
  double root_time() const noexcept { return merges_.empty() ? 0.0 : merges_.back().time; }
  NodeId root_node() const;

  /// Time of the merge that joins leaves i and j (0 if i == j).
  double mrca_time(std::size_t i, std::size_t j) const;
  /// Node identity of the merge joining leaves i and j.
  NodeId mrca_node(std::size_t i, std::size_t j) const;

  DistanceMatrix distance_matrix() const;

  /// Same leaf labels, same merge identities joining the same clusters.
  /// Times are not compared: equal identities imply equal times.
  bool same_genealogy(const UltrametricTree& other) const;

  friend bool operator==(const UltrametricTree&, const UltrametricTree&) = default;

 private:
  // For every lineage, the merge index that consumes it (or npos for root).
  std::vector<std::uint32_t> parent_merges() const;

  std::vector<std::string> labels_;
  std::vector<Merge> merges_;
};

struct FiniteMmSpace {
  std::vector<std::string> points;
  DistanceMatrix distances;
  std::vector<double> weights;

  std::size_t size() const noexcept { return points.size(); }
  /// Throws std::invalid_argument if sizes disagree, a weight is not positive
  /// or the weights do not sum to one.
  void validate() const;
  bool has_uniform_weights(double tolerance = 1e-12) const;
};

/// Durations S_n, ..., S_2 during which exactly k lineages exist. Empty for a
/// single leaf.
std::vector<double> level_times(const UltrametricTree& tree);

FiniteMmSpace to_mm_space(const UltrametricTree& tree);

/// Number of lineages alive at time `eps` (leaves at time 0).
std::size_t lineage_count_at_depth(const UltrametricTree& tree, double eps);

/// Tree restricted to the given leaf indices; merge identities are kept.
UltrametricTree restrict_leaves(const UltrametricTree& tree, std::span<const std::size_t> leaves);

}  // namespace argscape
