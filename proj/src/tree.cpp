#include "argscape/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace argscape {

namespace {

constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();

}  // namespace

void DistanceMatrix::set(std::size_t i, std::size_t j, double value) {
  entries_[i * size_ + j] = value;
  entries_[j * size_ + i] = value;
}

bool DistanceMatrix::is_symmetric_with_zero_diagonal() const {
  for (std::size_t i = 0; i < size_; ++i) {
    if ((*this)(i, i) != 0.0) return false;
    for (std::size_t j = i + 1; j < size_; ++j) {
      if ((*this)(i, j) != (*this)(j, i) || (*this)(i, j) < 0.0) return false;
    }
  }
  return true;
}

bool DistanceMatrix::is_ultrametric(double tolerance) const {
  for (std::size_t i = 0; i < size_; ++i)
    for (std::size_t j = i + 1; j < size_; ++j)
      for (std::size_t k = 0; k < size_; ++k)
        if ((*this)(i, j) > std::max((*this)(i, k), (*this)(j, k)) + tolerance) return false;
  return true;
}

UltrametricTree::UltrametricTree(std::vector<std::string> leaf_labels, std::vector<Merge> merges)
    : labels_(std::move(leaf_labels)), merges_(std::move(merges)) {
  const std::size_t n = labels_.size();
  if (n == 0) throw std::invalid_argument("tree needs at least one leaf");
  if (merges_.size() != n - 1) throw std::invalid_argument("tree needs exactly n-1 merges");
  std::vector<char> used(2 * n - 1, 0);
  double previous = 0.0;
  for (std::size_t i = 0; i < merges_.size(); ++i) {
    const Merge& m = merges_[i];
    if (!(m.time >= previous) || !std::isfinite(m.time))
      throw std::invalid_argument("merge times must be finite, non-negative and ordered");
    previous = m.time;
    const std::size_t alive = n + i;
    if (m.left >= alive || m.right >= alive || m.left == m.right || used[m.left] || used[m.right])
      throw std::invalid_argument("merge refers to an unavailable lineage");
    used[m.left] = used[m.right] = 1;
  }
}

UltrametricTree UltrametricTree::leaf(std::string label) {
  return UltrametricTree({std::move(label)}, {});
}

NodeId UltrametricTree::root_node() const {
  if (merges_.empty()) throw std::logic_error("single-leaf tree has no root merge");
  return merges_.back().node;
}

std::vector<std::uint32_t> UltrametricTree::parent_merges() const {
  std::vector<std::uint32_t> parent(labels_.size() + merges_.size(), kNoParent);
  for (std::size_t i = 0; i < merges_.size(); ++i) {
    parent[merges_[i].left] = static_cast<std::uint32_t>(i);
    parent[merges_[i].right] = static_cast<std::uint32_t>(i);
  }
  return parent;
}

namespace {

std::size_t mrca_merge(const std::vector<std::uint32_t>& parent, std::size_t n, std::size_t i,
                       std::size_t j) {
  // Merge indices increase going up, so climb the lower one until they meet.
  std::size_t a = parent[i], b = parent[j];
  while (a != b) {
    if (a < b)
      a = parent[n + a];
    else
      b = parent[n + b];
  }
  return a;
}

}  // namespace

double UltrametricTree::mrca_time(std::size_t i, std::size_t j) const {
  if (i >= leaf_count() || j >= leaf_count()) throw std::out_of_range("leaf index");
  if (i == j) return 0.0;
  return merges_[mrca_merge(parent_merges(), leaf_count(), i, j)].time;
}

NodeId UltrametricTree::mrca_node(std::size_t i, std::size_t j) const {
  if (i >= leaf_count() || j >= leaf_count() || i == j) throw std::out_of_range("leaf pair");
  return merges_[mrca_merge(parent_merges(), leaf_count(), i, j)].node;
}

DistanceMatrix UltrametricTree::distance_matrix() const {
  const std::size_t n = leaf_count();
  DistanceMatrix d(n);
  std::vector<std::vector<std::size_t>> members(n + merges_.size());
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  for (std::size_t k = 0; k < merges_.size(); ++k) {
    const Merge& m = merges_[k];
    for (std::size_t a : members[m.left])
      for (std::size_t b : members[m.right]) d.set(a, b, 2.0 * m.time);
    auto& joined = members[n + k];
    joined = std::move(members[m.left]);
    joined.insert(joined.end(), members[m.right].begin(), members[m.right].end());
    members[m.right].clear();
  }
  return d;
}

bool UltrametricTree::same_genealogy(const UltrametricTree& other) const {
  if (labels_ != other.labels_) return false;
  // Each merge is summarized by its identity and the smallest leaf on each
  // side; replaying these in time order rebuilds the cluster hierarchy.
  auto signature = [](const UltrametricTree& t) {
    const std::size_t n = t.leaf_count();
    std::vector<std::size_t> min_leaf(n + t.merges_.size());
    for (std::size_t i = 0; i < n; ++i) min_leaf[i] = i;
    std::vector<std::tuple<double, NodeId, std::size_t, std::size_t>> out;
    for (std::size_t k = 0; k < t.merges_.size(); ++k) {
      const Merge& m = t.merges_[k];
      const std::size_t l = min_leaf[m.left], r = min_leaf[m.right];
      min_leaf[n + k] = std::min(l, r);
      out.emplace_back(m.time, m.node, std::min(l, r), std::max(l, r));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return signature(*this) == signature(other);
}

void FiniteMmSpace::validate() const {
  if (points.empty()) throw std::invalid_argument("mm-space needs at least one point");
  if (distances.size() != points.size() || weights.size() != points.size())
    throw std::invalid_argument("mm-space sizes disagree");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("mm-space weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12 * static_cast<double>(weights.size()))
    throw std::invalid_argument("mm-space weights must sum to one");
}

bool FiniteMmSpace::has_uniform_weights(double tolerance) const {
  const double expected = 1.0 / static_cast<double>(weights.size());
  return std::all_of(weights.begin(), weights.end(),
                     [&](double w) { return std::abs(w - expected) <= tolerance; });
}

std::vector<double> level_times(const UltrametricTree& tree) {
  std::vector<double> out;
  double previous = 0.0;
  for (const Merge& m : tree.merges()) {
    out.push_back(m.time - previous);
    previous = m.time;
  }
  return out;
}

FiniteMmSpace to_mm_space(const UltrametricTree& tree) {
  const std::size_t n = tree.leaf_count();
  return FiniteMmSpace{tree.leaf_labels(), tree.distance_matrix(),
                       std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

std::size_t lineage_count_at_depth(const UltrametricTree& tree, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("depth must be positive");
  const auto& merges = tree.merges();
  const auto done = std::upper_bound(merges.begin(), merges.end(), eps,
                                     [](double e, const Merge& m) { return e < m.time; });
  return tree.leaf_count() - static_cast<std::size_t>(done - merges.begin());
}

UltrametricTree restrict_leaves(const UltrametricTree& tree, std::span<const std::size_t> leaves) {
  const std::size_t n = tree.leaf_count();
  if (leaves.empty()) throw std::invalid_argument("leaf subset must be nonempty");
  constexpr Lineage kAbsent = std::numeric_limits<Lineage>::max();
  std::vector<Lineage> mapped(n + tree.merges().size(), kAbsent);
  std::vector<std::string> labels;
  for (std::size_t leaf : leaves) {
    if (leaf >= n || mapped[leaf] != kAbsent) throw std::invalid_argument("bad leaf subset");
    mapped[leaf] = static_cast<Lineage>(labels.size());
    labels.push_back(tree.leaf_labels()[leaf]);
  }
  const Lineage m = static_cast<Lineage>(labels.size());
  std::vector<Merge> merges;
  for (std::size_t k = 0; k < tree.merges().size(); ++k) {
    const Merge& g = tree.merges()[k];
    const Lineage l = mapped[g.left], r = mapped[g.right];
    if (l != kAbsent && r != kAbsent) {
      mapped[n + k] = m + static_cast<Lineage>(merges.size());
      merges.push_back({g.time, l, r, g.node});
    } else {
      mapped[n + k] = l != kAbsent ? l : r;
    }
  }
  return UltrametricTree(std::move(labels), std::move(merges));
}

}  // namespace argscape
