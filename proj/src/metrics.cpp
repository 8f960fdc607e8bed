#include "argscape/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "argscape/errors.hpp"

namespace argscape {

namespace {

void check_index_set(std::span<const std::size_t> set, const DistanceMatrix& metric) {
  if (set.empty()) throw std::invalid_argument("point set must be nonempty");
  for (std::size_t i : set)
    if (i >= metric.size()) throw std::invalid_argument("point index outside the distance matrix");
}

void check_probability(std::span<const double> mu) {
  double total = 0.0;
  for (double p : mu) {
    if (!(p >= 0.0)) throw std::invalid_argument("probability vector has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("probability vector does not sum to one");
}

// Dinic's algorithm on a dense bipartite transport network.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : adjacency_(nodes), level_(nodes), next_(nodes) {}

  void add_edge(std::size_t from, std::size_t to, double capacity) {
    adjacency_[from].push_back(arcs_.size());
    arcs_.push_back({to, capacity});
    adjacency_[to].push_back(arcs_.size());
    arcs_.push_back({from, 0.0});
  }

  double run(std::size_t source, std::size_t sink) {
    double total = 0.0;
    while (build_levels(source, sink)) {
      std::fill(next_.begin(), next_.end(), 0);
      while (true) {
        const double pushed = push(source, sink, std::numeric_limits<double>::infinity());
        if (pushed <= kEpsilon) break;
        total += pushed;
      }
    }
    return total;
  }

 private:
  static constexpr double kEpsilon = 1e-15;
  struct Arc {
    std::size_t to;
    double capacity;
  };

  bool build_levels(std::size_t source, std::size_t sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<std::size_t> queue{source};
    level_[source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t v = queue[head];
      for (std::size_t id : adjacency_[v]) {
        const Arc& arc = arcs_[id];
        if (arc.capacity > kEpsilon && level_[arc.to] < 0) {
          level_[arc.to] = level_[v] + 1;
          queue.push_back(arc.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  double push(std::size_t v, std::size_t sink, double limit) {
    if (v == sink) return limit;
    for (std::size_t& i = next_[v]; i < adjacency_[v].size(); ++i) {
      const std::size_t id = adjacency_[v][i];
      Arc& arc = arcs_[id];
      if (arc.capacity <= kEpsilon || level_[arc.to] != level_[v] + 1) continue;
      const double pushed = push(arc.to, sink, std::min(limit, arc.capacity));
      if (pushed > kEpsilon) {
        arc.capacity -= pushed;
        arcs_[id ^ 1].capacity += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
};

// Mass of mu1 that cannot be moved onto mu2 along pairs with d <= threshold.
double transport_deficit(std::span<const double> mu1, std::span<const double> mu2,
                         const DistanceMatrix& metric, double threshold) {
  const std::size_t n = mu1.size();
  const std::size_t source = 2 * n, sink = 2 * n + 1;
  MaxFlow flow(2 * n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    if (mu1[i] > 0.0) flow.add_edge(source, i, mu1[i]);
    if (mu2[i] > 0.0) flow.add_edge(n + i, sink, mu2[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (mu1[i] <= 0.0) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (mu2[j] > 0.0 && metric(i, j) <= threshold) flow.add_edge(i, n + j, 1.0);
  }
  return std::max(0.0, 1.0 - flow.run(source, sink));
}

}  // namespace

double hausdorff_distance(std::span<const std::size_t> a, std::span<const std::size_t> b,
                          const DistanceMatrix& metric) {
  check_index_set(a, metric);
  check_index_set(b, metric);
  auto directed = [&](std::span<const std::size_t> from, std::span<const std::size_t> to) {
    double worst = 0.0;
    for (std::size_t i : from) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t j : to) nearest = std::min(nearest, metric(i, j));
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

double total_variation(std::span<const double> mu1, std::span<const double> mu2) {
  if (mu1.size() != mu2.size()) throw std::invalid_argument("measures live on different index sets");
  double sum = 0.0;
  for (std::size_t i = 0; i < mu1.size(); ++i) sum += std::abs(mu1[i] - mu2[i]);
  return 0.5 * sum;
}

double prohorov_distance(std::span<const double> mu1, std::span<const double> mu2,
                         const DistanceMatrix& metric) {
  if (mu1.size() != mu2.size() || mu1.size() != metric.size())
    throw std::invalid_argument("measures and distance matrix have different sizes");
  check_probability(mu1);
  check_probability(mu2);
  // For eps in (d_k, d_{k+1}] the usable pairs are those with d <= d_k and
  // the deficit g_k is constant, so the infimum over that piece is
  // max(d_k, g_k). eps = 1 is always feasible.
  std::vector<double> levels{0.0};
  for (std::size_t i = 0; i < metric.size(); ++i)
    for (std::size_t j = 0; j < metric.size(); ++j)
      if (metric(i, j) < 1.0) levels.push_back(metric(i, j));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  double best = 1.0;
  for (double d : levels) {
    if (d >= best) break;
    best = std::min(best, std::max(d, transport_deficit(mu1, mu2, metric, d)));
  }
  return best;
}

std::size_t max_common_subisometry(const FiniteMmSpace& x1, const FiniteMmSpace& x2, double tolerance) {
  x1.validate();
  x2.validate();
  if (!x1.has_uniform_weights() || !x2.has_uniform_weights())
    throw unsupported_instance("exact Gromov total variation needs uniform weights");
  if (x1.size() != x2.size()) throw unsupported_instance("exact Gromov total variation needs equal sizes");
  const std::size_t n = x1.size();
  if (n > kGtvExactMaxPoints)
    throw unsupported_instance("exact Gromov total variation is limited to " +
                               std::to_string(kGtvExactMaxPoints) + " points");
  constexpr std::size_t kUnmatched = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> image(n, kUnmatched);
  std::vector<char> used(n, 0);
  std::size_t best = 0;
  // Branch over points of x1 in order: match to a free point of x2 that keeps
  // all distances to earlier matched points, or leave unmatched.
  auto search = [&](auto&& self, std::size_t i, std::size_t matched) -> void {
    if (matched + (n - i) <= best) return;
    if (i == n) {
      best = matched;
      return;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      bool consistent = true;
      for (std::size_t k = 0; k < i && consistent; ++k)
        if (image[k] != kUnmatched &&
            std::abs(x1.distances(i, k) - x2.distances(j, image[k])) > tolerance)
          consistent = false;
      if (!consistent) continue;
      used[j] = 1;
      image[i] = j;
      self(self, i + 1, matched + 1);
      image[i] = kUnmatched;
      used[j] = 0;
      if (best == n) return;
    }
    self(self, i + 1, matched);
  };
  search(search, 0, 0);
  return best;
}

double gtv_exact(const FiniteMmSpace& x1, const FiniteMmSpace& x2) {
  const std::size_t m = max_common_subisometry(x1, x2);
  return 1.0 - static_cast<double>(m) / static_cast<double>(x1.size());
}

double gtv_exact(const UltrametricTree& t1, const UltrametricTree& t2) {
  return gtv_exact(to_mm_space(t1), to_mm_space(t2));
}

std::vector<BranchMark> path_marks(const ArgEventLog& log, std::span<const Particle> leaves, double u) {
  if (!(u >= log.a && u <= log.b)) throw std::invalid_argument("locus outside the genome");
  if (leaves.empty()) throw std::invalid_argument("leaf set must be nonempty");
  // Same replay as extract_tree, also recording splits met on the way.
  std::unordered_map<Particle, Lineage> followed;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i] == 0 || leaves[i] > log.n_leaves) throw std::invalid_argument("leaf id out of range");
    if (!followed.emplace(leaves[i], static_cast<Lineage>(i)).second)
      throw std::invalid_argument("repeated leaf id");
  }
  const std::size_t m = leaves.size();
  std::size_t merges = 0;
  std::vector<BranchMark> marks;
  for (const ArgEvent& e : log.events) {
    if (followed.size() <= 1) break;
    if (e.type == ArgEventType::coalesce) {
      auto first = followed.find(e.parts[0]);
      auto second = followed.find(e.parts[1]);
      if (first == followed.end() && second == followed.end()) continue;
      const bool both = first != followed.end() && second != followed.end();
      const Lineage carried = first != followed.end() ? first->second : second->second;
      followed.erase(e.parts[0]);
      followed.erase(e.parts[1]);
      if (both) {
        followed.emplace(e.parts[2], static_cast<Lineage>(m + merges));
        ++merges;
      } else {
        followed.emplace(e.parts[2], carried);
      }
    } else {
      auto it = followed.find(e.parts[0]);
      if (it == followed.end()) continue;
      const Lineage lineage = it->second;
      followed.erase(it);
      marks.push_back({lineage, e.time, e.mark});
      followed.emplace(u <= e.mark ? e.parts[1] : e.parts[2], lineage);
    }
  }
  return marks;
}

std::vector<char> cut_leaves(const UltrametricTree& tree, std::span<const BranchMark> marks, double lo,
                             double hi) {
  const std::size_t n = tree.leaf_count();
  const auto& merges = tree.merges();
  std::vector<char> hit(n + merges.size(), 0);
  for (const BranchMark& m : marks) {
    if (m.lineage >= hit.size()) throw std::invalid_argument("mark on a lineage outside the tree");
    if (m.mark >= lo && m.mark <= hi) hit[m.lineage] = 1;
  }
  // A leaf is cut if any lineage on its way up is hit; push hits downwards.
  for (std::size_t k = merges.size(); k-- > 0;) {
    if (!hit[n + k]) continue;
    hit[merges[k].left] = 1;
    hit[merges[k].right] = 1;
  }
  hit.resize(n);
  return hit;
}

std::vector<BranchMark> sample_branch_marks(const UltrametricTree& tree, double rho, double a, double b,
                                            RandomSource& rng) {
  if (!(rho > 0.0) || !(b > a)) throw std::invalid_argument("sample_branch_marks needs rho > 0 and a < b");
  const std::size_t n = tree.leaf_count();
  const auto& merges = tree.merges();
  const double rate = rho * (b - a);
  std::vector<BranchMark> marks;
  for (std::size_t k = 0; k < merges.size(); ++k) {
    for (Lineage child : {merges[k].left, merges[k].right}) {
      const double bottom = child < n ? 0.0 : merges[child - n].time;
      for (double t = bottom + rng.exponential(rate); t < merges[k].time; t += rng.exponential(rate))
        marks.push_back({child, t, a + (b - a) * rng.uniform()});
    }
  }
  return marks;
}

double d_aux(const UltrametricTree& tree, std::span<const BranchMark> marks, double lo, double hi) {
  const auto cut = cut_leaves(tree, marks, lo, hi);
  const auto count = std::count(cut.begin(), cut.end(), 1);
  return static_cast<double>(count) / static_cast<double>(tree.leaf_count());
}

CoupledTreePair make_coupled_pair(std::shared_ptr<const ArgEventLog> arg, std::vector<Particle> leaves,
                                  double u, double v) {
  if (!arg) throw std::invalid_argument("coupled pair needs a graph");
  CoupledTreePair pair;
  pair.tree_u = extract_tree(*arg, leaves, u);
  pair.tree_v = extract_tree(*arg, leaves, v);
  pair.arg = std::move(arg);
  pair.leaves = std::move(leaves);
  pair.locus_u = u;
  pair.locus_v = v;
  return pair;
}

CoupledTreePair make_coupled_pair(std::shared_ptr<const ArgEventLog> arg, double u, double v) {
  if (!arg) throw std::invalid_argument("coupled pair needs a graph");
  auto leaves = all_leaves(*arg);
  return make_coupled_pair(std::move(arg), std::move(leaves), u, v);
}

namespace {

std::vector<char> pair_cut(const CoupledTreePair& pair) {
  const auto marks = path_marks(*pair.arg, pair.leaves, pair.locus_u);
  return cut_leaves(pair.tree_u, marks, std::min(pair.locus_u, pair.locus_v),
                    std::max(pair.locus_u, pair.locus_v));
}

// For every leaf, the first merge time at which its cluster contains an
// uncut leaf, and one such uncut leaf. Uncut leaves get (0, themselves).
struct Gate {
  double time = 0.0;
  std::size_t anchor = 0;
};

std::vector<Gate> gates(const UltrametricTree& tree, const std::vector<char>& cut) {
  const std::size_t n = tree.leaf_count();
  constexpr std::size_t kNoAnchor = std::numeric_limits<std::size_t>::max();
  std::vector<Gate> result(n);
  std::vector<std::size_t> anchor(n + tree.merges().size(), kNoAnchor);
  std::vector<std::vector<std::size_t>> waiting(n + tree.merges().size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!cut[i]) {
      anchor[i] = i;
      result[i] = {0.0, i};
    } else {
      waiting[i].push_back(i);
    }
  }
  for (std::size_t k = 0; k < tree.merges().size(); ++k) {
    const Merge& m = tree.merges()[k];
    const std::size_t created = n + k;
    anchor[created] = anchor[m.left] != kNoAnchor ? anchor[m.left] : anchor[m.right];
    for (Lineage side : {m.left, m.right}) {
      if (anchor[created] != kNoAnchor) {
        for (std::size_t leaf : waiting[side]) result[leaf] = {m.time, anchor[created]};
      } else {
        waiting[created].insert(waiting[created].end(), waiting[side].begin(), waiting[side].end());
      }
      waiting[side].clear();
    }
  }
  return result;
}

}  // namespace

double d_aux(const CoupledTreePair& pair) {
  if (pair.arg->model == ArgModel::hudson)
    throw unsupported_instance("d_aux needs a log that records every split (griffiths model)");
  const auto cut = pair_cut(pair);
  return static_cast<double>(std::count(cut.begin(), cut.end(), 1)) /
         static_cast<double>(pair.tree_u.leaf_count());
}

DistanceMatrix glued_distance_matrix(const CoupledTreePair& pair) {
  const std::size_t n = pair.tree_u.leaf_count();
  if (pair.tree_v.leaf_count() != n || pair.tree_u.leaf_labels() != pair.tree_v.leaf_labels())
    throw std::invalid_argument("coupled trees must have the same leaves");
  const auto cut = pair_cut(pair);
  const DistanceMatrix du = pair.tree_u.distance_matrix();
  const DistanceMatrix dv = pair.tree_v.distance_matrix();
  DistanceMatrix glued(2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      glued.set(i, j, du(i, j));
      glued.set(n + i, n + j, dv(i, j));
    }
  const double top = pair.tree_u.root_time();
  if (std::all_of(cut.begin(), cut.end(), [](char c) { return c != 0; })) {
    const double wedge = top + pair.tree_v.root_time();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) glued.set(i, n + j, wedge);
    return glued;
  }
  // Shared part: paths of uncut leaves up to the root time of tree_u. A point
  // on it is (uncut leaf, height); two such points meet at
  // max(heights, mrca time of the leaves).
  const auto gate_u = gates(pair.tree_u, cut);
  const auto gate_v = gates(pair.tree_v, cut);
  for (std::size_t i = 0; i < n; ++i) {
    const double su = gate_u[i].time;
    for (std::size_t j = 0; j < n; ++j) {
      // tree_v's path may join the shared part above its top; it then walks
      // back down to the top.
      const double tv = gate_v[j].time;
      const double sv = std::min(tv, top);
      const double to_gate_v = tv + (tv - sv);
      const double meet = std::max({su, sv, pair.tree_u.mrca_time(gate_u[i].anchor, gate_v[j].anchor)});
      glued.set(i, n + j, su + (meet - su) + (meet - sv) + to_gate_v);
    }
  }
  return glued;
}

GhBounds gh_bounds(const CoupledTreePair& pair) {
  const std::size_t n = pair.tree_u.leaf_count();
  GhBounds bounds;
  bounds.lower = std::abs(pair.tree_u.root_time() - pair.tree_v.root_time());
  const DistanceMatrix glued = glued_distance_matrix(pair);
  std::vector<std::size_t> a(n), b(n);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), n);
  bounds.upper = hausdorff_distance(a, b, glued);
  return bounds;
}

PathDistance parse_path_distance(const std::string& text) {
  if (text == "d-aux" || text == "d_aux" || text == "d-aux-chain") return PathDistance::d_aux_chain;
  if (text == "gtv-exact" || text == "gtv") return PathDistance::gtv_exact;
  if (text == "gh-upper" || text == "gh") return PathDistance::gh_upper;
  throw std::invalid_argument("unknown path distance '" + text + "'");
}

std::string to_string(PathDistance distance) {
  switch (distance) {
    case PathDistance::d_aux_chain:
      return "d-aux-chain";
    case PathDistance::gtv_exact:
      return "gtv-exact";
    case PathDistance::gh_upper:
      return "gh-upper";
  }
  return "unknown";
}

double path_variation(const TreePath& path, PathDistance distance) {
  if (distance == PathDistance::gtv_exact) {
    double total = 0.0;
    for (std::size_t i = 1; i < path.trees.size(); ++i) total += gtv_exact(path.trees[i - 1], path.trees[i]);
    return total;
  }
  if (!path.source) throw unsupported_instance("path variation under " + to_string(distance) +
                                               " needs the source graph of the path");
  const ArgEventLog& log = *path.source;
  std::vector<double> marks;
  for (const ArgEvent& e : log.events)
    if (e.type == ArgEventType::split) marks.push_back(e.mark);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  if (distance == PathDistance::d_aux_chain) {
    if (log.model == ArgModel::hudson)
      throw unsupported_instance("d_aux needs a log that records every split (griffiths model)");
    // Counts are summed as integers so the result is a single division.
    long cut = 0;
    for (double m : marks) {
      if (!(m > path.a && m <= path.b)) continue;
      const UltrametricTree tree = extract_tree(log, path.leaves, m);
      const auto on_paths = path_marks(log, path.leaves, m);
      const auto hit = cut_leaves(tree, on_paths, m, m);
      cut += std::count(hit.begin(), hit.end(), 1);
    }
    return static_cast<double>(cut) / static_cast<double>(path.leaves.size());
  }

  // gh_upper: glue the trees on both sides of each breakpoint, using a right
  // locus before the next mark so only the breakpoint's own mark can cut.
  double total = 0.0;
  for (double u : path.breakpoints) {
    const auto next = std::upper_bound(marks.begin(), marks.end(), u);
    const double v = 0.5 * (u + (next == marks.end() ? log.b : std::min(*next, log.b)));
    const auto pair = make_coupled_pair(path.source, path.leaves, u, v);
    total += gh_bounds(pair).upper;
  }
  return total;
}

}  // namespace argscape
