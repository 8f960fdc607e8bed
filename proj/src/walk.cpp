#include "argscape/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "argscape/coalescent.hpp"
#include "argscape/errors.hpp"

namespace argscape {

WalkVariant WalkVariant::macs(std::size_t k) {
  if (k == 0) throw std::invalid_argument("macs window must be at least 1");
  return {Kind::macs, k};
}

std::string WalkVariant::name() const {
  switch (kind) {
    case Kind::full:
      return "full";
    case Kind::smc:
      return "smc";
    case Kind::smc_prime:
      return "smc-prime";
    case Kind::macs:
      return "macs(" + std::to_string(window) + ")";
  }
  return "unknown";
}

WalkVariant WalkVariant::parse(const std::string& text) {
  if (text == "full") return full();
  if (text == "smc") return smc();
  if (text == "smc-prime" || text == "smc'" || text == "smc_prime") return smc_prime();
  if (text.rfind("macs", 0) == 0) {
    std::string digits = text.substr(4);
    if (!digits.empty() && digits.front() == '(' && digits.back() == ')')
      digits = digits.substr(1, digits.size() - 2);
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit))
      return macs(std::stoul(digits));
  }
  throw std::invalid_argument("unknown walk variant '" + text + "'");
}

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr int kNone = -1;

struct Edge {
  double bottom;
  double top;
  int lower;  // node below
  int upper;  // node above, kNone for the line above everything
  long tree_step = -1;
  long line_step = -1;
  int leaves = 0;  // leaves of the current tree routed through this edge
};

struct Node {
  enum class Kind { leaf, coalesce, split };
  Kind kind;
  double time;
  int in[2] = {kNone, kNone};
  int out[2] = {kNone, kNone};
  double mark = 0.0;
};

class WalkGraph {
 public:
  WalkGraph(const UltrametricTree& start) : n_(start.leaf_count()) {
    for (std::size_t i = 0; i < n_; ++i) {
      if (start.leaf_labels()[i] != std::to_string(i + 1))
        throw std::invalid_argument("walk start tree must have leaves labelled 1..n in order");
      nodes_.push_back({Node::Kind::leaf, 0.0, {kNone, kNone}, {static_cast<int>(i), kNone}});
      edges_.push_back({0.0, kInfinity, static_cast<int>(i), kNone});
    }
    for (std::size_t k = 0; k < start.merges().size(); ++k) {
      const Merge& m = start.merges()[k];
      const int node = static_cast<int>(nodes_.size());
      const int out = static_cast<int>(edges_.size());
      nodes_.push_back({Node::Kind::coalesce, m.time, {static_cast<int>(m.left), static_cast<int>(m.right)}, {out, kNone}});
      for (int child : {static_cast<int>(m.left), static_cast<int>(m.right)}) {
        edges_[child].top = m.time;
        edges_[child].upper = node;
      }
      edges_.push_back({m.time, kInfinity, node, kNone});
      deltas_.push_back({m.time, -1});
    }
  }

  std::size_t leaf_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Cuts edge e at time t; the lower part keeps id e. Returns the upper part.
  int cut(int e, double t, int node) {
    const int upper = static_cast<int>(edges_.size());
    Edge top_part = edges_[e];
    top_part.bottom = t;
    top_part.lower = node;
    edges_.push_back(top_part);
    if (top_part.upper != kNone) {
      Node& above = nodes_[top_part.upper];
      for (int& slot : above.in)
        if (slot == e) slot = upper;
    }
    edges_[e].top = t;
    edges_[e].upper = node;
    return upper;
  }

  // Inserts a split at time t on edge e. Returns {left (upper part), right}.
  std::pair<int, int> add_split(int e, double t, double mark) {
    const int node = static_cast<int>(nodes_.size());
    nodes_.push_back({Node::Kind::split, t, {e, kNone}, {kNone, kNone}, mark});
    const int left = cut(e, t, node);
    const int right = static_cast<int>(edges_.size());
    edges_.push_back({t, kInfinity, node, kNone});
    nodes_[node].out[0] = left;
    nodes_[node].out[1] = right;
    insert_delta(t, +1);
    return {left, right};
  }

  // Joins the open branch `branch` into edge f at time t.
  void add_coalescence(int branch, int f, double t) {
    const int node = static_cast<int>(nodes_.size());
    nodes_.push_back({Node::Kind::coalesce, t, {f, branch}, {kNone, kNone}});
    const int out = cut(f, t, node);
    nodes_[node].out[0] = out;
    edges_[branch].top = t;
    edges_[branch].upper = node;
    insert_delta(t, -1);
  }

  // Number of graph lines at time t (before any open branch is added).
  int line_count_at(double t) const {
    int count = static_cast<int>(n_);
    for (const auto& [time, delta] : deltas_) {
      if (time >= t) break;
      count += delta;
    }
    return count;
  }

  // Coalescence time of a branch started at t joining every line of the
  // graph at rate 1 each.
  double coalescence_time_all(double t, double exponential) const {
    int count = line_count_at(t);
    auto it = std::upper_bound(deltas_.begin(), deltas_.end(), std::pair<double, int>{t, 1});
    double remaining = exponential;
    for (; it != deltas_.end(); ++it) {
      const double span = it->first - t;
      if (remaining <= count * span) return t + remaining / count;
      remaining -= count * span;
      t = it->first;
      count += it->second;
    }
    return t + remaining / count;
  }

  // Marks the current tree (rightmost reading) with `step`.
  void mark_tree(long step) {
    for (Edge& e : edges_) e.leaves = 0;
    for (std::size_t leaf = 0; leaf < n_; ++leaf) {
      int e = static_cast<int>(leaf);
      while (true) {
        Edge& edge = edges_[e];
        ++edge.leaves;
        edge.line_step = step;
        if (edge.upper == kNone) break;
        const Node& node = nodes_[edge.upper];
        e = node.kind == Node::Kind::split ? node.out[1] : node.out[0];
      }
    }
    for (Edge& e : edges_)
      if (e.leaves > 0 && e.leaves < static_cast<int>(n_)) e.tree_step = step;
  }

  // Edges from the split point's upper part up to (excluding) the next
  // coalescence with another line of the current tree.
  std::vector<int> route_to_next_tree_node(int left) const {
    std::vector<int> route{left};
    int e = left;
    while (edges_[e].upper != kNone) {
      const Node& node = nodes_[edges_[e].upper];
      if (node.kind == Node::Kind::split) {
        e = node.out[1];
      } else {
        const int other = node.in[0] == e ? node.in[1] : node.in[0];
        if (edges_[other].leaves > 0) break;
        e = node.out[0];
      }
      route.push_back(e);
    }
    return route;
  }

  ArgEventLog to_log(double a, double b, double rho, std::uint64_t seed) const {
    ArgEventLog log{n_, a, b, rho, seed, ArgModel::griffiths, {}};
    std::vector<int> order;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].kind != Node::Kind::leaf) order.push_back(static_cast<int>(i));
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return nodes_[x].time < nodes_[y].time; });
    auto particle = [](int e) { return static_cast<Particle>(e) + 1; };
    for (int i : order) {
      const Node& node = nodes_[i];
      if (node.kind == Node::Kind::coalesce)
        log.events.push_back({ArgEventType::coalesce, node.time,
                              {particle(node.in[0]), particle(node.in[1]), particle(node.out[0])}, 0.0});
      else
        log.events.push_back({ArgEventType::split, node.time,
                              {particle(node.in[0]), particle(node.out[0]), particle(node.out[1])}, node.mark});
    }
    return log;
  }

 private:
  void insert_delta(double t, int delta) {
    const std::pair<double, int> entry{t, delta};
    deltas_.insert(std::upper_bound(deltas_.begin(), deltas_.end(), entry), entry);
  }

  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<Node> nodes_;
  std::vector<std::pair<double, int>> deltas_;
};

// Uniform point on the edges accepted by `keep`, with their total length.
template <typename Keep>
std::pair<int, double> uniform_point(const std::vector<Edge>& edges, double total, Keep keep,
                                     RandomSource& rng) {
  double target = rng.uniform() * total;
  int last = kNone;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!keep(edges[i])) continue;
    last = static_cast<int>(i);
    const double length = edges[i].top - edges[i].bottom;
    if (target < length) return {last, edges[i].bottom + target};
    target -= length;
  }
  // Rounding left us past the end: use the top of the last edge's interior.
  const Edge& e = edges[last];
  return {last, 0.5 * (e.bottom + e.top)};
}

// Uniform choice among accepted edges alive at time t.
template <typename Keep>
int covering_edge(const std::vector<Edge>& edges, double t, Keep keep, RandomSource& rng) {
  std::vector<int> candidates;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (keep(edges[i]) && edges[i].bottom < t && t < edges[i].top) candidates.push_back(static_cast<int>(i));
  if (candidates.empty()) throw std::logic_error("no line available at the coalescence time");
  return candidates[rng.index(candidates.size())];
}

}  // namespace

WalkResult sample_walk_from(const UltrametricTree& start, double a, double b, double rho,
                            WalkVariant variant, RandomSource& rng, std::size_t step_budget) {
  if (!(a < b)) throw std::invalid_argument("genome interval must satisfy a < b");
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("rho must be > 0; use a tiny value such as 1e-12 for no recombination");
  if (variant.window == 0) throw std::invalid_argument("macs window must be at least 1");
  const std::size_t n = start.leaf_count();
  WalkGraph graph(start);
  WalkResult result;
  const bool full = variant.kind == WalkVariant::Kind::full;
  const long window = static_cast<long>(variant.window);
  long step = 0;
  if (!full) graph.mark_tree(step);

  double position = a;
  while (n > 1) {
    auto retained = [&](const Edge& e) {
      if (e.top == kInfinity) return false;
      return full || e.tree_step > step - window;
    };
    double length = 0.0;
    for (const Edge& e : graph.edges())
      if (retained(e)) length += e.top - e.bottom;
    position += rng.exponential(1.0) / (length * rho);
    result.positions.push_back(position);
    result.lengths.push_back(length);
    if (position > b) break;
    if (result.positions.size() > step_budget)
      throw resource_limit("walk exceeded its step budget of " + std::to_string(step_budget));

    const auto [edge, t] = uniform_point(graph.edges(), length, retained, rng);
    std::vector<int> excluded;
    if (variant.kind == WalkVariant::Kind::smc) {
      // Route computed on the edge before cutting; the cut's upper part
      // takes its place.
      excluded = graph.route_to_next_tree_node(edge);
      excluded.erase(excluded.begin());
    }
    const auto [left, right] = graph.add_split(edge, t, position);
    if (variant.kind == WalkVariant::Kind::smc) excluded.insert(excluded.begin(), left);

    const double e = rng.exponential(1.0);
    double joined_at;
    int target;
    if (full) {
      joined_at = graph.coalescence_time_all(t, e);
      // The open branch spans (t, inf) itself and is not a target.
      const auto& edges = graph.edges();
      target = covering_edge(edges, joined_at,
                             [&, right = right](const Edge& x) { return &x - edges.data() != right; }, rng);
    } else {
      const auto& edges = graph.edges();
      std::vector<char> available(edges.size(), 0);
      for (std::size_t i = 0; i < edges.size(); ++i)
        available[i] = static_cast<int>(i) != right && edges[i].line_step > step - window;
      for (int x : excluded) available[x] = 0;
      // Piecewise-constant count of available lines above t.
      std::vector<std::pair<double, int>> changes;
      int count = 0;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (!available[i] || edges[i].top <= t) continue;
        if (edges[i].bottom <= t)
          ++count;
        else
          changes.push_back({edges[i].bottom, +1});
        if (edges[i].top != kInfinity) changes.push_back({edges[i].top, -1});
      }
      std::sort(changes.begin(), changes.end());
      double now = t, remaining = e;
      joined_at = kInfinity;
      for (const auto& [time, delta] : changes) {
        if (count > 0 && remaining <= count * (time - now)) {
          joined_at = now + remaining / count;
          break;
        }
        remaining -= count * (time - now);
        now = time;
        count += delta;
      }
      if (joined_at == kInfinity) {
        if (count <= 0) throw std::logic_error("walk ran out of available lines");
        joined_at = now + remaining / count;
      }
      target = covering_edge(edges, joined_at,
                             [&](const Edge& x) { return available[&x - edges.data()] != 0; }, rng);
    }
    graph.add_coalescence(right, target, joined_at);
    ++step;
    if (!full) graph.mark_tree(step);
  }

  auto log = std::make_shared<const ArgEventLog>(graph.to_log(a, b, rho, rng.stream_index()));
  std::vector<Particle> leaves = all_leaves(*log);
  result.path = tree_path(log, leaves);
  result.graph = std::move(log);
  return result;
}

WalkResult sample_walk(std::size_t n, double a, double b, double rho, WalkVariant variant,
                       RandomSource& rng, std::size_t step_budget) {
  if (n == 0) throw std::invalid_argument("walk needs at least one leaf");
  const UltrametricTree start = sample_kingman(n, rng);
  return sample_walk_from(start, a, b, rho, variant, rng, step_budget);
}

TestResult breakpoint_intensity_check(std::span<const double> gaps, std::span<const double> lengths,
                                      double rho) {
  if (gaps.size() != lengths.size()) throw std::invalid_argument("gaps and lengths differ in size");
  std::vector<double> scaled(gaps.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) scaled[i] = gaps[i] * lengths[i] * rho;
  return ks_test_exponential(scaled, 1.0);
}

std::vector<double> walk_gaps(const WalkResult& walk, double a) {
  std::vector<double> gaps;
  double previous = a;
  for (double u : walk.positions) {
    gaps.push_back(u - previous);
    previous = u;
  }
  return gaps;
}

}  // namespace argscape
