#include "argscape/coupling.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace argscape {

namespace {

constexpr long kAbsent = -1;

// Two-sided line process. A line holds its lineage in tree 0 and/or tree u.
class TwoSideProcess {
 public:
  TwoSideProcess(std::size_t a0, std::size_t b0, std::size_t c0, double rho)
      : rho_(rho), next_node_(a0 + b0 + c0 + 1) {
    for (std::size_t i = 0; i < a0 + b0; ++i) labels_[0].push_back(std::to_string(i + 1));
    for (std::size_t i = a0; i < a0 + b0 + c0; ++i) labels_[1].push_back(std::to_string(i + 1));
    for (std::size_t i = 0; i < a0; ++i) lines_.push_back({static_cast<long>(i), kAbsent});
    for (std::size_t i = 0; i < b0; ++i) lines_.push_back({static_cast<long>(a0 + i), static_cast<long>(i)});
    for (std::size_t i = 0; i < c0; ++i) lines_.push_back({kAbsent, static_cast<long>(b0 + i)});
    settle();
  }

  bool finished() const { return lines_.empty(); }
  double time() const { return time_; }

  // Advances by one event. `double_rate` is the per-pair rate of the
  // double-pair clock. Returns true if that clock rang; the caller then
  // decides what happens to the chosen pair via the returned indices.
  struct Ring {
    std::size_t first;
    std::size_t second;
  };
  std::optional<Ring> step(double double_rate, RandomSource& rng) {
    std::array<std::vector<std::size_t>, 3> groups;  // single 0, double, single u
    for (std::size_t i = 0; i < lines_.size(); ++i) groups[kind(i)].push_back(i);
    const double a = static_cast<double>(groups[0].size());
    const double b = static_cast<double>(groups[1].size());
    const double c = static_cast<double>(groups[2].size());
    const double same0 = a * (a - 1) / 2, same_u = c * (c - 1) / 2, opposite = a * c;
    const double single_double = (a + c) * b, split = rho_ * b, doubles = double_rate * b * (b - 1) / 2;
    const double total = same0 + same_u + opposite + single_double + split + doubles;
    if (!(total > 0.0)) throw std::logic_error("auxiliary graph stalled before both trees completed");
    time_ += rng.exponential(total);
    double pick = rng.uniform() * total;

    auto two_of = [&](const std::vector<std::size_t>& g) {
      const std::size_t i = rng.index(g.size());
      std::size_t j = rng.index(g.size() - 1);
      if (j >= i) ++j;
      return std::pair{g[i], g[j]};
    };
    if ((pick -= same0) < 0) {
      const auto [i, j] = two_of(groups[0]);
      merge_side(0, i, j);
      remove(j);
    } else if ((pick -= same_u) < 0) {
      const auto [i, j] = two_of(groups[2]);
      merge_side(1, i, j);
      remove(j);
    } else if ((pick -= opposite) < 0) {
      const std::size_t i = groups[0][rng.index(groups[0].size())];
      const std::size_t j = groups[2][rng.index(groups[2].size())];
      lines_[i][1] = lines_[j][1];
      remove(j);
    } else if ((pick -= single_double) < 0) {
      const std::size_t s = rng.index(groups[0].size() + groups[2].size());
      const bool side0 = s < groups[0].size();
      const std::size_t single = side0 ? groups[0][s] : groups[2][s - groups[0].size()];
      const std::size_t dbl = groups[1][rng.index(groups[1].size())];
      merge_side(side0 ? 0 : 1, dbl, single);
      remove(single);
    } else if ((pick -= split) < 0) {
      const std::size_t i = groups[1][rng.index(groups[1].size())];
      lines_.push_back({kAbsent, lines_[i][1]});
      lines_[i][1] = kAbsent;
    } else {
      const auto [i, j] = two_of(groups[1]);
      return Ring{i, j};
    }
    settle();
    return std::nullopt;
  }

  // Event (iv) on doubles i and j: `side` merges, the other side of j leaves
  // as a single.
  void decouple(const Ring& ring, int side) {
    merge_side(side, ring.first, ring.second);
    lines_[ring.second][side] = kAbsent;
    settle();
  }

  // Joint coalescence of doubles i and j: one node for both trees.
  void join(const Ring& ring) {
    const NodeId node = next_node_++;
    for (int side : {0, 1}) merge_side(side, ring.first, ring.second, node);
    remove(ring.second);
    settle();
  }

  UltrametricTree tree(int side) const {
    if (labels_[side].size() == 1) return UltrametricTree::leaf(labels_[side][0]);
    return UltrametricTree(labels_[side], merges_[side]);
  }

 private:
  int kind(std::size_t i) const {
    if (lines_[i][1] == kAbsent) return 0;
    if (lines_[i][0] == kAbsent) return 2;
    return 1;
  }

  // Merges the side components of lines i and j into line i.
  void merge_side(int side, std::size_t i, std::size_t j, NodeId node = 0) {
    if (node == 0) node = next_node_++;
    auto& merges = merges_[side];
    const auto created = static_cast<long>(labels_[side].size() + merges.size());
    merges.push_back({time_, static_cast<Lineage>(lines_[i][side]), static_cast<Lineage>(lines_[j][side]), node});
    lines_[i][side] = created;
    lines_[j][side] = kAbsent;
  }

  void remove(std::size_t i) { lines_.erase(lines_.begin() + static_cast<long>(i)); }

  // Drops the component of a side that has reached its root, then lines
  // that no longer belong to any tree.
  void settle() {
    for (int side : {0, 1}) {
      std::size_t count = 0;
      for (const auto& line : lines_) count += line[side] != kAbsent;
      if (count == 1)
        for (auto& line : lines_) line[side] = kAbsent;
    }
    std::erase_if(lines_, [](const std::array<long, 2>& line) { return line[0] == kAbsent && line[1] == kAbsent; });
  }

  double rho_;
  double time_ = 0.0;
  NodeId next_node_;
  std::vector<std::array<long, 2>> lines_;
  std::array<std::vector<std::string>, 2> labels_;
  std::array<std::vector<Merge>, 2> merges_;
};

void run_aux(TwoSideProcess& process, AuxGraphResult& result, RandomSource& rng) {
  while (!process.finished()) {
    if (const auto ring = process.step(2.0, rng)) {
      if (!result.event_iv_occurred) result.first_event_iv_time = process.time();
      result.event_iv_occurred = true;
      process.decouple(*ring, rng.coin() ? 0 : 1);
    }
  }
}

}  // namespace

AuxGraphResult sample_aux_graph(std::size_t a0, std::size_t b0, std::size_t c0, double rho_u,
                                RandomSource& rng) {
  if (a0 + b0 == 0 || b0 + c0 == 0) throw std::invalid_argument("each tree needs at least one line");
  if (!(rho_u >= 0.0)) throw std::invalid_argument("rho_u must be non-negative");
  TwoSideProcess process(a0, b0, c0, rho_u);
  AuxGraphResult result;
  run_aux(process, result, rng);
  result.tree_0 = process.tree(0);
  result.tree_u = process.tree(1);
  return result;
}

CoupledAuxSample sample_coupled_pair(std::size_t n, double rho_u, RandomSource& rng) {
  if (n == 0) throw std::invalid_argument("coupled pair needs at least one leaf");
  if (!(rho_u >= 0.0)) throw std::invalid_argument("rho_u must be non-negative");
  TwoSideProcess shared(n, 0, n, rho_u);
  std::optional<TwoSideProcess::Ring> ring;
  while (!shared.finished() && !(ring = shared.step(2.0, rng))) {
  }
  CoupledAuxSample sample;
  if (!ring) {
    sample.real_0 = sample.aux.tree_0 = shared.tree(0);
    sample.real_u = sample.aux.tree_u = shared.tree(1);
    return sample;
  }
  sample.shared_throughout = false;
  TwoSideProcess real = shared, aux = shared;
  const bool heads = rng.coin();
  RandomSource real_rng = rng.derive(1), aux_rng = rng.derive(2);

  if (heads) real.join(*ring);
  // After the ring the real graph only needs its joint coalescences, which
  // the thinned clock fires at rate 1 per double pair.
  while (!real.finished())
    if (const auto r = real.step(1.0, real_rng)) real.join(*r);

  sample.aux.event_iv_occurred = true;
  sample.aux.first_event_iv_time = aux.time();
  aux.decouple(*ring, aux_rng.coin() ? 0 : 1);
  run_aux(aux, sample.aux, aux_rng);

  sample.real_0 = real.tree(0);
  sample.real_u = real.tree(1);
  sample.aux.tree_0 = aux.tree(0);
  sample.aux.tree_u = aux.tree(1);
  return sample;
}

}  // namespace argscape
