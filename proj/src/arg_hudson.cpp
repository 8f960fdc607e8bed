#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "argscape/arg.hpp"

namespace argscape {

namespace {

// A stretch of genome together with the number of leaves the particle is
// ancestral to there.
struct Segment {
  double left;
  double right;
  std::size_t count;
};

struct Active {
  Particle id;
  std::vector<Segment> material;

  double span() const { return material.back().right - material.front().left; }
};

std::vector<Segment> clip(const std::vector<Segment>& material, double lo, double hi) {
  std::vector<Segment> out;
  for (const Segment& s : material) {
    const double l = std::max(s.left, lo), r = std::min(s.right, hi);
    if (l < r) out.push_back({l, r, s.count});
  }
  return out;
}

// Sums the leaf counts of two materials and drops what has reached all n
// leaves.
std::vector<Segment> combine(const std::vector<Segment>& x, const std::vector<Segment>& y,
                             std::size_t n) {
  std::vector<double> cuts;
  for (const auto* material : {&x, &y})
    for (const Segment& s : *material) {
      cuts.push_back(s.left);
      cuts.push_back(s.right);
    }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Segment> out;
  std::size_t ix = 0, iy = 0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c], hi = cuts[c + 1];
    while (ix < x.size() && x[ix].right <= lo) ++ix;
    while (iy < y.size() && y[iy].right <= lo) ++iy;
    std::size_t count = 0;
    if (ix < x.size() && x[ix].left <= lo) count += x[ix].count;
    if (iy < y.size() && y[iy].left <= lo) count += y[iy].count;
    if (count == 0 || count == n) continue;
    if (!out.empty() && out.back().right == lo && out.back().count == count)
      out.back().right = hi;
    else
      out.push_back({lo, hi, count});
  }
  return out;
}

}  // namespace

ArgEventLog sample_arg_hudson(std::size_t n, double a, double b, double rho, RandomSource& rng) {
  if (n == 0) throw std::invalid_argument("ARG needs at least one leaf");
  if (!(a < b)) throw std::invalid_argument("genome interval must satisfy a < b");
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("rho must be > 0; use a tiny value such as 1e-12 for no recombination");
  ArgEventLog log{n, a, b, rho, rng.stream_index(), ArgModel::hudson, {}};
  if (n == 1) return log;
  std::vector<Active> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back({i + 1, {{a, b, 1}}});
  Particle next = n + 1;
  double t = 0.0;
  while (active.size() > 1) {
    const double k = static_cast<double>(active.size());
    const double coalesce_rate = 0.5 * k * (k - 1.0);
    double span_total = 0.0;
    for (const Active& p : active) span_total += p.span();
    const double split_rate = rho * span_total;
    const double total = coalesce_rate + split_rate;
    t += rng.exponential(total);
    if (rng.uniform() * total < coalesce_rate) {
      const std::size_t i = rng.index(active.size());
      std::size_t j = rng.index(active.size() - 1);
      if (j >= i) ++j;
      const Particle child = next++;
      log.events.push_back({ArgEventType::coalesce, t, {active[i].id, active[j].id, child}, 0.0});
      auto material = combine(active[i].material, active[j].material, n);
      const std::size_t hi = std::max(i, j), lo = std::min(i, j);
      active[hi] = std::move(active.back());
      active.pop_back();
      if (material.empty()) {
        active[lo] = std::move(active.back());
        active.pop_back();
      } else {
        active[lo] = {child, std::move(material)};
      }
    } else {
      // Particle chosen proportionally to the span of its material.
      double target = rng.uniform() * span_total;
      std::size_t i = 0;
      while (i + 1 < active.size() && target >= active[i].span()) {
        target -= active[i].span();
        ++i;
      }
      Active& p = active[i];
      const double mark = rng.uniform(p.material.front().left, p.material.back().right);
      const Particle left = next++, right = next++;
      log.events.push_back({ArgEventType::split, t, {p.id, left, right}, mark});
      auto left_material = clip(p.material, a, mark);
      auto right_material = clip(p.material, mark, b);
      if (left_material.empty() || right_material.empty()) {
        // Mark fell in a gap: one child inherits everything.
        p.id = left_material.empty() ? right : left;
      } else {
        p = {left, std::move(left_material)};
        active.push_back({right, std::move(right_material)});
      }
    }
  }
  return log;
}

}  // namespace argscape
