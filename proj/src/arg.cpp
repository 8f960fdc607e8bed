#include "argscape/arg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "argscape/errors.hpp"

namespace argscape {

namespace {

void check_parameters(std::size_t n, double a, double b, double rho) {
  if (n == 0) throw std::invalid_argument("ARG needs at least one leaf");
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("genome interval must satisfy a < b");
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("rho must be > 0; use a tiny value such as 1e-12 for no recombination");
}

void require_griffiths(const ArgEventLog& log, const char* what) {
  if (log.model != ArgModel::griffiths)
    throw unsupported_instance(std::string(what) + " needs a griffiths ARG");
}

}  // namespace

std::size_t ArgEventLog::split_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      events.begin(), events.end(), [](const ArgEvent& e) { return e.type == ArgEventType::split; }));
}

Particle ArgEventLog::max_particle() const noexcept {
  Particle m = n_leaves;
  for (const ArgEvent& e : events)
    for (Particle p : e.parts) m = std::max(m, p);
  return m;
}

void validate(const ArgEventLog& log) {
  if (log.n_leaves == 0) throw std::invalid_argument("ARG log without leaves");
  if (!(log.a < log.b)) throw std::invalid_argument("ARG log genome must satisfy a < b");
  if (!(log.rho > 0.0)) throw std::invalid_argument("ARG log rho must be positive");
  const Particle top = log.max_particle();
  // 0 = never seen, 1 = alive, 2 = consumed.
  std::vector<char> state(top + 1, 0);
  for (Particle p = 1; p <= log.n_leaves; ++p) state[p] = 1;
  std::size_t alive = log.n_leaves;
  double previous = 0.0;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const ArgEvent& e = log.events[i];
    const std::string where = " (event " + std::to_string(i) + ")";
    if (!(e.time > previous))
      throw std::invalid_argument("event times must be strictly increasing and positive" + where);
    previous = e.time;
    auto consume = [&](Particle p) {
      if (p == 0 || p > top || state[p] != 1)
        throw std::invalid_argument("event uses a particle that is not alive" + where);
      state[p] = 2;
      --alive;
    };
    auto create = [&](Particle p) {
      if (p == 0 || state[p] != 0)
        throw std::invalid_argument("event creates an existing particle" + where);
      state[p] = 1;
      ++alive;
    };
    if (e.type == ArgEventType::coalesce) {
      if (e.parts[0] == e.parts[1]) throw std::invalid_argument("self coalescence" + where);
      consume(e.parts[0]);
      consume(e.parts[1]);
      create(e.parts[2]);
    } else {
      if (!(e.mark >= log.a && e.mark <= log.b))
        throw std::invalid_argument("split mark outside the genome" + where);
      if (e.parts[1] == e.parts[2]) throw std::invalid_argument("split children coincide" + where);
      consume(e.parts[0]);
      create(e.parts[1]);
      create(e.parts[2]);
    }
    if (log.model == ArgModel::griffiths && alive == 1 && i + 1 != log.events.size())
      throw std::invalid_argument("events after the particle count reached one" + where);
  }
  if (log.model == ArgModel::griffiths && alive != 1)
    throw std::invalid_argument("griffiths ARG must end with one particle");
}

std::vector<std::size_t> particle_counts(const ArgEventLog& log) {
  std::vector<std::size_t> counts{log.n_leaves};
  std::size_t k = log.n_leaves;
  for (const ArgEvent& e : log.events) {
    k = e.type == ArgEventType::split ? k + 1 : k - 1;
    counts.push_back(k);
  }
  return counts;
}

ArgEventLog sample_arg(std::size_t n, double a, double b, double rho, RandomSource& rng) {
  check_parameters(n, a, b, rho);
  ArgEventLog log{n, a, b, rho, rng.stream_index(), ArgModel::griffiths, {}};
  std::vector<Particle> alive(n);
  for (std::size_t i = 0; i < n; ++i) alive[i] = i + 1;
  Particle next = n + 1;
  const double split_rate = rho * (b - a);
  double t = 0.0;
  while (alive.size() > 1) {
    const double k = static_cast<double>(alive.size());
    const double coalesce_rate = 0.5 * k * (k - 1.0);
    const double total = coalesce_rate + split_rate * k;
    t += rng.exponential(total);
    if (rng.uniform() * total < coalesce_rate) {
      const std::size_t i = rng.index(alive.size());
      std::size_t j = rng.index(alive.size() - 1);
      if (j >= i) ++j;
      const Particle child = next++;
      log.events.push_back({ArgEventType::coalesce, t, {alive[i], alive[j], child}, 0.0});
      const std::size_t hi = std::max(i, j), lo = std::min(i, j);
      alive[hi] = alive.back();
      alive.pop_back();
      alive[lo] = child;
    } else {
      const std::size_t i = rng.index(alive.size());
      const double mark = rng.uniform(a, b);
      const Particle left = next++, right = next++;
      log.events.push_back({ArgEventType::split, t, {alive[i], left, right}, mark});
      alive[i] = left;
      alive.push_back(right);
    }
  }
  return log;
}

ArgEventLog sample_arg(ArgModel model, std::size_t n, double a, double b, double rho,
                       RandomSource& rng) {
  return model == ArgModel::griffiths ? sample_arg(n, a, b, rho, rng)
                                      : sample_arg_hudson(n, a, b, rho, rng);
}

std::vector<Particle> all_leaves(const ArgEventLog& log) {
  std::vector<Particle> leaves(log.n_leaves);
  for (std::size_t i = 0; i < log.n_leaves; ++i) leaves[i] = i + 1;
  return leaves;
}

UltrametricTree extract_tree(const ArgEventLog& log, std::span<const Particle> leaves, double u) {
  if (!(u >= log.a && u <= log.b)) throw std::invalid_argument("locus outside the genome");
  if (leaves.empty()) throw std::invalid_argument("leaf set must be nonempty");
  constexpr Lineage kNone = std::numeric_limits<Lineage>::max();
  // Sparse map particle -> lineage of the tree being built.
  std::unordered_map<Particle, Lineage> followed;
  followed.reserve(leaves.size() * 2);
  std::vector<std::string> labels;
  labels.reserve(leaves.size());
  for (Particle p : leaves) {
    if (p == 0 || p > log.n_leaves) throw std::invalid_argument("leaf id out of range");
    if (!followed.emplace(p, static_cast<Lineage>(labels.size())).second)
      throw std::invalid_argument("repeated leaf id");
    labels.push_back(std::to_string(p));
  }
  const std::size_t m = labels.size();
  std::vector<Merge> merges;
  merges.reserve(m - 1);
  for (const ArgEvent& e : log.events) {
    if (followed.size() <= 1) break;
    if (e.type == ArgEventType::coalesce) {
      auto first = followed.find(e.parts[0]);
      auto second = followed.find(e.parts[1]);
      const Lineage l = first == followed.end() ? kNone : first->second;
      const Lineage r = second == followed.end() ? kNone : second->second;
      if (l == kNone && r == kNone) continue;
      if (first != followed.end()) followed.erase(first);
      second = followed.find(e.parts[1]);
      if (second != followed.end()) followed.erase(second);
      if (l != kNone && r != kNone) {
        const Lineage created = static_cast<Lineage>(m + merges.size());
        merges.push_back({e.time, l, r, e.parts[2]});
        followed.emplace(e.parts[2], created);
      } else {
        followed.emplace(e.parts[2], l != kNone ? l : r);
      }
    } else {
      auto it = followed.find(e.parts[0]);
      if (it == followed.end()) continue;
      const Lineage lineage = it->second;
      followed.erase(it);
      followed.emplace(u <= e.mark ? e.parts[1] : e.parts[2], lineage);
    }
  }
  if (merges.size() != m - 1)
    throw std::logic_error("ARG log ended before the leaves coalesced at this locus");
  return UltrametricTree(std::move(labels), std::move(merges));
}

UltrametricTree extract_tree(const ArgEventLog& log, double u) {
  const auto leaves = all_leaves(log);
  return extract_tree(log, leaves, u);
}

namespace {

// Shared replay for subsample_arg and restrict_genome: `followed` maps input
// particle ids to output ids; a split is kept when `keep_split` says so,
// otherwise only the child chosen by `pick_child` is followed.
template <typename SplitRule>
ArgEventLog follow(const ArgEventLog& log, std::unordered_map<Particle, Particle> followed,
                   std::size_t n_out, double a, double b, SplitRule rule) {
  ArgEventLog out{n_out, a, b, log.rho, log.seed, log.model, {}};
  for (const ArgEvent& e : log.events) {
    if (followed.size() <= 1) break;
    if (e.type == ArgEventType::coalesce) {
      auto first = followed.find(e.parts[0]);
      auto second = followed.find(e.parts[1]);
      const bool has_first = first != followed.end(), has_second = second != followed.end();
      if (!has_first && !has_second) continue;
      if (has_first && has_second) {
        out.events.push_back({ArgEventType::coalesce, e.time, {first->second, second->second, e.parts[2]}, 0.0});
        followed.erase(first);
        followed.erase(e.parts[1]);
        followed.emplace(e.parts[2], e.parts[2]);
      } else {
        // One followed parent: the child continues that lineage unchanged.
        const Particle kept = has_first ? first->second : second->second;
        followed.erase(has_first ? e.parts[0] : e.parts[1]);
        followed.emplace(e.parts[2], kept);
      }
    } else {
      auto it = followed.find(e.parts[0]);
      if (it == followed.end()) continue;
      const Particle current = it->second;
      followed.erase(it);
      const int choice = rule(e.mark);  // 0 keep, 1 left only, 2 right only
      if (choice == 0) {
        out.events.push_back({ArgEventType::split, e.time, {current, e.parts[1], e.parts[2]}, e.mark});
        followed.emplace(e.parts[1], e.parts[1]);
        followed.emplace(e.parts[2], e.parts[2]);
      } else {
        followed.emplace(choice == 1 ? e.parts[1] : e.parts[2], current);
      }
    }
  }
  return out;
}

}  // namespace

ArgEventLog subsample_arg(const ArgEventLog& log, std::span<const Particle> leaves) {
  require_griffiths(log, "subsample_arg");
  if (leaves.empty()) throw std::invalid_argument("leaf set must be nonempty");
  std::unordered_map<Particle, Particle> followed;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i] == 0 || leaves[i] > log.n_leaves) throw std::invalid_argument("leaf id out of range");
    if (!followed.emplace(leaves[i], i + 1).second) throw std::invalid_argument("repeated leaf id");
  }
  return follow(log, std::move(followed), leaves.size(), log.a, log.b, [](double) { return 0; });
}

ArgEventLog restrict_genome(const ArgEventLog& log, double c, double d) {
  require_griffiths(log, "restrict_genome");
  if (!(log.a <= c && c < d && d <= log.b))
    throw std::invalid_argument("restriction interval must satisfy a <= c < d <= b");
  std::unordered_map<Particle, Particle> followed;
  for (Particle p = 1; p <= log.n_leaves; ++p) followed.emplace(p, p);
  return follow(log, std::move(followed), log.n_leaves, c, d, [c, d](double mark) {
    if (mark < c) return 2;
    if (mark > d) return 1;
    return 0;
  });
}

double expected_split_count(std::size_t n, double rho_length) {
  if (n == 0) throw std::invalid_argument("need at least one leaf");
  if (!(rho_length > 0.0)) throw std::invalid_argument("rho_length must be positive");
  if (n == 1) return 0.0;
  // E_k = p_k (1 + E_{k+1}) + (1 - p_k) E_{k-1}, E_1 = 0, truncated at K with
  // p_K = 0. The chain beyond K is reached with negligible probability.
  const std::size_t top = std::max<std::size_t>(n + 200, static_cast<std::size_t>(40.0 * rho_length) + 200);
  // Tridiagonal: -(1-p_k) E_{k-1} + E_k - p_k E_{k+1} = p_k for k = 2..K.
  const std::size_t size = top - 1;
  std::vector<double> lower(size), diag(size, 1.0), upper(size), rhs(size);
  for (std::size_t idx = 0; idx < size; ++idx) {
    const double k = static_cast<double>(idx + 2);
    double p = rho_length / (rho_length + 0.5 * (k - 1.0));
    if (idx + 1 == size) p = 0.0;
    lower[idx] = -(1.0 - p);
    upper[idx] = -p;
    rhs[idx] = p;
  }
  // Thomas algorithm; E_1 = 0 so lower[0] drops out.
  for (std::size_t i = 1; i < size; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> e(size);
  e[size - 1] = rhs[size - 1] / diag[size - 1];
  for (std::size_t i = size - 1; i-- > 0;) e[i] = (rhs[i] - upper[i] * e[i + 1]) / diag[i];
  return e[n - 2];
}

}  // namespace argscape
