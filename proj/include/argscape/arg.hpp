#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "argscape/random.hpp"
#include "argscape/tree.hpp"

namespace argscape {

/// Particle identifier inside an ARG. Leaves are 1..n; every coalescence and
/// split creates fresh identifiers counting up from n+1.
using Particle = std::uint64_t;

enum class ArgEventType { coalesce, split };

struct ArgEvent {
  ArgEventType type = ArgEventType::coalesce;
  double time = 0.0;
  /// coalesce: {first parent, second parent, child};
  /// split: {particle, left child, right child}.
  std::array<Particle, 3> parts{};
  /// Genome mark of a split; loci u <= mark follow the left child.
  double mark = 0.0;

  friend bool operator==(const ArgEvent&, const ArgEvent&) = default;
};

/// griffiths: every particle splits at rate rho(b-a) with a uniform mark, run
/// until one particle remains. hudson: only material that is still ancestral
/// to some leaf and not yet fully coalesced is tracked; a particle splits at
/// rate rho times the span of its material and particles without material are
/// dropped. Both give the same law for trees extracted at any locus.
enum class ArgModel { griffiths, hudson };

struct ArgEventLog {
  std::size_t n_leaves = 0;
  double a = 0.0;
  double b = 1.0;
  double rho = 1.0;
  std::uint64_t seed = 0;
  ArgModel model = ArgModel::griffiths;
  std::vector<ArgEvent> events;

  double terminal_time() const noexcept { return events.empty() ? 0.0 : events.back().time; }
  std::size_t split_count() const noexcept;
  /// Largest particle identifier in use.
  Particle max_particle() const noexcept;

  friend bool operator==(const ArgEventLog&, const ArgEventLog&) = default;
};

/// Checks ordering, particle references and marks. For griffiths logs the
/// particle count must also end at one. Throws std::invalid_argument.
void validate(const ArgEventLog& log);

/// Particle counts after each event, starting with n_leaves. For hudson logs
/// dropped particles are not subtracted.
std::vector<std::size_t> particle_counts(const ArgEventLog& log);

ArgEventLog sample_arg(std::size_t n, double a, double b, double rho, RandomSource& rng);
ArgEventLog sample_arg_hudson(std::size_t n, double a, double b, double rho, RandomSource& rng);
ArgEventLog sample_arg(ArgModel model, std::size_t n, double a, double b, double rho,
                       RandomSource& rng);

/// Tree of the leaves `leaves` (particle ids in 1..n) at locus u. Node
/// identities are the ARG particles created by the coalescences, so trees
/// at different loci that share a coalescence share the identity. Leaf labels
/// are the decimal particle ids in the order given.
UltrametricTree extract_tree(const ArgEventLog& log, std::span<const Particle> leaves, double u);
UltrametricTree extract_tree(const ArgEventLog& log, double u);

std::vector<Particle> all_leaves(const ArgEventLog& log);

/// ARG followed by the given leaves only. The leaves are renumbered 1..m in
/// the order given; internal particle identities are kept, so trees extracted
/// from the result carry the original node identities. Griffiths logs only.
ArgEventLog subsample_arg(const ArgEventLog& log, std::span<const Particle> leaves);

/// ARG of the genome segment [c, d]: splits with marks outside [c, d] follow
/// only the child carrying the segment. Extraction at any u in [c, d] agrees
/// exactly with the unrestricted log. Griffiths logs only.
ArgEventLog restrict_genome(const ArgEventLog& log, double c, double d);

/// Expected number of splits of a griffiths ARG on n leaves with total split
/// rate per particle rho_length = rho(b-a): expected births of the birth-death
/// chain b_k = rho_length k, d_k = k(k-1)/2 before absorption at one.
double expected_split_count(std::size_t n, double rho_length);

}  // namespace argscape
