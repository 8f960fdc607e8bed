#pragma once

#include <cstddef>
#include <optional>

#include "argscape/random.hpp"
#include "argscape/tree.hpp"

namespace argscape {

/// Outcome of the two-tree auxiliary graph. Lines belong to tree_0 only
/// (single at 0), to both trees (double) or to tree_u only (single at u).
/// Rates: each pair of singles 1 (same side merges, opposite sides pair up
/// into a double), each single-double pair 1, each double splits at rho_u,
/// and each pair of doubles fires event (iv) at rate 2: a fair coin picks the
/// side whose two sub-lines merge; the other side keeps one sub-line in the
/// double and releases the other as a single.
struct AuxGraphResult {
  UltrametricTree tree_0;
  UltrametricTree tree_u;
  bool event_iv_occurred = false;
  std::optional<double> first_event_iv_time;
};

/// Starts from a0 singles at 0, b0 doubles and c0 singles at u. Leaves of
/// tree_0 are labelled 1..a0+b0 (singles first); leaves of tree_u are the
/// doubles' labels a0+1..a0+b0 followed by a0+b0+1..a0+b0+c0. Requires
/// a0 + b0 >= 1 and b0 + c0 >= 1. A side stops once it has one lineage.
AuxGraphResult sample_aux_graph(std::size_t a0, std::size_t b0, std::size_t c0, double rho_u,
                                RandomSource& rng);

/// Trees of the real two-locus graph and of the auxiliary graph driven by
/// the same randomness from (n, 0, n). Every double pair carries one rate-2
/// clock with a coin: the auxiliary graph performs event (iv) at each ring,
/// the real graph joins both trees on heads (a joint coalescence) and ignores
/// tails. The two runs share every event until the first ring and continue
/// on separate derived streams afterwards, so without any ring the pairs are
/// identical.
struct CoupledAuxSample {
  UltrametricTree real_0;
  UltrametricTree real_u;
  AuxGraphResult aux;
  /// True if no double-pair clock rang.
  bool shared_throughout = true;
};

CoupledAuxSample sample_coupled_pair(std::size_t n, double rho_u, RandomSource& rng);

}  // namespace argscape
