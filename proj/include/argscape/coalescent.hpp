#pragma once

#include <cstddef>
#include <vector>

#include "argscape/random.hpp"
#include "argscape/tree.hpp"

namespace argscape {

/// Kingman n-coalescent on leaves labelled "1".."n". While k lineages remain
/// the next merge comes after Exponential(k(k-1)/2) and joins a uniform pair.
/// Merge i gets node identity n+1+i.
UltrametricTree sample_kingman(std::size_t n, RandomSource& rng);

/// Pairwise distances of m points drawn i.i.d. from the space's weights.
DistanceMatrix sample_distance_submatrix(const FiniteMmSpace& space, std::size_t m,
                                         RandomSource& rng);

/// Same, conditioned on the m points being distinct (m <= size).
DistanceMatrix sample_distinct_distance_submatrix(const FiniteMmSpace& space, std::size_t m,
                                                  RandomSource& rng);

}  // namespace argscape
