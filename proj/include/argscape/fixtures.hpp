#pragma once

#include "argscape/arg.hpp"

namespace argscape {

// Small hand-built ARGs on five leaves and genome [0, 1], used as fixed
// reference instances by tests and the structure experiment.

/// Two splits with marks 0.3 (on leaf 1) and 0.6 (on leaf 3); reading it at
/// u < 0.3, 0.3 < u < 0.6 and u > 0.6 gives three different trees.
ArgEventLog two_mark_fixture();
inline constexpr double kTwoMarkFirst = 0.3;
inline constexpr double kTwoMarkSecond = 0.6;

/// One split with mark 0.5 on the ancestor of leaves 4 and 5. Between loci
/// 0.2 and 0.8 exactly those two leaves are cut.
ArgEventLog one_mark_fixture();
inline constexpr double kOneMarkLeftLocus = 0.2;
inline constexpr double kOneMarkRightLocus = 0.8;

}  // namespace argscape
