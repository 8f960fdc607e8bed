#pragma once

#include <string>
#include <string_view>

#include "argscape/tree.hpp"

namespace argscape {

/// "(a:0.5,b:0.5);" style text. Branch lengths are node-time differences;
/// the root carries no length.
std::string newick_encode(const UltrametricTree& tree);

/// Accepts binary Newick with branch lengths on every non-root node. Leaves
/// must sit at equal depth (relative tolerance 1e-9). Merge identities are
/// assigned n+1, n+2, ... in time order. Throws parse_error on malformed
/// text, negative lengths, polytomies or unequal leaf depths.
UltrametricTree newick_decode(std::string_view text);

}  // namespace argscape
