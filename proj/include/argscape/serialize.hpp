#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "argscape/arg.hpp"
#include "argscape/tree.hpp"
#include "argscape/tree_path.hpp"

namespace argscape {

/// One header line {"n","a","b","rho","seed","model"} followed by one line per
/// event {"t","type","parts","mark"}; "mark" only on splits. Field order is
/// fixed so equal logs serialize to equal bytes.
void write_arg_jsonl(std::ostream& out, const ArgEventLog& log);
std::string arg_to_jsonl(const ArgEventLog& log);
/// Throws parse_error (position = line number) on malformed input.
ArgEventLog arg_from_jsonl(std::string_view text);

/// {"leaves": [...], "merges": [{"t": ..., "pair": [l, r], "node": id}, ...]}
std::string tree_to_json(const UltrametricTree& tree);
UltrametricTree tree_from_json(std::string_view text);

/// {"a", "b", "breakpoints": [...], "trees": [newick, ...]}
std::string tree_path_to_json(const TreePath& path);

}  // namespace argscape
