#include "argscape/newick.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "argscape/errors.hpp"
#include "argscape/format.hpp"

namespace argscape {

namespace {

void encode_lineage(const UltrametricTree& tree, Lineage lineage, double parent_time,
                    bool is_root, std::string& out) {
  const std::size_t n = tree.leaf_count();
  double time = 0.0;
  if (lineage < n) {
    out += tree.leaf_labels()[lineage];
  } else {
    const Merge& m = tree.merges()[lineage - n];
    time = m.time;
    out += '(';
    encode_lineage(tree, m.left, time, false, out);
    out += ',';
    encode_lineage(tree, m.right, time, false, out);
    out += ')';
  }
  if (!is_root) {
    out += ':';
    out += format_double(parent_time - time);
  }
}

struct ParsedNode {
  std::vector<std::size_t> children;
  std::string label;
  double length = 0.0;
  bool has_length = false;
  std::size_t position = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<ParsedNode> parse() {
    skip_space();
    const std::size_t root = parse_node();
    skip_space();
    expect(';');
    skip_space();
    if (pos_ != text_.size()) throw parse_error("trailing characters after ';'", pos_);
    if (root != 0) throw parse_error("internal error", pos_);
    return std::move(nodes_);
  }

 private:
  std::size_t parse_node() {
    const std::size_t index = nodes_.size();
    nodes_.emplace_back();
    nodes_[index].position = pos_;
    if (peek() == '(') {
      ++pos_;
      while (true) {
        skip_space();
        const std::size_t child = parse_node();
        nodes_[index].children.push_back(child);
        skip_space();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        expect(')');
        break;
      }
      if (nodes_[index].children.size() != 2)
        throw parse_error("only binary trees are supported", nodes_[index].position);
      nodes_[index].label = parse_label(false);
    } else {
      nodes_[index].label = parse_label(true);
    }
    skip_space();
    if (peek() == ':') {
      ++pos_;
      skip_space();
      nodes_[index].length = parse_number();
      nodes_[index].has_length = true;
    }
    return index;
  }

  std::string parse_label(bool required) {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delimiter(text_[pos_])) ++pos_;
    if (required && pos_ == start) throw parse_error("expected a leaf label", start);
    return std::string(text_.substr(start, pos_ - start));
  }

  double parse_number() {
    const std::size_t start = pos_;
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || !std::isfinite(value))
      throw parse_error("expected a branch length", start);
    if (value < 0.0) throw parse_error("negative branch length", start);
    pos_ += static_cast<std::size_t>(result.ptr - begin);
    return value;
  }

  static bool is_delimiter(char c) {
    return c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == ' ' || c == '\t' ||
           c == '\n' || c == '\r';
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c) throw parse_error(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<ParsedNode> nodes_;
};

}  // namespace

std::string newick_encode(const UltrametricTree& tree) {
  std::string out;
  const Lineage root = static_cast<Lineage>(tree.leaf_count() + tree.merges().size() - 1);
  encode_lineage(tree, root, tree.root_time(), true, out);
  out += ';';
  return out;
}

UltrametricTree newick_decode(std::string_view text) {
  const std::vector<ParsedNode> nodes = Parser(text).parse();

  // Depth below the root; parents precede children in parse order.
  std::vector<double> depth(nodes.size(), 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t c : nodes[i].children) {
      if (!nodes[c].has_length) throw parse_error("missing branch length", nodes[c].position);
      depth[c] = depth[i] + nodes[c].length;
    }
  }
  std::vector<std::size_t> leaves;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].children.empty()) leaves.push_back(i);

  double height = 0.0;
  for (std::size_t leaf : leaves) height = std::max(height, depth[leaf]);
  const double tolerance = 1e-9 * std::max(1.0, height);
  for (std::size_t leaf : leaves)
    if (height - depth[leaf] > tolerance)
      throw parse_error("leaves at unequal depth", nodes[leaf].position);

  std::vector<std::string> labels;
  std::vector<Lineage> lineage(nodes.size(), 0);
  for (std::size_t leaf : leaves) {
    lineage[leaf] = static_cast<Lineage>(labels.size());
    labels.push_back(nodes[leaf].label);
  }
  std::vector<std::size_t> internal;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!nodes[i].children.empty()) internal.push_back(i);
  // Deeper (more recent) merges first; children come later in parse order, so
  // ties are broken by reverse parse order to keep children before parents.
  std::stable_sort(internal.begin(), internal.end(), [&](std::size_t x, std::size_t y) {
    if (depth[x] != depth[y]) return depth[x] > depth[y];
    return x > y;
  });
  std::vector<double> time(nodes.size(), 0.0);
  for (std::size_t i : internal) time[i] = std::max(0.0, height - depth[i]);
  // Clamp so that rounding never lets a parent sit below a child.
  for (auto it = internal.begin(); it != internal.end(); ++it) {
    for (std::size_t c : nodes[*it].children) time[*it] = std::max(time[*it], time[c]);
  }
  std::stable_sort(internal.begin(), internal.end(), [&](std::size_t x, std::size_t y) {
    if (time[x] != time[y]) return time[x] < time[y];
    return x > y;
  });
  const std::size_t n = labels.size();
  std::vector<Merge> merges;
  for (std::size_t i : internal) {
    lineage[i] = static_cast<Lineage>(n + merges.size());
    merges.push_back({time[i], lineage[nodes[i].children[0]], lineage[nodes[i].children[1]],
                      static_cast<NodeId>(n + 1 + merges.size())});
  }
  return UltrametricTree(std::move(labels), std::move(merges));
}

}  // namespace argscape
