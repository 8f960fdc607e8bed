#include "argscape/serialize.hpp"

#include <json.hpp>
#include <ostream>
#include <sstream>

#include "argscape/errors.hpp"
#include "argscape/newick.hpp"

namespace argscape {

using ordered_json = nlohmann::ordered_json;

void write_arg_jsonl(std::ostream& out, const ArgEventLog& log) {
  ordered_json header;
  header["n"] = log.n_leaves;
  header["a"] = log.a;
  header["b"] = log.b;
  header["rho"] = log.rho;
  header["seed"] = log.seed;
  header["model"] = log.model == ArgModel::griffiths ? "griffiths" : "hudson";
  out << header.dump() << '\n';
  for (const ArgEvent& e : log.events) {
    ordered_json line;
    line["t"] = e.time;
    line["type"] = e.type == ArgEventType::coalesce ? "coal" : "split";
    line["parts"] = {e.parts[0], e.parts[1], e.parts[2]};
    if (e.type == ArgEventType::split) line["mark"] = e.mark;
    out << line.dump() << '\n';
  }
}

std::string arg_to_jsonl(const ArgEventLog& log) {
  std::ostringstream out;
  write_arg_jsonl(out, log);
  return out.str();
}

ArgEventLog arg_from_jsonl(std::string_view text) {
  ArgEventLog log;
  std::size_t line_number = 0;
  std::size_t start = 0;
  bool have_header = false;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!have_header) {
        log.n_leaves = j.at("n").get<std::size_t>();
        log.a = j.at("a").get<double>();
        log.b = j.at("b").get<double>();
        log.rho = j.at("rho").get<double>();
        log.seed = j.value("seed", std::uint64_t{0});
        log.model = j.value("model", std::string("griffiths")) == "hudson" ? ArgModel::hudson
                                                                           : ArgModel::griffiths;
        have_header = true;
        continue;
      }
      ArgEvent e;
      e.time = j.at("t").get<double>();
      const std::string type = j.at("type").get<std::string>();
      if (type == "coal") {
        e.type = ArgEventType::coalesce;
      } else if (type == "split") {
        e.type = ArgEventType::split;
        e.mark = j.at("mark").get<double>();
      } else {
        throw parse_error("unknown event type '" + type + "'", line_number);
      }
      const auto& parts = j.at("parts");
      if (!parts.is_array() || parts.size() != 3) throw parse_error("parts must have three ids", line_number);
      for (std::size_t i = 0; i < 3; ++i) e.parts[i] = parts[i].get<Particle>();
      log.events.push_back(e);
    } catch (const nlohmann::json::exception& ex) {
      throw parse_error(std::string("bad event log line: ") + ex.what(), line_number);
    }
  }
  if (!have_header) throw parse_error("missing header line", line_number);
  try {
    validate(log);
  } catch (const std::invalid_argument& ex) {
    throw parse_error(ex.what(), line_number);
  }
  return log;
}

std::string tree_to_json(const UltrametricTree& tree) {
  ordered_json j;
  j["leaves"] = tree.leaf_labels();
  j["merges"] = ordered_json::array();
  for (const Merge& m : tree.merges()) {
    ordered_json merge;
    merge["t"] = m.time;
    merge["pair"] = {m.left, m.right};
    merge["node"] = m.node;
    j["merges"].push_back(merge);
  }
  return j.dump();
}

UltrametricTree tree_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    std::vector<std::string> leaves = j.at("leaves").get<std::vector<std::string>>();
    std::vector<Merge> merges;
    const std::size_t n = leaves.size();
    for (const auto& m : j.at("merges")) {
      const auto& pair = m.at("pair");
      merges.push_back({m.at("t").get<double>(), pair.at(0).get<Lineage>(), pair.at(1).get<Lineage>(),
                        m.value("node", static_cast<NodeId>(n + 1 + merges.size()))});
    }
    return UltrametricTree(std::move(leaves), std::move(merges));
  } catch (const nlohmann::json::exception& ex) {
    throw parse_error(std::string("bad tree record: ") + ex.what(), 0);
  } catch (const std::invalid_argument& ex) {
    throw parse_error(ex.what(), 0);
  }
}

std::string tree_path_to_json(const TreePath& path) {
  ordered_json j;
  j["a"] = path.a;
  j["b"] = path.b;
  j["breakpoints"] = path.breakpoints;
  j["trees"] = ordered_json::array();
  for (const auto& t : path.trees) j["trees"].push_back(newick_encode(t));
  return j.dump();
}

}  // namespace argscape
