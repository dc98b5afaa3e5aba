#include "episcore/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace episcore {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  return out;
}

}  // namespace

SequenceData read_sequence(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    std::istringstream fields(line);
    std::string tok;
    while (fields >> tok) tokens.push_back(tok);
  }
  return intern(tokens);
}

SequenceData read_sequence_file(const std::string& path) {
  auto in = open_input(path);
  return read_sequence(in);
}

void write_sequence(std::ostream& out, const EventSequence& s, const SymbolTable& table,
                    std::size_t tokens_per_line) {
  std::size_t col = 0;
  for (Symbol a : s.symbols()) {
    out << table.token_of(a);
    if (++col == tokens_per_line) {
      out << '\n';
      col = 0;
    } else {
      out << ' ';
    }
  }
  if (col != 0) out << '\n';
}

void write_sequence_file(const std::string& path, const EventSequence& s,
                         const SymbolTable& table) {
  auto out = open_output(path);
  write_sequence(out, s, table);
}

void write_probability_csv(std::ostream& out, const ProbabilityModel& model,
                           const SymbolTable& table) {
  out << "token,probability\n";
  char buf[64];
  for (Symbol a = 0; a < model.alphabet(); ++a) {
    std::snprintf(buf, sizeof buf, "%.17g", model.of(a));
    out << table.token_of(a) << ',' << buf << '\n';
  }
}

ProbabilityModel read_probability_csv(std::istream& in, const SymbolTable& table) {
  ProbabilityModel model;
  model.p.assign(table.size(), 0.0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.rfind("token,", 0) == 0) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error("probability csv line " + std::to_string(line_no) + ": missing comma");
    std::string token = line.substr(0, comma);
    model.p.at(table.id_of(token)) = std::stod(line.substr(comma + 1));
  }
  model.validate();
  return model;
}

void write_episodes(std::ostream& out, const std::vector<MinedEpisode>& episodes,
                    const SymbolTable& table) {
  bool first = true;
  for (const auto& [episode, support] : episodes) {
    if (!first) out << '\n';
    first = false;
    out << "nodes";
    for (int v = 0; v < episode.node_count(); ++v)
      out << ' ' << (v + 1) << ':' << table.token_of(episode.label(v));
    out << "\nedges";
    for (auto [u, v] : episode.closure_edges()) out << ' ' << (u + 1) << '>' << (v + 1);
    out << "\nsupport " << support << '\n';
  }
}

std::vector<MinedEpisode> read_episodes(std::istream& in, const SymbolTable& table) {
  std::vector<MinedEpisode> out;
  std::vector<Symbol> labels;
  std::vector<std::pair<int, int>> edges;
  std::size_t support = 0;
  bool open = false;
  std::string line;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (!open) return;
    if (labels.empty()) throw Error("episode block without nodes near line " +
                                    std::to_string(line_no));
    out.push_back({Episode(labels, edges), support});
    labels.clear();
    edges.clear();
    support = 0;
    open = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line[0] == '#') continue;
    std::istringstream fields(line);
    std::string head;
    if (!(fields >> head)) {  // blank line terminates a block
      flush();
      continue;
    }
    auto fail = [&](const std::string& what) {
      throw Error("episode file line " + std::to_string(line_no) + ": " + what);
    };
    if (head == "nodes") {
      if (open && !labels.empty()) fail("duplicate nodes line");
      open = true;
      std::string item;
      while (fields >> item) {
        auto colon = item.find(':');
        if (colon == std::string::npos) fail("node item needs index:label");
        int index = std::stoi(item.substr(0, colon));
        if (index != static_cast<int>(labels.size()) + 1) fail("node indices must be 1,2,...");
        labels.push_back(table.id_of(item.substr(colon + 1)));
      }
    } else if (head == "edges") {
      open = true;
      std::string item;
      while (fields >> item) {
        auto gt = item.find('>');
        if (gt == std::string::npos) fail("edge item needs from>to");
        int u = std::stoi(item.substr(0, gt)) - 1;
        int v = std::stoi(item.substr(gt + 1)) - 1;
        edges.emplace_back(u, v);
      }
    } else if (head == "support") {
      open = true;
      long long value = -1;
      if (!(fields >> value) || value < 0) fail("support needs a count");
      support = static_cast<std::size_t>(value);
    } else {
      fail("unknown field '" + head + "'");
    }
  }
  flush();
  return out;
}

void write_episodes_file(const std::string& path, const std::vector<MinedEpisode>& episodes,
                         const SymbolTable& table) {
  auto out = open_output(path);
  write_episodes(out, episodes, table);
}

std::vector<MinedEpisode> read_episodes_file(const std::string& path, const SymbolTable& table) {
  auto in = open_input(path);
  return read_episodes(in, table);
}

std::string episode_to_json(const Episode& g, const SymbolTable& table) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  j["labels"] = nlohmann::json::array();
  j["edges"] = nlohmann::json::array();
  for (int v = 0; v < g.node_count(); ++v) {
    j["nodes"].push_back(v + 1);
    j["labels"].push_back(table.token_of(g.label(v)));
  }
  for (auto [u, v] : g.closure_edges()) j["edges"].push_back({u + 1, v + 1});
  return j.dump();
}

}  // namespace episcore
