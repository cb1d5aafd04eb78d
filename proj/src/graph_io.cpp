#include <charconv>
#include <fstream>
#include <sstream>

#include "mixsens/graph.hpp"

namespace mixsens {

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw Error("format_double failed");
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  double x = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || end != s.data() + s.size())
    throw Error("not a number: '" + std::string(s) + "'");
  return x;
}

namespace {

long parse_int(std::string_view s, std::size_t line) {
  long x = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || end != s.data() + s.size())
    throw Error("line " + std::to_string(line) + ": expected integer, got '" + std::string(s) + "'");
  return x;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t j = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > j) out.push_back(line.substr(j, i - j));
  }
  return out;
}

}  // namespace

std::string to_graph_text(const WeightedGraph& g) {
  std::string out = "n " + std::to_string(g.n()) + "\n";
  if (g.has_implicit_clique()) {
    const auto& k = g.implicit_clique();
    out += "clique " + std::to_string(k.first) + " " + std::to_string(k.size) + "\n";
  }
  for (EdgeId id = 0; id < g.num_explicit_edges(); ++id) {
    const auto& e = g.edge(id);
    const auto& t = g.tag(id);
    out += std::to_string(e.u) + ' ' + std::to_string(e.v) + ' ' + format_double(e.w) + ' ';
    out += to_string(t.kind);
    if (t.stage >= 0 || t.level >= 0) {
      out += ' ' + (t.stage >= 0 ? std::to_string(t.stage) : std::string("-"));
      if (t.level >= 0) out += ' ' + std::to_string(t.level);
    }
    out += '\n';
  }
  return out;
}

WeightedGraph graph_from_text(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::optional<GraphBuilder> builder;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].starts_with('#')) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (!builder) {
      if (tok.size() != 2 || tok[0] != "n") throw Error(where + "expected header 'n <count>'");
      const long n = parse_int(tok[1], line_no);
      if (n < 0) throw Error(where + "negative vertex count");
      builder.emplace(static_cast<std::size_t>(n));
      continue;
    }
    if (tok[0] == "clique") {
      if (tok.size() != 3) throw Error(where + "expected 'clique <first> <size>'");
      builder->set_implicit_clique({static_cast<Vertex>(parse_int(tok[1], line_no)),
                                    static_cast<Vertex>(parse_int(tok[2], line_no))});
      continue;
    }
    if (tok.size() < 4 || tok.size() > 6) throw Error(where + "expected 'u v w kind [stage] [level]'");
    const long u = parse_int(tok[0], line_no), v = parse_int(tok[1], line_no);
    if (u < 0 || v < 0) throw Error(where + "negative vertex id");
    double w = 0.0;
    try {
      w = parse_double(tok[2]);
    } catch (const Error& e) {
      throw Error(where + e.what());
    }
    EdgeTag tag;
    tag.kind = edge_kind_from_string(tok[3]);
    if (tok.size() >= 5 && tok[4] != "-") tag.stage = static_cast<int>(parse_int(tok[4], line_no));
    if (tok.size() == 6) tag.level = static_cast<int>(parse_int(tok[5], line_no));
    try {
      builder->add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v), w, tag);
    } catch (const Error& e) {
      throw Error(where + e.what());
    }
  }
  if (!builder) throw Error("empty graph file");
  return std::move(*builder).build();
}

void save_graph(const WeightedGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << to_graph_text(g);
}

WeightedGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return graph_from_text(ss.str());
}

}  // namespace mixsens
