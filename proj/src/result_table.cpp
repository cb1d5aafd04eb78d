#include "mixsens/result_table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mixsens/graph.hpp"

#ifndef MIXSENS_VERSION
#define MIXSENS_VERSION "unknown"
#endif

namespace mixsens {

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string TableSchema::hash() const {
  std::string s = name + ":";
  for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
  return fnv1a_hex(s);
}

const std::vector<TableSchema>& table_schemas() {
  static const std::vector<TableSchema> all = {
      {"walk", {"seed", "trial", "start", "hit", "hit_time", "end_time", "end_vertex", "jumps"}},
      {"exit_times", {"stage", "start_kind", "start", "trials", "mean", "stderr", "q50", "q99", "max", "scale",
                      "ratio"}},
      {"biased_tree", {"delta", "k", "g", "count", "expected"}},
      {"time_in_clique", {"seed", "trial", "horizon", "min_fraction"}},
      {"coupling", {"seed", "trial", "coalesced", "time"}},
      {"tv_curve", {"n", "timebase", "t", "tv"}},
      {"mix_lower", {"t", "trials", "in_event", "pi_event", "tv_lower"}},
      {"separation", {"u", "graph", "gadget_vertices", "n", "t_up", "t_up_order", "t_low", "lb_at_t_up",
                      "ratio", "traversal_median_tk", "traversal_reach_last"}},
      {"separation_exit", {"u", "stage", "scale", "worst_mean", "ratio"}},
      {"weighted_sweep", {"delta", "stage", "trials", "reached", "fraction", "median_tk", "binomial_tail"}},
      {"clock", {"m", "check", "start", "value", "reference", "stderr"}},
      {"clock_returns", {"step", "b", "sigma_rank", "swaps"}},
      {"verification", {"check", "instances", "pass", "worst"}},
  };
  return all;
}

const TableSchema& schema_for(std::string_view name) {
  for (const auto& s : table_schemas())
    if (s.name == name) return s;
  throw Error("unknown table schema '" + std::string(name) + "'");
}

std::string version_string() { return MIXSENS_VERSION; }

ResultTable::ResultTable(std::string_view schema_name) : schema_(&schema_for(schema_name)) {}

void ResultTable::add_row(std::vector<Cell> cells) {
  if (cells.size() != schema_->columns.size())
    throw Error("table " + schema_->name + ": expected " + std::to_string(schema_->columns.size()) +
                " cells, got " + std::to_string(cells.size()));
  rows_.push_back(std::move(cells));
}

double ResultTable::number(std::size_t row, std::string_view column) const {
  for (std::size_t c = 0; c < schema_->columns.size(); ++c)
    if (schema_->columns[c] == column) {
      const Cell& v = rows_.at(row)[c];
      if (const auto* d = std::get_if<double>(&v)) return *d;
      if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
      throw Error("column " + std::string(column) + " is not numeric");
    }
  throw Error("table " + schema_->name + " has no column " + std::string(column));
}

std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) return "nan";
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    return format_double(*d);
  }
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string ResultTable::to_csv(const Provenance& prov) const {
  std::string out;
  out += "# table: " + schema_->name + "\n";
  out += "# schema_hash: " + schema_->hash() + "\n";
  out += "# config_hash: " + prov.config_hash + "\n";
  out += "# seed: " + std::to_string(prov.seed) + "\n";
  out += "# version: " + prov.version + "\n";
  for (std::size_t c = 0; c < schema_->columns.size(); ++c) out += (c ? "," : "") + schema_->columns[c];
  out += '\n';
  for (const auto& r : rows_) {
    for (std::size_t c = 0; c < r.size(); ++c) out += (c ? "," : "") + format_cell(r[c]);
    out += '\n';
  }
  return out;
}

void ResultTable::write(const std::string& path, const Provenance& prov) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << to_csv(prov);
}

}  // namespace mixsens
