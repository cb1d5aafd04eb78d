#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mixsens {

using Cell = std::variant<std::int64_t, double, std::string>;

std::string fnv1a_hex(std::string_view text);

struct TableSchema {
  std::string name;
  std::vector<std::string> columns;

  /// FNV-1a of "name:col1,col2,...".
  std::string hash() const;
};

/// Every CSV the tool writes; docs/schema.md mirrors this list.
const std::vector<TableSchema>& table_schemas();
const TableSchema& schema_for(std::string_view name);

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
};

std::string version_string();

class ResultTable {
 public:
  explicit ResultTable(std::string_view schema_name);

  const TableSchema& schema() const { return *schema_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<Cell>& row(std::size_t i) const { return rows_[i]; }
  double number(std::size_t row, std::string_view column) const;

  void add_row(std::vector<Cell> cells);

  /// "# key: value" header lines, then the column row and the data rows.
  std::string to_csv(const Provenance& prov) const;
  void write(const std::string& path, const Provenance& prov) const;

 private:
  const TableSchema* schema_;
  std::vector<std::vector<Cell>> rows_;
};

std::string format_cell(const Cell& c);

}  // namespace mixsens
