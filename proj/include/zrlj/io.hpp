#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace zrlj::io {

inline constexpr const char* kVersion = "zrlj 0.1.0";

using Cell = std::variant<double, std::int64_t, std::string>;
/// key = value lines copied into every output header.
using Meta = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip decimal form.
std::string format(double v);
std::string format(const Cell& c);

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add(std::vector<Cell> row);
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// "# key = value" header (version first), then the column line and rows.
std::string render_csv(const Table& table, const Meta& meta);
void write_csv(const std::filesystem::path& path, const Table& table, const Meta& meta);

}  // namespace zrlj::io
