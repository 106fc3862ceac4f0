#include "zrlj/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "zrlj/errors.hpp"

namespace zrlj::io {

std::string format(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw ConfigError("csv row has " + std::to_string(row.size()) + " cells, expected " +
                      std::to_string(columns_.size()));
  rows_.push_back(std::move(row));
}

std::string render_csv(const Table& table, const Meta& meta) {
  std::ostringstream out;
  out << "# version = " << kVersion << '\n';
  for (const auto& [k, v] : meta) out << "# " << k << " = " << v << '\n';
  for (std::size_t i = 0; i < table.columns().size(); ++i) out << (i ? "," : "") << table.columns()[i];
  out << '\n';
  for (const auto& row : table.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format(row[i]);
    out << '\n';
  }
  return out.str();
}

void write_csv(const std::filesystem::path& path, const Table& table, const Meta& meta) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open " + path.string() + " for writing");
  f << render_csv(table, meta);
  if (!f) throw ConfigError("write failed: " + path.string());
}

}  // namespace zrlj::io
