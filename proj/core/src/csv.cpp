// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nvms/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "nvms/errors.hpp"

namespace nvms {

void Table::add(std::vector<CsvCell> row) {
  if (row.size() != header.size()) throw std::invalid_argument("Table::add: row width mismatch");
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("no column '" + name + "'");
}

double Table::number(std::size_t row, const std::string& name) const {
  const CsvCell& c = rows.at(row).at(column(name));
  if (const double* d = std::get_if<double>(&c)) return *d;
  if (const long long* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
  throw std::invalid_argument("column '" + name + "' is not numeric");
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) out << format_number(v);
            else out << v;
          },
          row[i]);
    }
    out << "\n";
  }
}

void write_csv_file(const std::string& path, const Table& table) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_csv(out, table);
}

void write_gnuplot_stub(std::ostream& out, const std::string& csv_file, const Table& table,
                        const std::string& x_column, const std::vector<std::string>& y_columns,
                        bool log_scale) {
  out << "set datafile separator ','\n";
  out << "set key autotitle columnhead\n";
  if (log_scale) out << "set logscale xy\n";
  out << "set xlabel '" << x_column << "'\n";
  out << "plot ";
  const std::size_t x = table.column(x_column) + 1;
  for (std::size_t i = 0; i < y_columns.size(); ++i) {
    out << (i ? ", \\\n     " : "") << "'" << csv_file << "' using " << x << ":"
        << table.column(y_columns[i]) + 1 << " with lines";
  }
  out << "\n";
}

}  // namespace nvms
