// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace nvms {

using CsvCell = std::variant<double, long long, std::string>;

/// Rectangular table written as comma-separated text. Doubles use 17
/// significant digits so that values round-trip exactly.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;

  void add(std::vector<CsvCell> row);
  /// Index of a header column; throws std::out_of_range when missing.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

std::string format_number(double v);
void write_csv(std::ostream& out, const Table& table);
/// Writes `table` to `path`, creating parent directories.
void write_csv_file(const std::string& path, const Table& table);

/// Minimal gnuplot script plotting columns of a CSV file against `x_column`.
void write_gnuplot_stub(std::ostream& out, const std::string& csv_file, const Table& table,
                        const std::string& x_column, const std::vector<std::string>& y_columns,
                        bool log_scale);

}  // namespace nvms
