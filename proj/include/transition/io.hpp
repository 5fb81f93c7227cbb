#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "transition/wavefield.hpp"

namespace transition::io {

/// Shortest text that round-trips the value ("0.02", "20", "1e-08").
std::string shortest(double value);

/// 17 significant digits, locale independent.
std::string full_precision(double value);

struct Column {
  std::string name;
  const RealArray<double>* values;
};

/// Writes a header line and one row per sample. Throws an Io error on failure.
void write_csv(const std::filesystem::path& path,
               const std::vector<Column>& columns);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Parses a numeric CSV with a header line. Errors carry the line number.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

/// Reads columns x, re_psi, im_psi into a field on a uniform grid.
ComplexField<double> read_field_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void ensure_directory(const std::filesystem::path& dir);

}  // namespace transition::io
