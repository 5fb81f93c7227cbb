#include "transition/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace transition::io {

namespace {

std::string format(double value, int precision) {
  std::array<char, 64> buf{};
  std::to_chars_result res;
  if (precision > 0) {
    res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                        std::chars_format::general, precision);
  } else {
    res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  }
  return std::string(buf.data(), res.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string shortest(double value) { return format(value, 0); }

std::string full_precision(double value) { return format(value, 17); }

void write_csv(const std::filesystem::path& path,
               const std::vector<Column>& columns) {
  if (columns.empty()) throw io_error("write_csv: no columns");
  const Eigen::Index n = columns.front().values->size();
  std::string text;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].values->size() != n) {
      throw io_error("write_csv: column length mismatch");
    }
    text += (c ? "," : "") + columns[c].name;
  }
  text += '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) text += ',';
      text += full_precision((*columns[c].values)[i]);
    }
    text += '\n';
  }
  write_text(path, text);
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return columns[c];
  }
  throw config_error("csv: missing column '" + name + "'");
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (!have_header) {
      table.header = cells;
      table.columns.resize(cells.size());
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw config_error("parse error: line " + std::to_string(line_no) +
                         ": expected " + std::to_string(table.header.size()) +
                         " fields, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0;
      const auto& s = cells[c];
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw config_error("parse error: line " + std::to_string(line_no) +
                           ": '" + s + "' is not a number");
      }
      table.columns[c].push_back(v);
    }
  }
  if (!have_header) {
    throw config_error("parse error: line " + std::to_string(line_no + 1) +
                       ": empty file, expected a header");
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  return parse_csv(read_text(path));
}

ComplexField<double> read_field_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto& x = table.column("x");
  const auto& re = table.column("re_psi");
  const auto& im = table.column("im_psi");
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < 4) {
    throw config_error("field csv needs at least 4 rows, found " +
                       std::to_string(n));
  }
  Grid1D<double> grid(x.front(), x.back(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(x[i] - grid.x(i)) > 1e-9 * grid.dx() * (1.0 + std::abs(i))) {
      throw config_error("field csv: x column is not uniformly spaced (row " +
                         std::to_string(i + 2) + ")");
    }
  }
  ComplexArray<double> values(n);
  for (Eigen::Index i = 0; i < n; ++i) values[i] = {re[i], im[i]};
  return ComplexField<double>(grid, std::move(values));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw io_error("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw io_error("cannot create output directory '" + dir.string() +
                   "': " + ec.message());
  }
}

}  // namespace transition::io
