#include "hdgc/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace hdgc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_cell(const std::string& cell, size_t line_no, size_t col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw std::runtime_error("csv: line " + std::to_string(line_no) +
                             ", column " + std::to_string(col + 1) +
                             ": cannot parse '" + cell + "' as a number");
  return value;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

TimeSeriesPanel read_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");

  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line))
    throw std::runtime_error("csv: '" + path + "' is empty");
  ++line_no;

  TimeSeriesPanel panel;
  panel.names = split_line(line);
  if (panel.names.empty())
    throw std::runtime_error("csv: '" + path + "' has an empty header");
  const size_t k = panel.names.size();

  std::vector<double> values;
  size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != k)
      throw std::runtime_error("csv: line " + std::to_string(line_no) +
                               ": expected " + std::to_string(k) +
                               " cells, got " + std::to_string(cells.size()));
    for (size_t c = 0; c < k; ++c)
      values.push_back(parse_cell(cells[c], line_no, c));
    ++rows;
  }
  if (rows == 0)
    throw std::runtime_error("csv: '" + path + "' has no data rows");

  panel.data.resize(long(rows), long(k));
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < k; ++c)
      panel.data(long(r), long(c)) = values[r * k + c];
  panel.validate();
  return panel;
}

void write_panel_csv(const TimeSeriesPanel& panel, const std::string& path) {
  panel.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
  for (size_t c = 0; c < panel.names.size(); ++c) {
    if (c) out << ',';
    out << panel.names[c];
  }
  out << '\n';
  for (long r = 0; r < panel.rows(); ++r) {
    for (long c = 0; c < panel.cols(); ++c) {
      if (c) out << ',';
      out << format_double(panel.data(r, c));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("csv: write to '" + path + "' failed");
}

}  // namespace hdgc
