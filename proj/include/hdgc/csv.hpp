#pragma once

#include <string>

#include "hdgc/panel.hpp"

namespace hdgc {

/// Reads a panel from CSV. First row = series names, every later row = one
/// time point, all cells numeric. Throws std::runtime_error with a
/// line-numbered message on malformed input.
TimeSeriesPanel read_panel_csv(const std::string& path);

/// Writes a panel as CSV (shortest round-trip formatting, locale independent).
void write_panel_csv(const TimeSeriesPanel& panel, const std::string& path);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

}  // namespace hdgc
