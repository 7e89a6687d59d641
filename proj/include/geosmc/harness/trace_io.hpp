#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "geosmc/sim.hpp"

namespace geosmc::harness {

inline constexpr std::size_t kTraceColumnCount = 30;

/// Column names of the trace CSV, in file order.
const std::array<std::string_view, kTraceColumnCount>& trace_columns();

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Header row, then one row per record; comma separated, LF line endings.
void write_trace_csv(const SimTrace& trace, const std::filesystem::path& path);

/// Reads the records of a trace CSV written by write_trace_csv.
std::vector<SimRecord> read_trace_csv(const std::filesystem::path& path);

}  // namespace geosmc::harness
