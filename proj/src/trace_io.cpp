#include "geosmc/harness/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace geosmc::harness {

const std::array<std::string_view, kTraceColumnCount>& trace_columns()
{
  static const std::array<std::string_view, kTraceColumnCount> cols = {
      "t",
      "q_0", "q_1", "q_2", "q_3",
      "omega_x", "omega_y", "omega_z",
      "qd_0", "qd_1", "qd_2", "qd_3",
      "omegad_x", "omegad_y", "omegad_z",
      "qe_0", "qe_1", "qe_2", "qe_3",
      "s_0", "s_1", "s_2", "s_3",
      "tau_x", "tau_y", "tau_z",
      "err_norm", "s_norm", "tau_norm", "energy",
  };
  return cols;
}

std::string format_double(double value)
{
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc())
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

namespace {

template <typename Vec>
void append(std::string& row, const Vec& v)
{
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    row += ',';
    row += format_double(v(i));
  }
}

void append(std::string& row, double v)
{
  row += ',';
  row += format_double(v);
}

}  // namespace

void write_trace_csv(const SimTrace& trace, const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");

  std::string header;
  for (const auto& name : trace_columns()) {
    if (!header.empty())
      header += ',';
    header += name;
  }
  out << header << '\n';

  std::string row;
  for (const SimRecord& r : trace.records) {
    row = format_double(r.t);
    append(row, r.q);
    append(row, r.omega);
    append(row, r.qd);
    append(row, r.omegad);
    append(row, r.qe);
    append(row, r.s);
    append(row, r.tau);
    append(row, r.err_norm);
    append(row, r.s_norm);
    append(row, r.tau_norm);
    append(row, r.energy);
    out << row << '\n';
  }
  out.flush();
  if (!out)
    throw std::runtime_error("I/O error while writing '" + path.string() + "'");
}

std::vector<SimRecord> read_trace_csv(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open '" + path.string() + "' for reading");

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("'" + path.string() + "': missing header");

  std::vector<SimRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty())
      continue;
    std::array<double, kTraceColumnCount> v{};
    std::size_t col = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end && col < kTraceColumnCount) {
      const char* comma = std::find(p, end, ',');
      const auto [ptr, ec] = std::from_chars(p, comma, v[col]);
      if (ec != std::errc() || ptr != comma)
        throw std::runtime_error("'" + path.string() + "' line " + std::to_string(line_no) + ": bad number");
      ++col;
      p = comma + 1;
    }
    if (col != kTraceColumnCount || p <= end)
      throw std::runtime_error("'" + path.string() + "' line " + std::to_string(line_no) + ": expected " +
                               std::to_string(kTraceColumnCount) + " columns");
    SimRecord r;
    r.t = v[0];
    r.q = Eigen::Map<const Vector4d>(&v[1]);
    r.omega = Eigen::Map<const Vector3d>(&v[5]);
    r.qd = Eigen::Map<const Vector4d>(&v[8]);
    r.omegad = Eigen::Map<const Vector3d>(&v[12]);
    r.qe = Eigen::Map<const Vector4d>(&v[15]);
    r.s = Eigen::Map<const Vector4d>(&v[19]);
    r.tau = Eigen::Map<const Vector3d>(&v[23]);
    r.err_norm = v[26];
    r.s_norm = v[27];
    r.tau_norm = v[28];
    r.energy = v[29];
    records.push_back(r);
  }
  return records;
}

}  // namespace geosmc::harness
