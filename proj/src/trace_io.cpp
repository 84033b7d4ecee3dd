#include "manismooth/trace_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "manismooth/errors.hpp"

namespace manismooth {

namespace {

constexpr std::size_t kColumns = 10;

void put(std::string& out, const std::optional<double>& v) {
  if (v) out += format_double(*v);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_real(std::string_view cell, const char* column, long line) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || end != cell.data() + cell.size() || cell.empty())
    throw TraceFormatError(std::string("column ") + column + ": not a number '" + std::string(cell) + "'", line);
  return v;
}

template <class Int>
Int parse_int(std::string_view cell, const char* column, long line) {
  Int v = 0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || end != cell.data() + cell.size() || cell.empty())
    throw TraceFormatError(std::string("column ") + column + ": not an integer '" + std::string(cell) + "'", line);
  return v;
}

std::optional<double> parse_optional(std::string_view cell, const char* column, long line) {
  if (cell.empty()) return std::nullopt;
  return parse_real(cell, column, line);
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

std::string format_trace_csv(std::span<const TraceRecord> trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const TraceRecord& r : trace) {
    out += std::to_string(r.k);
    out += ',';
    out += format_double(r.mu);
    out += ',';
    out += format_double(r.tau);
    out += ',';
    out += format_double(r.a);
    out += ',';
    out += format_double(r.norm_G);
    out += ',';
    put(out, r.obj_smooth);
    out += ',';
    put(out, r.norm_grad_Fmu);
    out += ',';
    out += format_double(r.infeas);
    out += ',';
    put(out, r.norm_eps);
    out += ',';
    out += std::to_string(r.wall_ns);
    out += '\n';
  }
  return out;
}

void write_trace_csv(std::span<const TraceRecord> trace, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << format_trace_csv(trace);
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::vector<TraceRecord> parse_trace_csv(std::istream& in) {
  std::string line;
  long lineno = 1;
  if (!std::getline(in, line)) throw TraceFormatError("missing header", lineno);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw TraceFormatError("unexpected header '" + line + "'", lineno);

  std::vector<TraceRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string_view> c = split(line);
    if (c.size() != kColumns)
      throw TraceFormatError("expected " + std::to_string(kColumns) + " fields, got " + std::to_string(c.size()),
                             lineno);
    TraceRecord r;
    r.k = parse_int<long>(c[0], "k", lineno);
    r.mu = parse_real(c[1], "mu", lineno);
    r.tau = parse_real(c[2], "tau", lineno);
    r.a = parse_real(c[3], "a", lineno);
    r.norm_G = parse_real(c[4], "norm_G", lineno);
    r.obj_smooth = parse_optional(c[5], "obj_smooth", lineno);
    r.norm_grad_Fmu = parse_optional(c[6], "norm_grad_Fmu", lineno);
    r.infeas = parse_real(c[7], "infeas", lineno);
    r.norm_eps = parse_optional(c[8], "norm_eps", lineno);
    r.wall_ns = parse_int<std::int64_t>(c[9], "wall_ns", lineno);
    if (!out.empty() && r.k <= out.back().k) throw TraceFormatError("k is not strictly increasing", lineno);
    out.push_back(r);
  }
  return out;
}

std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return parse_trace_csv(f);
}

nlohmann::json to_json(const RateFit& fit) {
  return nlohmann::json{{"field", fit.field},
                        {"slope", fit.slope},
                        {"intercept", fit.intercept},
                        {"r_squared", fit.r_squared},
                        {"window", {fit.window.k_lo, fit.window.k_hi}},
                        {"points", fit.points}};
}

nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json fits = nlohmann::json::array();
  for (const RateFit& f : s.rate_fits) fits.push_back(to_json(f));
  return nlohmann::json{{"schema_version", "1"},
                        {"algorithm", s.algorithm},
                        {"problem", s.problem},
                        {"seed", s.seed},
                        {"K", s.K},
                        {"config", s.config},
                        {"certificate",
                         {{"i_K", s.i_K},
                          {"grad_residual", s.grad_residual},
                          {"feas_residual", s.feas_residual},
                          {"membership_ok", s.membership_ok}}},
                        {"rate_fits", fits},
                        {"wall_seconds", s.wall_seconds}};
}

void write_summary_json(const RunSummary& summary, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << to_json(summary).dump(2) << '\n';
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace manismooth
