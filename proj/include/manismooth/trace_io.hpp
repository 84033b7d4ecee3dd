#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "manismooth/harness.hpp"
#include "manismooth/trace.hpp"

namespace manismooth {

inline constexpr const char* kTraceHeader = "k,mu,tau,a,norm_G,obj_smooth,norm_grad_Fmu,infeas,norm_eps,wall_ns";

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

std::string format_trace_csv(std::span<const TraceRecord> trace);
void write_trace_csv(std::span<const TraceRecord> trace, const std::filesystem::path& path);

/// Throws TraceFormatError naming the offending line.
std::vector<TraceRecord> parse_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path);

nlohmann::json to_json(const RateFit& fit);

struct RunSummary {
  std::string algorithm;
  nlohmann::json problem;
  std::uint64_t seed = 0;
  long K = 0;
  nlohmann::json config;
  long i_K = 0;
  double grad_residual = 0.0;
  double feas_residual = 0.0;
  bool membership_ok = false;
  std::vector<RateFit> rate_fits;
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const RunSummary& summary);
void write_summary_json(const RunSummary& summary, const std::filesystem::path& path);

}  // namespace manismooth
