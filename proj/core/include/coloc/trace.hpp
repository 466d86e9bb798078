#pragma once

#include "coloc/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace coloc {

/// One synchronous round (or one gradient step for the centralized baseline).
struct TraceRow {
  int iter = 0;
  double rmse = 0.0;
  double max_gap = 0.0;
  double mean_gap = 0.0;
  double nonconvex_frac = 0.0;
  std::int64_t messages = 0;  // directed messages sent during this round
  double elapsed_ms = 0.0;    // cumulative wall time, 0 when timing is off
};

struct RunTrace {
  // Ordered key/value audit trail written as '# key=value' lines.
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<TraceRow> rows;
  std::vector<Vec> final_estimates;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  [[nodiscard]] const std::string* get(const std::string& key) const;

  [[nodiscard]] double final_rmse() const;
  [[nodiscard]] std::int64_t total_messages() const;
};

inline constexpr const char* kTraceColumns =
    "iter,rmse,max_gap,mean_gap,nonconvex_frac,messages,elapsed_ms";

std::string format_number(double value);

void write_trace_csv(std::ostream& out, const RunTrace& trace);
void save_trace_csv(const RunTrace& trace, const std::filesystem::path& path);

/// Row-wise mean of traces with equal lengths (rmse, gaps, fractions,
/// messages and times averaged); metadata copied from the first.
RunTrace average_traces(const std::vector<RunTrace>& traces);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace coloc
