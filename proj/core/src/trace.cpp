#include "coloc/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace coloc {

void RunTrace::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

void RunTrace::set(const std::string& key, double value) { set(key, format_number(value)); }

const std::string* RunTrace::get(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return &v;
  }
  return nullptr;
}

double RunTrace::final_rmse() const {
  return rows.empty() ? std::numeric_limits<double>::quiet_NaN() : rows.back().rmse;
}

std::int64_t RunTrace::total_messages() const {
  std::int64_t total = 0;
  for (const auto& r : rows) total += r.messages;
  return total;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  for (const auto& [k, v] : trace.metadata) out << "# " << k << '=' << v << '\n';
  out << kTraceColumns << '\n';
  for (const auto& r : trace.rows) {
    out << r.iter << ',' << format_number(r.rmse) << ',' << format_number(r.max_gap) << ','
        << format_number(r.mean_gap) << ',' << format_number(r.nonconvex_frac) << ','
        << r.messages << ',' << format_number(r.elapsed_ms) << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_trace_csv(const RunTrace& trace, const std::filesystem::path& path) {
  std::ostringstream buf;
  write_trace_csv(buf, trace);
  write_file_atomic(path, buf.str());
}

RunTrace average_traces(const std::vector<RunTrace>& traces) {
  RunTrace out;
  if (traces.empty()) return out;
  out.metadata = traces.front().metadata;
  const std::size_t len = traces.front().rows.size();
  for (const auto& t : traces) {
    if (t.rows.size() != len) throw std::invalid_argument("traces differ in length");
  }
  const double inv = 1.0 / static_cast<double>(traces.size());
  out.rows.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    TraceRow acc;
    acc.iter = traces.front().rows[k].iter;
    double messages = 0.0;
    for (const auto& t : traces) {
      const TraceRow& r = t.rows[k];
      acc.rmse += r.rmse * inv;
      acc.max_gap += r.max_gap * inv;
      acc.mean_gap += r.mean_gap * inv;
      acc.nonconvex_frac += r.nonconvex_frac * inv;
      acc.elapsed_ms += r.elapsed_ms * inv;
      messages += static_cast<double>(r.messages) * inv;
    }
    acc.messages = static_cast<std::int64_t>(messages + 0.5);
    out.rows[k] = acc;
  }
  out.set("averaged_runs", std::to_string(traces.size()));
  return out;
}

}  // namespace coloc
