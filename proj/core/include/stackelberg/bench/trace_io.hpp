#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stackelberg/dynamics.hpp"

namespace stackelberg::bench {

// Shortest round-trip text for a double (17 significant digits).
std::string format_double(double x);

// Header row, then one row per epoch:
//   epoch, theta_0.., mu_0.., L, R, running_avg_L, running_avg_R, br_gap
// An aborted trace ends with a comment line "# aborted at epoch <t>: <message>".
void write_trace_csv(std::ostream& out, const Trace& trace);
void write_trace_file(const std::string& path, const Trace& trace);

struct TraceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::optional<std::string> abort_marker;

  // Index of `name` in columns; throws ConfigError if absent.
  std::size_t column(const std::string& name) const;
};

TraceTable read_trace_csv(std::istream& in);
TraceTable read_trace_file(const std::string& path);

}  // namespace stackelberg::bench
