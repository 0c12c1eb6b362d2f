#include "stackelberg/bench/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "stackelberg/errors.hpp"

namespace stackelberg::bench {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  const Eigen::Index d = trace.epochs.empty() ? trace.final_center.size() : trace.epochs.front().theta.size();
  out << "epoch";
  for (Eigen::Index i = 0; i < d; ++i) out << ",theta_" << i;
  for (Eigen::Index i = 0; i < d; ++i) out << ",mu_" << i;
  out << ",L,R,running_avg_L,running_avg_R,br_gap\n";

  long t = 0;
  for (const EpochRecord& rec : trace.epochs) {
    out << ++t;
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << format_double(rec.theta[i]);
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << format_double(rec.mu[i]);
    out << ',' << format_double(rec.L) << ',' << format_double(rec.R) << ','
        << format_double(rec.running_avg_L) << ',' << format_double(rec.running_avg_R) << ','
        << format_double(rec.br_gap) << '\n';
  }
  if (trace.abort) out << "# aborted at epoch " << trace.abort->epoch << ": " << trace.abort->message << '\n';
}

void write_trace_file(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file " + path);
  write_trace_csv(out, trace);
  out.flush();
  if (!out) throw std::runtime_error("error writing trace file " + path);
}

std::size_t TraceTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ConfigError("trace has no column '" + name + "'");
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

TraceTable read_trace_csv(std::istream& in) {
  TraceTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace: empty file");
  table.columns = split(line);
  if (table.columns.empty() || table.columns.front() != "epoch")
    throw ConfigError("trace: header must start with 'epoch'");

  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      table.abort_marker = line.substr(line.find_first_not_of("# "));
      continue;
    }
    const auto fields = split(line);
    if (fields.size() != table.columns.size())
      throw ConfigError("trace: line " + std::to_string(line_no) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(table.columns.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str() || *end != '\0')
        throw ConfigError("trace: line " + std::to_string(line_no) + ": bad number '" + f + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

TraceTable read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file " + path);
  return read_trace_csv(in);
}

}  // namespace stackelberg::bench
