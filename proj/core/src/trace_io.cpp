#include "invex/trace_io.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace invex {

namespace {
constexpr char kHeader[] = "iter,objective,grad_norm,step_norm,elapsed_ms";

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void write_trace_csv(const IterationTrace& trace, std::ostream& out) {
  out << kHeader << '\n';
  for (const auto& r : trace.rows)
    out << r.iter << ',' << fmt17(r.objective) << ',' << fmt17(r.grad_norm) << ','
        << fmt17(r.step_norm) << ',' << fmt17(r.elapsed_ms) << '\n';
}

void write_trace_csv(const IterationTrace& trace, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_trace_csv: cannot open " + path);
  write_trace_csv(trace, f);
}

IterationTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw std::runtime_error("read_trace_csv: bad or missing header");
  IterationTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 5> fields;
    size_t start = 0, idx = 0;
    for (; idx < 4; ++idx) {
      const size_t comma = line.find(',', start);
      if (comma == std::string::npos) break;
      fields[idx] = line.substr(start, comma - start);
      start = comma + 1;
    }
    fields[idx] = line.substr(start);
    if (idx != 4) throw std::runtime_error("read_trace_csv: malformed row: " + line);
    TraceRow row;
    row.iter = std::stoi(fields[0]);
    row.objective = std::strtod(fields[1].c_str(), nullptr);  // strtod handles inf/nan
    row.grad_norm = std::strtod(fields[2].c_str(), nullptr);
    row.step_norm = std::strtod(fields[3].c_str(), nullptr);
    row.elapsed_ms = std::strtod(fields[4].c_str(), nullptr);
    trace.rows.push_back(row);
  }
  return trace;
}

IterationTrace read_trace_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_trace_csv: cannot open " + path);
  return read_trace_csv(f);
}

}  // namespace invex
