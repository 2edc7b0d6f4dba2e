#pragma once

#include <iosfwd>
#include <string>

#include "invex/optimizer.hpp"

namespace invex {

/// CSV layout: header `iter,objective,grad_norm,step_norm,elapsed_ms`, one row
/// per trace row, floating-point fields printed with 17 significant digits.
void write_trace_csv(const IterationTrace& trace, std::ostream& out);
void write_trace_csv(const IterationTrace& trace, const std::string& path);

/// Parses a CSV produced by write_trace_csv (status is not stored in the CSV
/// and is left at its default).
IterationTrace read_trace_csv(std::istream& in);
IterationTrace read_trace_csv(const std::string& path);

}  // namespace invex
