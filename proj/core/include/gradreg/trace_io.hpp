#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "gradreg/trace.hpp"

namespace gradreg {

// Traces are JSON Lines: a header record followed by one record per iteration.
// Reports are JSON Lines with one certificate per line. Doubles are written in
// shortest round-trip form; non-finite values are written as the strings
// "inf", "-inf" and "nan".

void write_trace(std::ostream& out, const Trace& trace);
/// Throws ParseError (with the 1-based line) on malformed input.
Trace read_trace(std::istream& in);

void save_trace(const std::filesystem::path& path, const Trace& trace);
Trace load_trace(const std::filesystem::path& path);

void write_report(std::ostream& out, const std::vector<Certificate>& certificates);
std::vector<Certificate> read_report(std::istream& in);

}  // namespace gradreg
