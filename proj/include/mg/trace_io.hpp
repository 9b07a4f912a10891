#pragma once

#include <string>

#include "mg/game.hpp"

namespace mg {

// Trace CSV: comment lines carrying the generating config, then
//   t,A,minority,history,U_0,...,U_{K-1}
// with histories as canonical integers and utilities as exact scaled
// integers (column j belongs to tracked id j).
void write_trace_csv(const Trace& trace, const std::string& path);
std::string trace_csv_string(const Trace& trace);

Trace read_trace_csv(const std::string& path);
Trace parse_trace_csv(const std::string& text);

}  // namespace mg
