#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stokpp/grid_field.hpp"

namespace stokpp {

/// CSV with header `x,value`, one row per node, full round-trip precision.
void write_field_csv(std::ostream& out, const Field& field);

/// Binary snapshot, little-endian: x0, dx (f64), n (i64), frame_offset,
/// time (f64), then n f64 values.
void write_snapshot(std::ostream& out, const Field& field);
Field read_snapshot(std::istream& in);

/// Quotes a CSV cell when it contains a comma, quote or line break.
std::string csv_escape(const std::string& cell);

/// Writes one CSV row from already formatted cells.
void write_csv_row(std::ostream& out, std::span<const std::string> cells);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace stokpp
