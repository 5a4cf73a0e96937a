#pragma once

#include "rplm/plm.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rplm {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Parses a whole cell as a double; throws ParseError tagged with `row`.
double parse_cell(std::string_view cell, std::size_t row, std::size_t column);

/// Splits one CSV line on commas (no quoting; cells are trimmed).
std::vector<std::string> split_csv_line(const std::string& line);

/// Reads `path` with a header row followed by rows
///   y, x_1..x_p, manifold coordinates
/// (2 for the cylinder: angle in radians then height; 3 for the sphere; d
/// for Euclidean space). With p = 0 the covariate count is inferred from
/// the header. Errors name the 1-based data row.
Dataset ingest_csv(const std::filesystem::path& path, const ManifoldSpec& manifold, std::size_t p = 0);
Dataset read_dataset(std::istream& in, const ManifoldSpec& manifold, std::size_t p = 0);

/// Writes the same layout ingest_csv reads, with round-trip exact numbers.
void write_dataset(std::ostream& out, const Dataset& data);

/// Reads rows of bare manifold coordinates (header row required).
std::vector<ManifoldPoint> read_points(std::istream& in, const ManifoldSpec& manifold);

}  // namespace rplm
