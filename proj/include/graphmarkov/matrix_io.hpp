#pragma once

#include "graphmarkov/graph.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace gmn {

/// Formats with 17 significant digits, enough to round-trip any double.
std::string format_double(double value);

/// Headerless CSV, one matrix row per line.
Matrix parse_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(std::ostream& out, const Matrix& matrix);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& matrix);

}  // namespace gmn
