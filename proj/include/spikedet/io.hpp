#pragma once

// Plain-text matrix files. Line 1 is "N real" or "N complex"; then N lines of
// N whitespace-separated values, complex entries written as a+bi.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "spikedet/wigner.hpp"

namespace spikedet {

/// Throws std::runtime_error with a line number on malformed input, including
/// matrices that are not exactly symmetric (Hermitian).
DataMatrix parse_matrix(std::istream& in);
DataMatrix read_matrix(const std::filesystem::path& path);

/// Round-trip exact (17 significant digits), LF line endings.
std::string format_matrix(const DataMatrix& m);
void write_matrix(const DataMatrix& m, const std::filesystem::path& path);

}  // namespace spikedet
