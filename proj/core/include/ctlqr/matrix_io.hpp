#pragma once

#include "ctlqr/linalg.hpp"

#include <filesystem>
#include <iosfwd>

namespace ctlqr {

// Text format: a "rows cols" header line followed by `rows` lines of
// whitespace-separated entries, written with 17 significant digits.

void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

}  // namespace ctlqr
