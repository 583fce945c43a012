#pragma once

#include "ncwave/sbp_operators.hpp"

#include <iosfwd>
#include <string>

namespace ncwave {

/// Coordinate triplets: a header line "rows cols nnz", then "i j value" per
/// stored entry (0-based, row-major order, 17 significant digits).
void write_triplets(std::ostream& out, const SparseMatrix& a);
SparseMatrix read_triplets(std::istream& in);

/// Diagonal operators written as sparse diagonals.
SparseMatrix diagonal_matrix(const Vector& d);

/// Creates the directory (and parents) if missing; throws Error on failure.
void ensure_directory(const std::string& path);

}  // namespace ncwave
