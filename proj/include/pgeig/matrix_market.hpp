#pragma once

#include <iosfwd>
#include <string>

#include "pgeig/types.hpp"

namespace pgeig {

class IoError : public Error {
 public:
  using Error::Error;
};

/// Reads a dense matrix from Matrix Market text (coordinate or array;
/// real, integer, or complex; general, symmetric, or hermitian). Symmetric
/// and Hermitian headers are trusted when expanding the stored triangle,
/// then the expanded matrix is checked for consistency.
Matrix read_matrix_market(std::istream& in);
Matrix read_matrix_market_file(const std::string& path);

/// Writes array format, "complex general" unless every entry is real.
void write_matrix_market(std::ostream& out, const Matrix& m);
void write_matrix_market_file(const std::string& path, const Matrix& m);

}  // namespace pgeig
