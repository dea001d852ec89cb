#include "pgeig/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pgeig/linalg.hpp"

namespace pgeig {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

Matrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("matrix market: empty input");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw IoError("matrix market: missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw IoError("matrix market: only 'matrix' objects are supported");
  if (format != "coordinate" && format != "array") throw IoError("matrix market: unknown format " + format);
  if (field != "real" && field != "integer" && field != "double" && field != "complex")
    throw IoError("matrix market: unsupported field " + field);
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian")
    throw IoError("matrix market: unsupported symmetry " + symmetry);
  const bool is_complex = field == "complex";
  const bool mirrored = symmetry != "general";

  if (!next_data_line(in, line)) throw IoError("matrix market: missing size line");
  std::istringstream size_line(line);
  long rows = 0, cols = 0, nnz = 0;
  size_line >> rows >> cols;
  if (format == "coordinate") size_line >> nnz;
  if (!size_line || rows <= 0 || cols <= 0) throw IoError("matrix market: bad size line");
  if (mirrored && rows != cols) throw IoError("matrix market: symmetric storage requires a square matrix");

  Matrix m = Matrix::Zero(rows, cols);
  auto read_value = [&](std::istringstream& s) {
    double re = 0.0, im = 0.0;
    s >> re;
    if (is_complex) s >> im;
    if (!s) throw IoError("matrix market: malformed entry '" + line + "'");
    return Complex(re, im);
  };
  auto store = [&](long r, long c, Complex v) {
    m(r, c) = v;
    if (mirrored && r != c) m(c, r) = symmetry == "hermitian" ? std::conj(v) : v;
  };

  if (format == "coordinate") {
    for (long k = 0; k < nnz; ++k) {
      if (!next_data_line(in, line)) throw IoError("matrix market: truncated entries");
      std::istringstream s(line);
      long r = 0, c = 0;
      s >> r >> c;
      const Complex v = read_value(s);
      if (r < 1 || r > rows || c < 1 || c > cols) throw IoError("matrix market: index out of range");
      store(r - 1, c - 1, v);
    }
  } else {
    // Column-major; symmetric storage lists the lower triangle only.
    for (long c = 0; c < cols; ++c) {
      for (long r = mirrored ? c : 0; r < rows; ++r) {
        if (!next_data_line(in, line)) throw IoError("matrix market: truncated entries");
        std::istringstream s(line);
        store(r, c, read_value(s));
      }
    }
  }
  if (!m.allFinite()) throw IoError("matrix market: non-finite entry");
  if (mirrored && !is_hermitian(m)) throw IoError("matrix market: declared symmetry does not hold");
  return m;
}

Matrix read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const Matrix& m) {
  const bool real = m.imag().cwiseAbs().maxCoeff() == 0.0;
  out << "%%MatrixMarket matrix array " << (real ? "real" : "complex") << " general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[64];
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c).real());
      out << buf;
      if (!real) {
        std::snprintf(buf, sizeof buf, "%.17g", m(r, c).imag());
        out << ' ' << buf;
      }
      out << '\n';
    }
  }
}

void write_matrix_market_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_matrix_market(out, m);
}

}  // namespace pgeig
