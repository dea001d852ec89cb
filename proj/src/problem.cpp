#include "pgeig/problem.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "pgeig/linalg.hpp"

namespace pgeig {

HermitianPencil::HermitianPencil(Matrix b, Matrix a) : b_(std::move(b)), a_(std::move(a)) {
  if (b_.rows() != b_.cols() || a_.rows() != a_.cols() || b_.rows() != a_.rows())
    throw StructuralError("HermitianPencil: A and B must be square of equal dimension");
  if (b_.rows() == 0) throw StructuralError("HermitianPencil: empty matrices");
  if (!is_hermitian(b_)) throw StructuralError("HermitianPencil: B is not Hermitian");
  if (!is_hermitian(a_)) throw StructuralError("HermitianPencil: A is not Hermitian");
  b_ = (b_ + b_.adjoint()) * 0.5;
  a_ = (a_ + a_.adjoint()) * 0.5;
  (void)cholesky(a_);
}

HermitianPencil HermitianPencil::standard(Matrix b) {
  const Index n = b.rows();
  return HermitianPencil(std::move(b), Matrix::Identity(n, n));
}

double default_cluster_tol(const RealVector& eigenvalues) {
  return hybrid_tol(1e-12, eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0);
}

SpectralData solve_pencil(const HermitianPencil& pencil) {
  const Matrix l = cholesky(pencil.a());
  const auto lu = l.triangularView<Eigen::Lower>();
  // C = L^-1 B L^-*
  Matrix c = lu.solve(pencil.b());
  c = lu.solve(c.adjoint().eval()).adjoint();
  c = (c + c.adjoint()) * 0.5;
  const auto e = eig_hermitian(c);

  SpectralData out;
  out.eigenvalues = e.values;
  out.eigenvectors = l.adjoint().triangularView<Eigen::Upper>().solve(e.vectors);
  out.cluster_tol = default_cluster_tol(out.eigenvalues);
  return out;
}

NormalizedProblem normalize_pencil(const HermitianPencil& pencil, const SpectralData& spectrum, double shift) {
  if (spectrum.smallest() + shift < -spectrum.cluster_tol)
    throw PreconditionError("normalize_pencil: shift leaves a negative eigenvalue");
  NormalizedProblem out;
  out.diagonal = (spectrum.eigenvalues.array() + shift).max(0.0).matrix();
  out.transform = spectrum.eigenvectors;
  out.inverse_transform = spectrum.eigenvectors.adjoint() * pencil.a();
  out.shift = shift;
  return out;
}

NormalizedProblem normalize_pencil(const HermitianPencil& pencil, double shift) {
  return normalize_pencil(pencil, solve_pencil(pencil), shift);
}

RealVector perturb_to_simple(const RealVector& diagonal, double epsilon) {
  if (!(epsilon > 0.0)) throw PreconditionError("perturb_to_simple: epsilon must be positive");
  const Index n = diagonal.size();
  if (n == 0) return diagonal;
  if ((diagonal.array() < 0.0).any())
    throw PreconditionError("perturb_to_simple: entries must be non-negative");

  const double gap = epsilon / (2.0 * static_cast<double>(n));
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index j, Index k) { return diagonal(j) < diagonal(k); });

  // Ascending sweep: each entry is at least the previous one plus the gap.
  // Entry k (0-based in ascending order) moves by at most (k + 1) * gap < epsilon / 2.
  RealVector out = diagonal;
  double previous = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Index j = order[k];
    const double floor = k == 0 ? gap : previous + gap;
    out(j) = std::max(diagonal(j), floor);
    previous = out(j);
  }
  return out;
}

Matrix random_unitary(Index n, Rng& rng, bool complex) {
  std::normal_distribution<double> normal;
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k) g(j, k) = Complex(normal(rng), complex ? normal(rng) : 0.0);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix column phases by the sign of R's diagonal so the result is a
  // function of the Gaussian draw alone.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < n; ++k) {
    const double m = std::abs(r(k, k));
    if (m > 0.0) q.col(k) *= r(k, k) / m;
  }
  return q;
}

Vector random_unit_vector(Index n, Rng& rng, bool complex) {
  std::normal_distribution<double> normal;
  Vector x(n);
  for (Index k = 0; k < n; ++k) x(k) = Complex(normal(rng), complex ? normal(rng) : 0.0);
  return x.normalized();
}

GeneratedProblem random_problem(Index dim, std::span<const double> spectrum, std::uint64_t seed,
                                RandomProblemOptions options) {
  if (dim < 2) throw PreconditionError("random_problem: dim must be at least 2");
  if (static_cast<Index>(spectrum.size()) != dim)
    throw PreconditionError("random_problem: spectrum size does not match dim");
  std::vector<double> values(spectrum.begin(), spectrum.end());
  for (double v : values) {
    if (!std::isfinite(v)) throw PreconditionError("random_problem: non-finite eigenvalue");
    if (options.require_positive && !(v > 0.0))
      throw PreconditionError("random_problem: spectrum must be positive");
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  const RealVector mu = Eigen::Map<const RealVector>(values.data(), dim);

  Rng rng(seed);
  const Matrix u = random_unitary(dim, rng, options.complex);
  Matrix l = Matrix::Identity(dim, dim);
  if (options.random_a) {
    std::normal_distribution<double> normal;
    Matrix g(dim, dim);
    for (Index j = 0; j < dim; ++j)
      for (Index k = 0; k < dim; ++k) g(j, k) = Complex(normal(rng), options.complex ? normal(rng) : 0.0);
    const Matrix a = g * g.adjoint() / static_cast<double>(dim) + Matrix::Identity(dim, dim);
    l = cholesky(a);
  }

  const Matrix x = l.adjoint().triangularView<Eigen::Upper>().solve(u);  // L^-* U
  const Matrix lu = l * u;
  Matrix b = lu * mu.cast<Complex>().asDiagonal() * lu.adjoint();
  Matrix a = l * l.adjoint();
  b = (b + b.adjoint()) * 0.5;
  a = (a + a.adjoint()) * 0.5;

  SpectralData data;
  data.eigenvalues = mu;
  data.eigenvectors = x;
  data.cluster_tol = default_cluster_tol(mu);
  return {HermitianPencil(std::move(b), std::move(a)), std::move(data)};
}

namespace {

double parse_double(std::string_view s) {
  const std::string str(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    throw PreconditionError("spectrum: cannot parse number '" + str + "'");
  }
  if (used != str.size() || !std::isfinite(v)) throw PreconditionError("spectrum: cannot parse number '" + str + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> parse_spectrum(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw PreconditionError("spectrum: expected kind:args");
  const std::string_view kind = text.substr(0, colon);
  const auto args = split(text.substr(colon + 1), ',');

  std::vector<double> out;
  if (kind == "list") {
    for (auto a : args) out.push_back(parse_double(a));
  } else if (kind == "linspace" || kind == "logspace") {
    if (args.size() != 3) throw PreconditionError("spectrum: " + std::string(kind) + " expects a,b,n");
    const double a = parse_double(args[0]);
    const double b = parse_double(args[1]);
    const double nd = parse_double(args[2]);
    if (nd < 1 || nd != std::floor(nd)) throw PreconditionError("spectrum: n must be a positive integer");
    const auto n = static_cast<int>(nd);
    if (kind == "logspace" && !(a > 0.0 && b > 0.0))
      throw PreconditionError("spectrum: logspace endpoints must be positive");
    for (int k = 0; k < n; ++k) {
      const double t = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
      out.push_back(kind == "linspace" ? a + (b - a) * t : a * std::pow(b / a, t));
    }
  } else {
    throw PreconditionError("spectrum: unknown kind '" + std::string(kind) + "'");
  }
  if (out.empty()) throw PreconditionError("spectrum: no values");
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace pgeig
