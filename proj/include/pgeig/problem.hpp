#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "pgeig/types.hpp"

namespace pgeig {

/// The pencil B - mu A with Hermitian B and Hermitian positive definite A.
class HermitianPencil {
 public:
  HermitianPencil(Matrix b, Matrix a);

  /// Standard problem, A = I.
  static HermitianPencil standard(Matrix b);

  const Matrix& b() const { return b_; }
  const Matrix& a() const { return a_; }
  Index dim() const { return b_.rows(); }

 private:
  Matrix b_;
  Matrix a_;
};

/// Eigenvalues in decreasing order with A-orthonormal eigenvectors.
struct SpectralData {
  RealVector eigenvalues;
  Matrix eigenvectors;
  double cluster_tol = 0.0;

  Index dim() const { return eigenvalues.size(); }
  double largest() const { return eigenvalues(0); }
  double smallest() const { return eigenvalues(eigenvalues.size() - 1); }
  /// Eigenvector coordinates of x: c = X* A x.
  Vector coordinates(const Vector& x, const Matrix& a) const { return eigenvectors.adjoint() * (a * x); }
};

/// 1e-12 * max(1, max |mu_k|).
double default_cluster_tol(const RealVector& eigenvalues);

SpectralData solve_pencil(const HermitianPencil& pencil);

/// The pencil in its own eigenbasis, shifted by s: A = I, B = diag(mu_k + s).
struct NormalizedProblem {
  RealVector diagonal;
  Matrix transform;          // x = transform * c
  Matrix inverse_transform;  // c = inverse_transform * x
  double shift = 0.0;

  Vector to_normalized(const Vector& x) const { return inverse_transform * x; }
  Vector from_normalized(const Vector& c) const { return transform * c; }
};

NormalizedProblem normalize_pencil(const HermitianPencil& pencil, const SpectralData& spectrum, double shift);
NormalizedProblem normalize_pencil(const HermitianPencil& pencil, double shift);

/// Raises entries of a non-negative diagonal by less than epsilon so that all
/// entries are positive and pairwise separated by at least epsilon / (2 dim).
RealVector perturb_to_simple(const RealVector& diagonal, double epsilon);

struct RandomProblemOptions {
  bool complex = false;   // complex unitary eigenbasis
  bool random_a = false;  // random SPD A instead of the identity
  bool require_positive = false;
};

struct GeneratedProblem {
  HermitianPencil pencil;
  SpectralData spectrum;
};

/// Random unitary (or real orthogonal) matrix from the QR factor of a
/// seeded Gaussian matrix.
Matrix random_unitary(Index n, Rng& rng, bool complex);

/// Random unit vector (real or complex Gaussian direction).
Vector random_unit_vector(Index n, Rng& rng, bool complex);

/// Pencil with exactly the prescribed spectrum: B = U D U* (A = I), or
/// B = L U D U* L*, A = L L* when a random A is requested.
GeneratedProblem random_problem(Index dim, std::span<const double> spectrum, std::uint64_t seed,
                                RandomProblemOptions options = {});

/// Spectrum mini-language: "list:2,1,0.5", "linspace:a,b,n", "logspace:a,b,n".
/// logspace produces n values geometrically spaced from a to b (a, b > 0).
/// Values are returned sorted in decreasing order.
std::vector<double> parse_spectrum(std::string_view text);

}  // namespace pgeig
