#include "pgeig/precond.hpp"

#include <cmath>

#include "pgeig/linalg.hpp"
#include "pgeig/theory.hpp"

namespace pgeig {

std::string to_string(PreconditionerTag tag) {
  switch (tag) {
    case PreconditionerTag::identity: return "identity";
    case PreconditionerTag::random: return "random";
    case PreconditionerTag::worst_case: return "worst-case";
    case PreconditionerTag::user: return "user";
  }
  return "unknown";
}

GammaMeasurement measure_gamma(const Matrix& t, const Matrix& a) {
  if (t.rows() != a.rows() || t.cols() != a.cols()) throw StructuralError("measure_gamma: dimension mismatch");
  const Matrix l = cholesky(t);
  (void)cholesky(a);
  Matrix m = l.adjoint() * a * l;
  m = (m + m.adjoint()) * 0.5;
  const auto e = eig_hermitian(m);
  const double lmax = e.values(0);
  const double lmin = e.values(e.values.size() - 1);
  GammaMeasurement out;
  out.gamma = std::max({0.0, 1.0 - lmin, lmax - 1.0});
  out.admissible = out.gamma < 1.0;
  return out;
}

Preconditioner identity_preconditioner(Index dim) {
  return {Matrix::Identity(dim, dim), 0.0, PreconditionerTag::identity};
}

Preconditioner random_admissible(Index dim, double gamma, Rng& rng, bool complex) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw PreconditionError("random_admissible: gamma must lie in [0, 1)");
  std::normal_distribution<double> normal;
  Matrix g(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index k = 0; k < dim; ++k) g(j, k) = Complex(normal(rng), complex ? normal(rng) : 0.0);
  Matrix q = (g + g.adjoint()) * 0.5;
  const auto e = eig_hermitian(q);
  const double scale = std::max(std::abs(e.values(0)), std::abs(e.values(dim - 1)));
  // Rescale eigenvalues to ||Q|| = 1.
  const RealVector normalized = e.values / scale;
  q = e.vectors * normalized.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  q = (q + q.adjoint()) * 0.5;

  const double step = gamma == 0.0 ? 0.0 : std::uniform_real_distribution<double>(0.0, gamma)(rng);
  Preconditioner p;
  p.t = Matrix::Identity(dim, dim) - step * q;
  p.t = (p.t + p.t.adjoint()) * 0.5;
  p.gamma_measured = measure_gamma(p.t, Matrix::Identity(dim, dim)).gamma;
  p.tag = PreconditionerTag::random;
  return p;
}

Preconditioner random_admissible(Index dim, double gamma, std::uint64_t seed, bool complex) {
  Rng rng(seed);
  return random_admissible(dim, gamma, rng, complex);
}

Preconditioner worst_case(const Vector& x_in, const RealVector& d, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw PreconditionError("worst_case: gamma must lie in (0, 1)");
  const Vector x = absolute_value_reduction(x_in).cast<Complex>();
  const Vector bx = apply_diagonal(d, x);
  const double kappa = rayleigh_quotient(x, d);
  const Vector r = bx - kappa * x;
  if (r.norm() <= 1e-13 * bx.norm()) throw DegenerateInput("worst_case: no worst case at an eigenvector");

  const MinimizerResult m = cone_minimizer(x, d, gamma);
  // Scale w so that Bx - y is orthogonal to y; then ||Bx - y|| = gamma ||r||.
  const Vector y = m.w * m.w.dot(bx);
  const Vector target = bx - y;
  const Vector source = gamma * r;
  // Both vectors are real; strip rounding noise from the imaginary parts.
  const RealVector target_re = target.real();
  const RealVector source_re = source.real();
  // Match norms exactly; they agree analytically and differ only by rounding.
  const RealVector target_scaled = target_re * (source_re.norm() / target_re.norm());
  const RealMatrix h = householder_mapping(source_re, target_scaled);

  const Index n = d.size();
  Preconditioner p;
  p.t = (RealMatrix::Identity(n, n) - gamma * h).cast<Complex>();
  p.gamma_measured = measure_gamma(p.t, Matrix::Identity(n, n)).gamma;
  p.tag = PreconditionerTag::worst_case;
  return p;
}

Preconditioner lift_to_pencil(const Preconditioner& normalized, const Matrix& transform) {
  Preconditioner p = normalized;
  p.t = transform * normalized.t * transform.adjoint();
  p.t = (p.t + p.t.adjoint()) * 0.5;
  return p;
}

Preconditioner user_preconditioner(const Matrix& t, const Matrix& a) {
  if (!is_hermitian(t)) throw StructuralError("preconditioner is not Hermitian");
  const GammaMeasurement g = measure_gamma(t, a);
  if (!g.admissible) throw PreconditionError("preconditioner is not admissible (gamma >= 1)");
  return {(t + t.adjoint()) * 0.5, g.gamma, PreconditionerTag::user};
}

}  // namespace pgeig
