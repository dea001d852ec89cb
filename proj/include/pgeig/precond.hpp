#pragma once

#include <string>

#include "pgeig/types.hpp"

namespace pgeig {

enum class PreconditionerTag { identity, random, worst_case, user };

std::string to_string(PreconditionerTag tag);

struct GammaMeasurement {
  double gamma = 0.0;
  bool admissible = false;  // gamma < 1
};

/// Hermitian positive definite T with its measured quality gamma.
struct Preconditioner {
  Matrix t;
  double gamma_measured = 0.0;
  PreconditionerTag tag = PreconditionerTag::identity;
};

/// Smallest gamma with (1 - gamma)(z, T^-1 z) <= (z, A z) <= (1 + gamma)(z, T^-1 z)
/// for all z: with T = L L*, the eigenvalues lambda of L* A L give
/// gamma = max(1 - lambda_min, lambda_max - 1). For A = I this is ||I - T||.
GammaMeasurement measure_gamma(const Matrix& t, const Matrix& a);

Preconditioner identity_preconditioner(Index dim);

/// T = I - g Q with Q Hermitian, ||Q|| = 1 exactly, and g uniform on [0, gamma].
/// gamma = 0 gives T = I.
Preconditioner random_admissible(Index dim, double gamma, Rng& rng, bool complex = false);
Preconditioner random_admissible(Index dim, double gamma, std::uint64_t seed, bool complex = false);

/// Preconditioner T = I - gamma H (A = I, B = diag(d)) whose step from x lands
/// on the Rayleigh-quotient minimizer of the cone C_{phi_gamma(x)}(Bx). H is
/// the real Householder reflection taking gamma (Bx - kappa x) to Bx - y,
/// with y the cone minimizer scaled so that (y, Bx - y) = 0. A complex x is
/// replaced by |x| first.
Preconditioner worst_case(const Vector& x, const RealVector& d, double gamma);

/// Carries a preconditioner from normalized coordinates (x = X c with
/// X* A X = I) back to the pencil: T = X T_n X*. Gamma is preserved.
Preconditioner lift_to_pencil(const Preconditioner& normalized, const Matrix& transform);

/// Wraps a user-supplied T, verifying Hermitian positive definiteness and gamma < 1.
Preconditioner user_preconditioner(const Matrix& t, const Matrix& a);

}  // namespace pgeig
