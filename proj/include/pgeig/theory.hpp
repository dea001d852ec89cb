#pragma once

// Geometry of one preconditioned step in the normalized setting A = I,
// B = diag(d) with d >= 0. Functions that refer to an eigenvalue index
// assume d is sorted in decreasing order, so index k is the k-th eigenvector
// (0-based) and e_k is that eigenvector.

#include <limits>
#include <utility>

#include "pgeig/types.hpp"

namespace pgeig {

inline Vector apply_diagonal(const RealVector& d, const Vector& x) { return d.cast<Complex>().cwiseProduct(x); }

double rayleigh_quotient(const Vector& x, const RealVector& d);

/// Bx - mu(x) x.
Vector rayleigh_residual(const Vector& x, const RealVector& d);

/// True when ||Bx - mu(x) x|| <= 1e-13 ||Bx||.
bool is_eigenvector(const Vector& x, const RealVector& d);

/// Circular cone around Bx with half-angle phi_gamma(x) = arcsin(gamma ||Bx - mu x|| / ||Bx||).
struct ConeSpec {
  Vector axis;
  double opening_angle = 0.0;
  double gamma = 0.0;
  double kappa = 0.0;
};

ConeSpec cone_angle(const Vector& x, const RealVector& d, double gamma);
/// Same cone for a dense Hermitian positive semidefinite B.
ConeSpec cone_angle(const Vector& x, const Matrix& b, double gamma);

/// Minimizer of the Rayleigh quotient on the cone, w = (B + alpha I)^-1 B x
/// with the positive alpha that puts w on the cone boundary. ||w|| = 1.
struct MinimizerResult {
  Vector w;
  double alpha = 0.0;  // +inf when gamma is below 1e-12 and w is parallel to Bx
  double mu_w = 0.0;
  double opening_angle = 0.0;
  bool alpha_infinite() const { return alpha == std::numeric_limits<double>::infinity(); }
};

MinimizerResult cone_minimizer(const Vector& x, const RealVector& d, double gamma);

/// Coefficients of a alpha^2 + b alpha + c = 0 for the 2-D cone minimizer
/// and its sign-separated roots.
struct AlphaQuadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
};

AlphaQuadratic alpha_quadratic(double kappa, double mu_i, double mu_next, double gamma);

/// sigma = 1 - (1 - gamma)(mu_i - mu_next)/(mu_i - mu_min). Returns 1 (no
/// contraction) for a zero gap.
double sigma_factor(double mu_i, double mu_next, double mu_min, double gamma);

/// gamma + (1 - gamma) mu_next / mu_i, the mu_min = 0 form.
double sigma_factor_normalized(double mu_i, double mu_next, double gamma);

/// (mu_next / mu_i) (mu_i + alpha) / (mu_next + alpha); alpha = +inf gives mu_next / mu_i.
double sigma_of_alpha(double alpha, double mu_i, double mu_next);

/// Squared moduli of the coordinates of a unit x in span{x_i, x_{i+1}} with mu(x) = mu_x.
std::pair<double, double> two_dim_coordinates(double mu_x, double mu_i, double mu_next);

/// Non-negative unit vector in span{e_i, e_{i+1}} with Rayleigh quotient kappa.
Vector two_dim_representative(const RealVector& d, Index i, double kappa);

/// (mu_i - kappa)(kappa - mu_next).
double temple_bound(double kappa, double mu_i, double mu_next);

/// ||Bx - mu(x) x||^2 / ||x||^2.
double temple_residual(const Vector& x, const RealVector& d);

/// Gradient of mu with respect to the real and imaginary parts of x, packed
/// as a complex vector: 2 (Bx - mu(x) x) / ||x||^2.
Vector rayleigh_gradient(const Vector& x, const RealVector& d);

/// ||grad mu(x)||.
double gradient_norm(const Vector& x, const RealVector& d);

/// Component-wise modulus.
RealVector absolute_value_reduction(const Vector& x);

/// Central differences of mu in every real and imaginary direction.
Vector finite_difference_gradient(const Vector& x, const RealVector& d, double h);

/// Random point of the level set mu(x) = kappa with kappa in (d_{i+1}, d_i):
/// random components outside span{e_i, e_{i+1}} of scale `noise`, then the
/// two in-span moduli solved for so that mu(x) = kappa exactly. Unit norm.
Vector sample_level_set(const RealVector& d, Index i, double kappa, double noise, Rng& rng, bool complex);

/// Random unit vector on the boundary of the cone with the given axis and half-angle.
Vector sample_cone_boundary(const Vector& axis, double angle, Rng& rng, bool complex);

}  // namespace pgeig
