#include "pgeig/theory.hpp"

#include <cmath>
#include <string>

#include "pgeig/linalg.hpp"

namespace pgeig {

namespace {

void require_nonzero(const Vector& x, const char* who) {
  if (x.size() == 0 || !(x.norm() > 0.0)) throw PreconditionError(std::string(who) + ": zero vector");
}

void require_nonnegative(const RealVector& d, const Vector& x, const char* who) {
  if (d.size() != x.size()) throw StructuralError(std::string(who) + ": dimension mismatch");
  if ((d.array() < 0.0).any()) throw PreconditionError(std::string(who) + ": diagonal must be non-negative");
}

void require_gamma(double gamma, double upper, const char* who) {
  if (!(gamma >= 0.0 && gamma <= upper)) throw PreconditionError(std::string(who) + ": gamma out of range");
}

}  // namespace

double rayleigh_quotient(const Vector& x, const RealVector& d) {
  require_nonzero(x, "rayleigh_quotient");
  return d.dot(x.cwiseAbs2()) / x.squaredNorm();
}

Vector rayleigh_residual(const Vector& x, const RealVector& d) {
  return apply_diagonal(d, x) - rayleigh_quotient(x, d) * x;
}

bool is_eigenvector(const Vector& x, const RealVector& d) {
  return rayleigh_residual(x, d).norm() <= 1e-13 * apply_diagonal(d, x).norm();
}

ConeSpec cone_angle(const Vector& x, const RealVector& d, double gamma) {
  require_nonzero(x, "cone_angle");
  require_nonnegative(d, x, "cone_angle");
  require_gamma(gamma, 1.0, "cone_angle");
  ConeSpec cone;
  cone.axis = apply_diagonal(d, x);
  const double axis_norm = cone.axis.norm();
  if (!(axis_norm > 0.0)) throw DegenerateInput("cone_angle: Bx = 0");
  cone.kappa = rayleigh_quotient(x, d);
  const double r = (cone.axis - cone.kappa * x).norm();
  cone.opening_angle = std::asin(std::min(1.0, gamma * r / axis_norm));
  cone.gamma = gamma;
  return cone;
}

ConeSpec cone_angle(const Vector& x, const Matrix& b, double gamma) {
  require_nonzero(x, "cone_angle");
  require_gamma(gamma, 1.0, "cone_angle");
  if (b.rows() != x.size() || !is_hermitian(b)) throw StructuralError("cone_angle: B must be Hermitian of matching size");
  ConeSpec cone;
  cone.axis = b * x;
  const double axis_norm = cone.axis.norm();
  if (!(axis_norm > 0.0)) throw DegenerateInput("cone_angle: Bx = 0");
  cone.kappa = x.dot(cone.axis).real() / x.squaredNorm();
  const double r = (cone.axis - cone.kappa * x).norm();
  cone.opening_angle = std::asin(std::min(1.0, gamma * r / axis_norm));
  cone.gamma = gamma;
  return cone;
}

MinimizerResult cone_minimizer(const Vector& x, const RealVector& d, double gamma) {
  require_gamma(gamma, 1.0 - 1e-15, "cone_minimizer");
  const ConeSpec cone = cone_angle(x, d, gamma);
  const Vector& bx = cone.axis;

  MinimizerResult out;
  out.opening_angle = cone.opening_angle;
  if (gamma < 1e-12) {
    out.w = bx.normalized();
    out.alpha = std::numeric_limits<double>::infinity();
    out.mu_w = rayleigh_quotient(out.w, d);
    return out;
  }
  if ((bx - cone.kappa * x).norm() <= 1e-13 * bx.norm())
    throw DegenerateInput("cone_minimizer: x is an eigenvector");
  const double scale = d.maxCoeff();
  for (Index k = 0; k < d.size(); ++k)
    if (std::abs(d(k) - cone.kappa) <= hybrid_tol(1e-12, scale))
      throw PreconditionError("cone_minimizer: mu(x) coincides with an eigenvalue");

  auto w_of = [&](double alpha) -> Vector {
    Vector w(x.size());
    for (Index k = 0; k < x.size(); ++k) w(k) = bx(k) / (d(k) + alpha);
    return w;
  };
  auto excess = [&](double alpha) { return angle_between(w_of(alpha), bx) - cone.opening_angle; };

  // The angle equals phi_1 > phi_gamma as alpha -> 0+ and tends to 0 as alpha -> inf.
  double lo = 0.0;
  double hi = scale > 0.0 ? scale : 1.0;
  for (int k = 0; k < 2000 && excess(hi) > 0.0; ++k) {
    lo = hi;
    hi *= 2.0;
  }
  for (int k = 0; k < 400 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  out.alpha = 0.5 * (lo + hi);
  out.w = w_of(out.alpha).normalized();
  out.mu_w = rayleigh_quotient(out.w, d);
  return out;
}

AlphaQuadratic alpha_quadratic(double kappa, double mu_i, double mu_next, double gamma) {
  if (!(mu_next > 0.0)) throw PreconditionError("alpha_quadratic: mu_{i+1} must be positive");
  if (!(mu_next < kappa && kappa < mu_i)) throw PreconditionError("alpha_quadratic: kappa must lie strictly inside (mu_{i+1}, mu_i)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw PreconditionError("alpha_quadratic: gamma must lie in (0, 1)");
  const double g2 = gamma * gamma;
  AlphaQuadratic q;
  q.a = g2 * (kappa * (mu_i + mu_next) - mu_i * mu_next);
  q.b = 2.0 * g2 * kappa * mu_i * mu_next;
  q.c = -(1.0 - g2) * mu_i * mu_i * mu_next * mu_next;
  // b > 0, so the cancellation-free pair is q/a and c/q.
  const double t = -0.5 * (q.b + std::sqrt(q.b * q.b - 4.0 * q.a * q.c));
  q.alpha_minus = t / q.a;
  q.alpha_plus = q.c / t;
  return q;
}

double sigma_factor(double mu_i, double mu_next, double mu_min, double gamma) {
  if (!(mu_i >= mu_next && mu_next >= mu_min)) throw PreconditionError("sigma_factor: need mu_i >= mu_{i+1} >= mu_min");
  require_gamma(gamma, 1.0, "sigma_factor");
  if (mu_i == mu_next) return 1.0;
  return 1.0 - (1.0 - gamma) * (mu_i - mu_next) / (mu_i - mu_min);
}

double sigma_factor_normalized(double mu_i, double mu_next, double gamma) {
  if (!(mu_i > 0.0)) throw PreconditionError("sigma_factor_normalized: mu_i must be positive");
  return gamma + (1.0 - gamma) * mu_next / mu_i;
}

double sigma_of_alpha(double alpha, double mu_i, double mu_next) {
  if (!(alpha > 0.0)) throw PreconditionError("sigma_of_alpha: alpha must be positive (negative root is the cone maximizer)");
  if (std::isinf(alpha)) return mu_next / mu_i;
  return (mu_next / mu_i) * (mu_i + alpha) / (mu_next + alpha);
}

std::pair<double, double> two_dim_coordinates(double mu_x, double mu_i, double mu_next) {
  if (!(mu_i > mu_next)) throw PreconditionError("two_dim_coordinates: need mu_i > mu_{i+1}");
  if (!(mu_x >= mu_next && mu_x <= mu_i)) throw PreconditionError("two_dim_coordinates: mu(x) outside [mu_{i+1}, mu_i]");
  const double gap = mu_i - mu_next;
  return {(mu_x - mu_next) / gap, (mu_i - mu_x) / gap};
}

Vector two_dim_representative(const RealVector& d, Index i, double kappa) {
  if (i < 0 || i + 1 >= d.size()) throw PreconditionError("two_dim_representative: index out of range");
  const auto [ci, cn] = two_dim_coordinates(kappa, d(i), d(i + 1));
  Vector x = Vector::Zero(d.size());
  x(i) = std::sqrt(ci);
  x(i + 1) = std::sqrt(cn);
  return x;
}

double temple_bound(double kappa, double mu_i, double mu_next) { return (mu_i - kappa) * (kappa - mu_next); }

double temple_residual(const Vector& x, const RealVector& d) {
  return rayleigh_residual(x, d).squaredNorm() / x.squaredNorm();
}

Vector rayleigh_gradient(const Vector& x, const RealVector& d) {
  return 2.0 * rayleigh_residual(x, d) / x.squaredNorm();
}

double gradient_norm(const Vector& x, const RealVector& d) { return rayleigh_gradient(x, d).norm(); }

RealVector absolute_value_reduction(const Vector& x) { return x.cwiseAbs(); }

Vector finite_difference_gradient(const Vector& x, const RealVector& d, double h) {
  if (!(h > 0.0)) throw PreconditionError("finite_difference_gradient: h must be positive");
  Vector g(x.size());
  for (Index k = 0; k < x.size(); ++k) {
    Vector p = x, m = x;
    p(k) += h;
    m(k) -= h;
    const double re = (rayleigh_quotient(p, d) - rayleigh_quotient(m, d)) / (2.0 * h);
    p = x;
    m = x;
    p(k) += Complex(0.0, h);
    m(k) -= Complex(0.0, h);
    const double im = (rayleigh_quotient(p, d) - rayleigh_quotient(m, d)) / (2.0 * h);
    g(k) = Complex(re, im);
  }
  return g;
}

Vector sample_level_set(const RealVector& d, Index i, double kappa, double noise, Rng& rng, bool complex) {
  if (i < 0 || i + 1 >= d.size()) throw PreconditionError("sample_level_set: index out of range");
  if (!(d(i + 1) < kappa && kappa < d(i))) throw PreconditionError("sample_level_set: kappa outside (d_{i+1}, d_i)");
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> turn(0.0, 2.0 * M_PI);
  auto unit_phase = [&] { return complex ? std::polar(1.0, turn(rng)) : Complex(normal(rng) < 0.0 ? -1.0 : 1.0); };

  Vector x = Vector::Zero(d.size());
  double tail = 0.0;  // sum over the other components of (d_k - kappa) |c_k|^2
  for (Index k = 0; k < d.size(); ++k) {
    if (k == i || k == i + 1) continue;
    x(k) = noise * Complex(normal(rng), complex ? normal(rng) : 0.0);
    tail += (d(k) - kappa) * std::norm(x(k));
  }
  const double up = d(i) - kappa;
  const double down = kappa - d(i + 1);
  const double weight_i = down / (up + down) + std::max(0.0, -tail / up);
  const double weight_next = (up * weight_i + tail) / down;
  x(i) = std::sqrt(weight_i) * unit_phase();
  x(i + 1) = std::sqrt(std::max(0.0, weight_next)) * unit_phase();
  return x.normalized();
}

Vector sample_cone_boundary(const Vector& axis, double angle, Rng& rng, bool complex) {
  const Vector a = axis.normalized();
  std::normal_distribution<double> normal;
  Vector u(axis.size());
  do {
    for (Index k = 0; k < u.size(); ++k) u(k) = Complex(normal(rng), complex ? normal(rng) : 0.0);
    u -= a * a.dot(u);
  } while (!(u.norm() > 1e-8));
  u.normalize();
  return std::cos(angle) * a + std::sin(angle) * u;
}

}  // namespace pgeig
