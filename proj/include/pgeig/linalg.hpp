#pragma once

// Dense Hermitian kernels, templated on the Eigen expression type.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pgeig/types.hpp"

namespace pgeig {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Hybrid tolerance tol * max(1, scale) used by every check in the library.
inline double hybrid_tol(double tol, double scale) { return tol * std::max(1.0, scale); }

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  return defect <= hybrid_tol(tol, m.cwiseAbs().maxCoeff());
}

template <typename Scalar>
struct HermitianEigen {
  RealVector values;               // decreasing
  DenseMatrix<Scalar> vectors;     // orthonormal columns, vectors.col(k) <-> values(k)
  int sweeps = 0;
};

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot entry with a diagonal
/// unitary, then applies the classical real Jacobi rotation, so the same
/// loop serves real symmetric and complex Hermitian input. Sweeps continue
/// until the off-diagonal Frobenius norm drops below 1e-14 * ||M||_F.
template <typename Derived>
HermitianEigen<typename Derived::Scalar> eig_hermitian(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Eigen::numext::conj;
  if (m.rows() != m.cols() || m.rows() == 0)
    throw StructuralError("eig_hermitian: matrix must be square and non-empty");
  if (!is_hermitian(m)) throw StructuralError("eig_hermitian: matrix is not Hermitian");

  const Index n = m.rows();
  DenseMatrix<Scalar> a = (m + m.adjoint()) * Scalar(0.5);
  DenseMatrix<Scalar> v = DenseMatrix<Scalar>::Identity(n, n);
  const double threshold = 1e-14 * a.norm();
  constexpr int kMaxSweeps = 100;

  auto off_norm = [&] {
    double s = 0.0;
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k)
        if (j != k) s += std::norm(Complex(a(j, k)));
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < kMaxSweeps && off_norm() > threshold; ++sweep) {
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        const Scalar phase = apq / r;
        const double app = Eigen::numext::real(a(p, p));
        const double aqq = Eigen::numext::real(a(q, q));
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // G = diag(1, conj(phase)) * [[c, s], [-s, c]] acting on (p, q).
        const Scalar g00 = Scalar(c), g01 = Scalar(s);
        const Scalar g10 = -s * conj(phase), g11 = c * conj(phase);

        for (Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * g00 + akq * g10;
          a(k, q) = akp * g01 + akq * g11;
        }
        for (Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k), aqk = a(q, k);
          a(p, k) = conj(g00) * apk + conj(g10) * aqk;
          a(q, k) = conj(g01) * apk + conj(g11) * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          const Scalar vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * g00 + vkq * g10;
          v(k, q) = vkp * g01 + vkq * g11;
        }
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);
        a(p, p) = Scalar(Eigen::numext::real(a(p, p)));
        a(q, q) = Scalar(Eigen::numext::real(a(q, q)));
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index j, Index k) {
    return Eigen::numext::real(a(j, j)) > Eigen::numext::real(a(k, k));
  });

  HermitianEigen<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = Eigen::numext::real(a(src, src));
    out.vectors.col(k) = v.col(src);
  }
  out.sweeps = sweep;
  return out;
}

/// Lower-triangular L with M = L L*.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> cholesky(const Eigen::MatrixBase<Derived>& m) {
  using Mat = DenseMatrix<typename Derived::Scalar>;
  if (!is_hermitian(m)) throw StructuralError("cholesky: matrix is not Hermitian");
  Eigen::LLT<Mat> llt(m.derived());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("cholesky: matrix is not positive definite");
  return Mat(llt.matrixL());
}

/// Hermitian unitary reflection H = I - 2 w w* / (w* w) with H u = v.
///
/// Requires ||u|| = ||v|| > 0 and a real inner product (u, v); a Hermitian
/// unitary cannot map u to v otherwise. When u and v coincide the reflection
/// is taken about a direction orthogonal to u built from the first
/// coordinate axis not parallel to u.
template <typename DerivedU, typename DerivedV>
DenseMatrix<typename DerivedU::Scalar> householder_mapping(const Eigen::MatrixBase<DerivedU>& u,
                                                           const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedU::Scalar;
  using Mat = DenseMatrix<Scalar>;
  using Vec = DenseVector<Scalar>;
  if (u.size() != v.size() || u.size() == 0)
    throw StructuralError("householder_mapping: dimension mismatch");
  const Index n = u.size();
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0)) throw PreconditionError("householder_mapping: zero vector");
  if (std::abs(nu - nv) > hybrid_tol(1e-12, nu))
    throw PreconditionError("householder_mapping: vectors must have equal norms");
  const Complex uv = Complex(u.dot(v));
  if (std::abs(uv.imag()) > hybrid_tol(1e-12, nu * nv))
    throw PreconditionError("householder_mapping: (u, v) must be real for a Hermitian reflection");

  Vec w = u - v;
  if (w.norm() <= hybrid_tol(1e-12, nu)) {
    if (n == 1) return Mat::Identity(1, 1);
    Index axis = 0;
    while (axis < n && std::abs(u(axis)) >= (1.0 - 1e-8) * nu) ++axis;
    Vec e = Vec::Unit(n, axis);
    e -= u * (u.dot(e) / (nu * nu));
    e.normalize();
    return Mat::Identity(n, n) - Scalar(2) * e * e.adjoint();
  }
  return Mat::Identity(n, n) - (Scalar(2) / Scalar(w.squaredNorm())) * w * w.adjoint();
}

/// Largest singular value.
template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  if (is_hermitian(m)) {
    const auto e = eig_hermitian(m);
    return std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
  }
  const auto e = eig_hermitian((m.adjoint() * m).eval());
  return std::sqrt(std::max(0.0, e.values(0)));
}

/// Angle in [0, pi/2] between two nonzero vectors, cos = |(u,v)| / (||u|| ||v||).
/// Evaluated with atan2.
template <typename DerivedU, typename DerivedV>
double angle_between(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v) {
  using Vec = DenseVector<typename DerivedU::Scalar>;
  const double nv = v.norm();
  if (!(u.norm() > 0.0) || !(nv > 0.0)) throw PreconditionError("angle_between: zero vector");
  const Vec vhat = v / nv;
  const auto proj = vhat.dot(u);
  const Vec perp = u - vhat * proj;
  return std::atan2(perp.norm(), std::abs(proj));
}

}  // namespace pgeig
