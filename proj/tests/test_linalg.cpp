#include <doctest.h>

#include <cfloat>

#include <Eigen/Eigenvalues>

#include "pgeig/linalg.hpp"
#include "pgeig/problem.hpp"

using namespace pgeig;

namespace {

Matrix random_hermitian(Index n, Rng& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k) m(j, k) = Complex(g(rng), g(rng));
  return (m + m.adjoint()) * 0.5;
}

Matrix random_spd(Index n, Rng& rng) {
  const Matrix m = random_hermitian(n, rng);
  return m * m.adjoint() + Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("eig_hermitian on diagonal input returns the axes") {
  const RealMatrix m = Eigen::Vector2d(1.0, 2.0).asDiagonal();
  const auto e = eig_hermitian(m);
  CHECK(e.values(0) == doctest::Approx(2.0));
  CHECK(e.values(1) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("eig_hermitian on the swap matrix") {
  RealMatrix m(2, 2);
  m << 0, 1, 1, 0;
  const auto e = eig_hermitian(m);
  CHECK(e.values(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.values(1) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("eig_hermitian rejects non-Hermitian input") {
  RealMatrix m(2, 2);
  m << 0, 1, 2, 0;
  CHECK_THROWS_AS(eig_hermitian(m), StructuralError);
  CHECK_THROWS_AS(eig_hermitian(RealMatrix(2, 3)), StructuralError);
}

TEST_CASE("eig_hermitian reconstructs random 8x8 Hermitian matrices") {
  Rng rng(7);
  const Matrix m = random_hermitian(8, rng);
  const auto e = eig_hermitian(m);
  const Matrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  CHECK((back - m).norm() <= 1e-11 * m.norm());
}

TEST_CASE("eig_hermitian agrees with Eigen's self-adjoint solver up to dimension 20") {
  Rng rng(11);
  for (Index n = 1; n <= 20; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const Matrix m = random_hermitian(n, rng);
      const auto e = eig_hermitian(m);
      Eigen::SelfAdjointEigenSolver<Matrix> oracle(m);
      const RealVector ref = oracle.eigenvalues().reverse();
      const double scale = m.norm();
      CHECK((e.values - ref).cwiseAbs().maxCoeff() <= 1e-11 * scale);
      const Matrix resid = m * e.vectors - e.vectors * e.values.cast<Complex>().asDiagonal();
      CHECK(resid.norm() <= 1e-11 * scale);
      CHECK((e.vectors.adjoint() * e.vectors - Matrix::Identity(n, n)).norm() <= 1e-11);
      for (Index k = 1; k < n; ++k) CHECK(e.values(k) <= e.values(k - 1));
    }
  }
}

TEST_CASE("eig_hermitian handles real matrices with repeated eigenvalues") {
  Rng rng(3);
  const Matrix u = random_unitary(5, rng, false);
  const RealVector d = (RealVector(5) << 3, 3, 1, 1, -2).finished();
  const RealMatrix m = (u * d.cast<Complex>().asDiagonal() * u.adjoint()).real();
  const auto e = eig_hermitian(m);
  CHECK((e.values - d).cwiseAbs().maxCoeff() <= 1e-12 * 3);
  CHECK((e.vectors.transpose() * e.vectors - RealMatrix::Identity(5, 5)).norm() <= 1e-12);
}

TEST_CASE("cholesky examples") {
  CHECK((cholesky(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() == 0.0);
  const RealMatrix m = Eigen::Vector2d(4.0, 9.0).asDiagonal();
  const RealMatrix l = cholesky(m);
  CHECK(l(0, 0) == doctest::Approx(2.0));
  CHECK(l(1, 1) == doctest::Approx(3.0));
  CHECK(l(1, 0) == 0.0);
}

TEST_CASE("cholesky round trip and failure") {
  Rng rng(5);
  const Matrix m = random_spd(6, rng);
  const Matrix l = cholesky(m);
  CHECK((l * l.adjoint() - m).norm() <= 1e-11 * m.norm());
  CHECK(l.isLowerTriangular(0.0));
  RealMatrix bad(2, 2);
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(cholesky(bad), NotPositiveDefinite);
}

TEST_CASE("cholesky then eig gives the generalized eigenvalues") {
  Rng rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = random_spd(6, rng);
    const Matrix b = random_hermitian(6, rng);
    const Matrix l = cholesky(a);
    const Matrix li = l.inverse();
    const Matrix c = li * b * li.adjoint();
    const auto e = eig_hermitian(((c + c.adjoint()) * 0.5).eval());
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> oracle(b, a);
    const RealVector ref = oracle.eigenvalues().reverse();
    for (Index k = 0; k < 6; ++k) CHECK(std::abs(e.values(k) - ref(k)) <= 1e-10 * std::max(1.0, std::abs(ref(k))));
  }
}

TEST_CASE("householder_mapping examples") {
  const RealVector u = Eigen::Vector2d(1.0, 0.0);
  const RealMatrix fixed = householder_mapping(u, u);
  CHECK((fixed * u - u).norm() <= 1e-15);
  CHECK((fixed * fixed - RealMatrix::Identity(2, 2)).norm() <= 1e-15);
  CHECK(fixed.determinant() == doctest::Approx(-1.0));

  const RealVector v = Eigen::Vector2d(0.0, 1.0);
  const RealMatrix swap = householder_mapping(u, v);
  CHECK((swap * u - v).norm() <= 1e-15);
  CHECK((swap * swap - RealMatrix::Identity(2, 2)).norm() <= 1e-15);
}

TEST_CASE("householder_mapping rejects bad inputs") {
  CHECK_THROWS_AS(householder_mapping(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 2)), PreconditionError);
  CHECK_THROWS_AS(householder_mapping(Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0)), PreconditionError);
  const Vector u = Eigen::Vector2cd(Complex(1, 0), Complex(0, 0));
  const Vector v = Eigen::Vector2cd(Complex(0, 1), Complex(0, 0));
  CHECK_THROWS_AS(householder_mapping(u, v), PreconditionError);
}

TEST_CASE("householder_mapping is an involutive isometry on random inputs") {
  Rng rng(13);
  std::uniform_int_distribution<Index> dims(1, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = dims(rng);
    const bool complex = trial % 2 == 1;
    const Vector u = random_unit_vector(n, rng, complex) * 3.0;
    Vector v = random_unit_vector(n, rng, complex) * 3.0;
    // A Hermitian reflection needs a real (u, v): rotate v's phase.
    const Complex uv = u.dot(v);
    if (std::abs(uv) > 0.0) v *= std::conj(uv) / std::abs(uv);
    const Matrix h = householder_mapping(u, v);
    CHECK((h * u - v).norm() <= 1e-12 * u.norm());
    CHECK((h * h - Matrix::Identity(n, n)).norm() <= 1e-12);
    CHECK((h - h.adjoint()).norm() <= 1e-14);
    CHECK((h.adjoint() * h - Matrix::Identity(n, n)).norm() <= 1e-12);
  }
}

TEST_CASE("householder_mapping keeps accuracy for nearly equal vectors") {
  Rng rng(17);
  for (double eps : {1e-6, 1e-9, 1e-11, 1e-13}) {
    const RealVector u = random_unit_vector(6, rng, false).real().normalized();
    RealVector v = (u + eps * RealVector::Random(6)).normalized();
    const RealMatrix h = householder_mapping(u, v);
    const RealVector w = u - v;
    const double mismatch = std::abs(u.squaredNorm() - v.squaredNorm()) + 4 * DBL_EPSILON;
    CHECK((h * u - v).norm() <= 1e-12 + 2 * mismatch / w.norm());
    if (w.norm() > 1e-12) CHECK((h * w + w).norm() <= 1e-12 * w.norm());
    CHECK((h * h - RealMatrix::Identity(6, 6)).norm() <= 1e-12);
  }
}

TEST_CASE("spectral_norm examples") {
  CHECK(spectral_norm(Matrix::Identity(4, 4)) == doctest::Approx(1.0));
  CHECK(spectral_norm(RealMatrix(Eigen::Vector2d(0.4, -0.2).asDiagonal())) == doctest::Approx(0.4));
  Rng rng(19);
  const Matrix m = random_hermitian(7, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> oracle(m);
  CHECK(std::abs(spectral_norm(m) - oracle.eigenvalues().cwiseAbs().maxCoeff()) <= 1e-12 * m.norm());
  Matrix g = random_hermitian(5, rng);
  g(0, 1) += 1.0;
  Eigen::JacobiSVD<Matrix> svd(g);
  CHECK(spectral_norm(g) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));
}

TEST_CASE("angle_between") {
  CHECK(angle_between(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)) == doctest::Approx(M_PI / 2));
  CHECK(angle_between(Eigen::Vector2d(1, 0), Eigen::Vector2d(-1, 0)) == doctest::Approx(0.0));
  CHECK(angle_between(Eigen::Vector2d(1, 1e-9), Eigen::Vector2d(1, 0)) == doctest::Approx(1e-9).epsilon(1e-12));
  CHECK_THROWS_AS(angle_between(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)), PreconditionError);
}

TEST_CASE("is_hermitian uses a hybrid tolerance") {
  RealMatrix m(2, 2);
  m << 1e6, 1, 1 + 1e-7, 1;
  CHECK(is_hermitian(m));
  m(1, 0) = 1 + 1e-5;
  CHECK_FALSE(is_hermitian(m));
}
