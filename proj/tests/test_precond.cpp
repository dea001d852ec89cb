#include <doctest.h>

#include "pgeig/iteration.hpp"
#include "pgeig/linalg.hpp"
#include "pgeig/precond.hpp"
#include "pgeig/problem.hpp"
#include "pgeig/theory.hpp"

using namespace pgeig;

namespace {

Matrix diag(std::initializer_list<double> v) {
  RealVector d(static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) d(k++) = x;
  return d.cast<Complex>().asDiagonal();
}

}  // namespace

TEST_CASE("measure_gamma examples") {
  Rng rng(1);
  RandomProblemOptions opts;
  opts.random_a = true;
  const std::vector<double> spec{3, 2, 1};
  const Matrix a = random_problem(3, spec, 4, opts).pencil.a();
  CHECK(measure_gamma(a.inverse(), a).gamma <= 1e-12);

  const auto g = measure_gamma(diag({0.6, 1.2}), Matrix::Identity(2, 2));
  CHECK(g.gamma == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(g.admissible);

  const Vector u = random_unit_vector(5, rng, false);
  const Vector v = random_unit_vector(5, rng, false);
  const Matrix h = householder_mapping(u, v);
  CHECK(std::abs(measure_gamma(Matrix::Identity(5, 5) - 0.5 * h, Matrix::Identity(5, 5)).gamma - 0.5) <= 1e-12);

  CHECK_FALSE(measure_gamma(diag({2.5, 1.0}), Matrix::Identity(2, 2)).admissible);
}

TEST_CASE("measure_gamma of I - gamma H equals gamma for every Householder H") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + trial % 9;
    const Vector u = random_unit_vector(n, rng, false);
    const Vector v = random_unit_vector(n, rng, false);
    const double g = 0.05 + 0.9 * (trial % 10) / 10.0;
    const Matrix t = Matrix::Identity(n, n) - g * householder_mapping(u, v);
    CHECK(std::abs(measure_gamma(t, Matrix::Identity(n, n)).gamma - g) <= 1e-12);
  }
}

TEST_CASE("measure_gamma rejects structural problems") {
  CHECK_THROWS_AS(measure_gamma(diag({1, 1}), diag({1, 1, 1})), StructuralError);
  CHECK_THROWS_AS(measure_gamma(diag({1, -1}), diag({1, 1})), NotPositiveDefinite);
}

TEST_CASE("random_admissible contract") {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 2 + trial % 11;
    const double g = std::array{0.1, 0.5, 0.9}[trial % 3];
    const Preconditioner p = random_admissible(n, g, rng, trial % 2 == 1);
    CHECK(p.gamma_measured <= g + 1e-12);
    CHECK(std::abs(p.gamma_measured - spectral_norm((Matrix::Identity(n, n) - p.t).eval())) <= 1e-10);
    CHECK(eig_hermitian(p.t).values(n - 1) > 0.0);
    CHECK(p.tag == PreconditionerTag::random);
  }
}

TEST_CASE("random_admissible seeded dim 6, gamma 0.9") {
  const Preconditioner p = random_admissible(6, 0.9, std::uint64_t{42});
  const auto e = eig_hermitian(p.t);
  CHECK(e.values.maxCoeff() <= 1.9);
  CHECK(e.values.minCoeff() >= 0.1);
  const Preconditioner again = random_admissible(6, 0.9, std::uint64_t{42});
  CHECK((again.t - p.t).norm() == 0.0);
}

TEST_CASE("random_admissible near gamma zero is the identity") {
  const Preconditioner p = random_admissible(4, 1e-14, std::uint64_t{1});
  CHECK((p.t - Matrix::Identity(4, 4)).norm() <= 1e-13);
  const Preconditioner zero = random_admissible(4, 0.0, std::uint64_t{1});
  CHECK((zero.t - Matrix::Identity(4, 4)).norm() == 0.0);
  CHECK_THROWS_AS(random_admissible(4, 1.0, std::uint64_t{1}), PreconditionError);
}

TEST_CASE("worst_case on B=diag(2,1), mu(x)=1.5, gamma=0.5") {
  const RealVector d(Eigen::Vector2d(2, 1));
  const Vector x = two_dim_representative(d, 0, 1.5);
  const Preconditioner p = worst_case(x, d, 0.5);
  CHECK(p.tag == PreconditionerTag::worst_case);
  CHECK(std::abs(p.gamma_measured - 0.5) <= 1e-12);
  CHECK(p.t.imag().isZero(0.0));

  const Vector next = simplified_step(x, p.t, d);
  const MinimizerResult m = cone_minimizer(x, d, 0.5);
  CHECK(angle_between(next, m.w) <= 1e-10);
  CHECK(next.dot(m.w).real() > 0.0);
  const RealVector w = next.cwiseAbs2() / next.squaredNorm();
  const double ratio = tail_ratio(w, d, 2.0, 1.0) / 1.0;
  CHECK(ratio == doctest::Approx(0.5149218896448998).epsilon(1e-9));
}

TEST_CASE("worst_case in three dimensions stays in the span") {
  const RealVector d(Eigen::Vector3d(2, 1, 0.5));
  const Vector x = two_dim_representative(d, 0, 1.5);
  const Preconditioner p = worst_case(x, d, 0.5);
  const Vector next = simplified_step(x, p.t, d);
  CHECK(std::abs(next(2)) <= 1e-12 * next.norm());
}

TEST_CASE("worst_case lands on the cone boundary for generic x") {
  Rng rng(5);
  const RealVector d(Eigen::Vector4d(5, 3, 2, 0.5));
  for (int trial = 0; trial < 100; ++trial) {
    const double g = 0.1 + 0.8 * (trial % 5) / 4.0;
    const Vector x = absolute_value_reduction(sample_level_set(d, 1, 2.5, 0.4, rng, false)).cast<Complex>();
    const Preconditioner p = worst_case(x, d, g);
    CHECK(std::abs(p.gamma_measured - g) <= 1e-12);
    const Vector next = simplified_step(x, p.t, d);
    const ConeSpec c = cone_angle(x, d, g);
    CHECK(std::abs(angle_between(next, c.axis) - c.opening_angle) <= 1e-10);
    CHECK(angle_between(next, cone_minimizer(x, d, g).w) <= 1e-9);
  }
}

TEST_CASE("worst_case uses |x| for complex input and gives a real T") {
  Rng rng(6);
  const RealVector d(Eigen::Vector3d(3, 2, 1));
  const Vector x = sample_level_set(d, 0, 2.5, 0.3, rng, true);
  const Preconditioner p = worst_case(x, d, 0.5);
  CHECK(p.t.imag().isZero(0.0));
  const Preconditioner q = worst_case(absolute_value_reduction(x).cast<Complex>(), d, 0.5);
  CHECK((p.t - q.t).norm() <= 1e-14);
}

TEST_CASE("worst_case errors") {
  const RealVector d(Eigen::Vector2d(2, 1));
  CHECK_THROWS_AS(worst_case(Eigen::Vector2cd(1, 0), d, 0.5), DegenerateInput);
  CHECK_THROWS_AS(worst_case(Eigen::Vector2cd(1, 1), d, 0.0), PreconditionError);
  const Preconditioner tiny = worst_case(Eigen::Vector2cd(1, 1), d, 1e-8);
  CHECK((tiny.t - Matrix::Identity(2, 2)).norm() <= 1e-7);
}

TEST_CASE("lift_to_pencil preserves gamma") {
  RandomProblemOptions opts;
  opts.complex = true;
  opts.random_a = true;
  const std::vector<double> spec{4, 3, 1, 0.5};
  const auto gp = random_problem(4, spec, 8, opts);
  const Preconditioner n = random_admissible(4, 0.7, std::uint64_t{3}, true);
  const Preconditioner p = lift_to_pencil(n, gp.spectrum.eigenvectors);
  CHECK(std::abs(measure_gamma(p.t, gp.pencil.a()).gamma - n.gamma_measured) <= 1e-10);
  const Preconditioner ideal = lift_to_pencil(identity_preconditioner(4), gp.spectrum.eigenvectors);
  CHECK((ideal.t * gp.pencil.a() - Matrix::Identity(4, 4)).norm() <= 1e-10);
}

TEST_CASE("user_preconditioner validation") {
  const Preconditioner p = user_preconditioner(diag({0.6, 1.2}), Matrix::Identity(2, 2));
  CHECK(p.tag == PreconditionerTag::user);
  CHECK(p.gamma_measured == doctest::Approx(0.4));
  CHECK_THROWS_AS(user_preconditioner(diag({3.0, 1.0}), Matrix::Identity(2, 2)), PreconditionError);
  Matrix nh = diag({1, 1});
  nh(0, 1) = 0.5;
  CHECK_THROWS_AS(user_preconditioner(nh, Matrix::Identity(2, 2)), StructuralError);
}

TEST_CASE("tags print") {
  CHECK(to_string(PreconditionerTag::identity) == "identity");
  CHECK(to_string(PreconditionerTag::random) == "random");
  CHECK(to_string(PreconditionerTag::worst_case) == "worst-case");
  CHECK(to_string(PreconditionerTag::user) == "user");
}
