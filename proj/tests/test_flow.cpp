#include <doctest.h>

#include <sstream>

#include "pgeig/flow.hpp"
#include "pgeig/linalg.hpp"
#include "pgeig/theory.hpp"

using namespace pgeig;

namespace {

double norm_drift(const FlowTrace& t) {
  double drift = 0.0;
  for (const auto& p : t.points) drift = std::max(drift, std::abs(p.norm() - 1.0));
  return drift;
}

Tabulated tabulate(double lo, double hi, int n, double (*f)(double)) {
  Tabulated t;
  for (int k = 0; k < n; ++k) {
    const double x = lo + (hi - lo) * k / (n - 1);
    t.t.push_back(x);
    t.v.push_back(f(x));
  }
  return t;
}

}  // namespace

TEST_CASE("2-D closed form: the flow moves along the unit circle at unit speed") {
  const RealVector d(Eigen::Vector2d(2, 1));
  const Vector y0 = two_dim_representative(d, 0, 1.75);
  const FlowTrace t = integrate_flow(y0, d, 1.25);
  CHECK(std::abs(t.final_time() - M_PI / 6) <= 1e-6);
  CHECK(std::abs(t.arc_length - t.final_time()) <= 1e-8);
  CHECK(std::abs(t.mu_values.back() - 1.25) <= 1e-10);
  CHECK(norm_drift(t) <= 1e-10);
  for (std::size_t k = 1; k < t.mu_values.size(); ++k) CHECK(t.mu_values[k] < t.mu_values[k - 1]);
  CHECK(mu_decrease_defect(t, d) <= 1e-6);
  const ArcCheck arc = angle_vs_arclength(t);
  CHECK(arc.holds);
  CHECK(arc.equality);
}

TEST_CASE("zero-length path") {
  const RealVector d(Eigen::Vector2d(2, 1));
  const Vector y0 = two_dim_representative(d, 0, 1.5);
  const FlowTrace t = integrate_flow(y0, d, 1.5 - 1e-12);
  CHECK(t.final_time() <= 1e-11);
  const ArcCheck arc = angle_vs_arclength(t);
  CHECK(arc.holds);
  CHECK(arc.equality);
  CHECK(mu_decrease_defect(t, d) <= 1e-12);
}

TEST_CASE("span start stays in the invariant subspace") {
  const RealVector d(Eigen::Vector3d(3, 2, 1));
  const Vector y0 = two_dim_representative(d, 0, 2.8);
  const FlowTrace t = integrate_flow(y0, d, 2.2);
  for (const auto& p : t.points) CHECK(std::abs(p(2)) <= 1e-9);
  CHECK(angle_vs_arclength(t).equality);
}

TEST_CASE("random 4-D traces") {
  Rng rng(1);
  const RealVector d(Eigen::Vector4d(4, 3, 2, 1));
  for (int k = 0; k < 5; ++k) {
    const Vector y0 = sample_level_set(d, 1, 2.9, 0.4, rng, false);
    const FlowTrace t = integrate_flow(y0, d, 2.1);
    CHECK(norm_drift(t) <= 1e-10);
    CHECK(mu_decrease_defect(t, d) <= 1e-6);
    CHECK(std::abs(t.mu_values.back() - 2.1) <= 1e-10);
    const ArcCheck arc = angle_vs_arclength(t);
    CHECK(arc.holds);
    CHECK(std::abs(t.arc_length - t.final_time()) <= 1e-8);
  }
}

TEST_CASE("t_bar converges at fourth order under step refinement") {
  Rng rng(2);
  const RealVector d(Eigen::Vector4d(4, 3, 2, 1));
  const Vector y0 = sample_level_set(d, 1, 2.9, 0.6, rng, false);
  const double t1 = integrate_flow(y0, d, 2.1, 1e-2).final_time();
  const double t2 = integrate_flow(y0, d, 2.1, 5e-3).final_time();
  const double t3 = integrate_flow(y0, d, 2.1, 2.5e-3).final_time();
  const double e1 = std::abs(t1 - t2);
  const double e2 = std::abs(t2 - t3);
  CHECK(e2 <= e1);
  CHECK((e2 <= e1 / 8.0 || e2 <= 1e-13));
}

TEST_CASE("integrate_flow errors") {
  const RealVector d(Eigen::Vector3d(3, 2, 1));
  CHECK_THROWS_AS(integrate_flow(Eigen::Vector3cd(0, 1, 0), d, 1.5), DegenerateInput);
  const Vector y0 = two_dim_representative(d, 0, 2.5);
  CHECK_THROWS_AS(integrate_flow(y0, d, 1.5), PreconditionError);
  CHECK_THROWS_AS(integrate_flow(y0, d, 2.7), PreconditionError);
  CHECK_THROWS_AS(integrate_flow(Eigen::Vector2cd(1, 1), d, 2.2), StructuralError);
}

TEST_CASE("flow CSV layout") {
  const RealVector d(Eigen::Vector3d(3, 2, 1));
  const FlowTrace t = integrate_flow(two_dim_representative(d, 0, 2.5), d, 2.4);
  std::ostringstream out;
  write_flow_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,mu,abs_y1,abs_y2,abs_y3,arc_length");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == t.times.size());
}

TEST_CASE("lemma: identical functions give equality") {
  const Tabulated f = tabulate(0, 1, 101, [](double x) { return x * x + x; });
  const LemmaCheck c = inverse_function_lemma_check(f, f, 1.0);
  CHECK(c.hypothesis_holds);
  CHECK(c.conclusion_holds);
}

TEST_CASE("lemma: steeper f violates the hypothesis") {
  const Tabulated f = tabulate(0, 1, 101, [](double x) { return x; });
  const Tabulated g = tabulate(0, 2, 101, [](double x) { return x / 2; });
  const LemmaCheck c = inverse_function_lemma_check(f, g, 1.0);
  CHECK_FALSE(c.hypothesis_holds);
}

TEST_CASE("lemma: flatter f satisfies hypothesis and conclusion") {
  const Tabulated f = tabulate(0, 2, 101, [](double x) { return x / 2; });
  const Tabulated g = tabulate(0, 1, 101, [](double x) { return x; });
  const LemmaCheck c = inverse_function_lemma_check(f, g, 2.0);
  CHECK(c.hypothesis_holds);
  CHECK(c.conclusion_holds);
  CHECK_FALSE(c.first_violation.has_value());
}

TEST_CASE("lemma: input validation") {
  Tabulated bad;
  bad.t = {0, 1, 1};
  bad.v = {0, 1, 2};
  const Tabulated g = tabulate(0, 1, 11, [](double x) { return x; });
  CHECK_THROWS_AS(inverse_function_lemma_check(bad, g, 1.0), PreconditionError);
  const Tabulated f = tabulate(0, 1, 11, [](double x) { return 2 * x; });
  CHECK_THROWS_AS(inverse_function_lemma_check(f, g, 1.0), PreconditionError);
}

TEST_CASE("Tabulated interpolation and derivative") {
  const Tabulated f = tabulate(0, 1, 201, [](double x) { return x * x * x + x; });
  CHECK(f(0.5) == doctest::Approx(0.625).epsilon(1e-4));
  CHECK(f.inverse(0.625) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(f.derivative(0.5) == doctest::Approx(1.75).epsilon(1e-4));
}
