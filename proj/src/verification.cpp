#include "pgeig/verification.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "pgeig/flow.hpp"
#include "pgeig/iteration.hpp"
#include "pgeig/linalg.hpp"
#include "pgeig/precond.hpp"
#include "pgeig/problem.hpp"
#include "pgeig/theory.hpp"

namespace pgeig {

void PropertyResult::record(double margin, std::uint64_t seed) {
  ++checks;
  worst_margin = std::min(worst_margin, margin);
  if (!(margin >= 0.0)) {
    ++failures;
    if (failing_seeds.size() < 16 && (failing_seeds.empty() || failing_seeds.back() != seed))
      failing_seeds.push_back(seed);
  }
}

bool VerificationSummary::overall_pass() const {
  return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.pass(); });
}

const PropertyResult* VerificationSummary::find(const std::string& name) const {
  for (const auto& p : properties)
    if (p.name == name) return &p;
  return nullptr;
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t suite, std::uint64_t trial) {
  // splitmix64 finalizer over a packed key
  std::uint64_t z = base * 0x9E3779B97F4A7C15ull + (suite << 40) + trial;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

enum Suite : std::uint64_t { kIteration = 1, kCone, kPrecond, kWorstCase, kTheory, kFlow };

class Suites {
 public:
  explicit Suites(const VerificationOptions& o) : o_(o) {}

  VerificationSummary run() {
    for (bool complex : {false, true}) iteration(complex);
    for (bool complex : {false, true}) cone(complex);
    precond();
    worst_case();
    theory();
    flow();
    VerificationSummary out;
    out.properties.assign(props_.begin(), props_.end());
    return out;
  }

 private:
  PropertyResult& prop(const std::string& name) {
    for (auto& p : props_)
      if (p.name == name) return p;
    props_.push_back({});
    props_.back().name = name;
    return props_.back();
  }

  // A trial that throws is recorded as a failure of "<suite>.trial_errors".
  template <class F>
  void guarded(const std::string& suite, std::uint64_t seed, F&& body) {
    auto& errors = prop(suite + ".trial_errors");
    try {
      body();
      errors.record(0.0, seed);
    } catch (const Error&) {
      errors.record(-1.0, seed);
    }
  }

  Index dim(Rng& rng, Index cap = 1000) const {
    const Index hi = std::max(o_.dim_min, std::min(o_.dim_max, cap));
    return std::uniform_int_distribution<Index>(std::min(o_.dim_min, hi), hi)(rng);
  }

  double gamma(int trial) const { return o_.gammas[static_cast<std::size_t>(trial) % o_.gammas.size()]; }

  double sigma_sq(double sigma) const {
    const double s = o_.inject_bug ? 0.9 * sigma : sigma;
    return s * s;
  }

  static std::vector<double> spectrum(Index n, Rng& rng, bool positive) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double offset = positive ? 0.2 + u(rng) : -2.0 + 4.0 * u(rng);
    const double scale = 1.0 + 9.0 * u(rng);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = offset + scale * u(rng);
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
  }

  static RealVector diagonal(Index n, Rng& rng) {
    const auto v = spectrum(n, rng, true);
    return Eigen::Map<const RealVector>(v.data(), n);
  }

  // Index i and level kappa strictly inside (d_{i+1}, d_i), away from both ends.
  static std::pair<Index, double> level(const RealVector& d, Rng& rng, double lo = 0.01, double hi = 0.99) {
    const Index i = std::uniform_int_distribution<Index>(0, d.size() - 2)(rng);
    const double t = std::uniform_real_distribution<double>(lo, hi)(rng);
    return {i, d(i + 1) + t * (d(i) - d(i + 1))};
  }

  static bool well_separated(const RealVector& d) {
    for (Index k = 0; k + 1 < d.size(); ++k)
      if (d(k) - d(k + 1) < 1e-3 * d(0)) return false;
    return true;
  }

  void iteration(bool complex) {
    const std::string tag = complex ? "hermitian." : "iteration.";
    auto& bound = prop(tag + "bound_validity");
    auto& monotone = prop(tag + "monotonicity");
    for (int t = 0; t < o_.trials; ++t) {
      const auto seed = trial_seed(o_.seed, kIteration + (complex ? 100 : 0), static_cast<std::uint64_t>(t));
      guarded("iteration", seed, [&] {
        Rng rng(seed);
        const Index n = dim(rng);
        const double g = gamma(t);
        RandomProblemOptions po;
        po.complex = complex;
        po.random_a = t % 3 == 2;
        const auto spec = spectrum(n, rng, false);
        const auto problem = random_problem(n, spec, rng(), po);
        const Vector x0 = random_unit_vector(n, rng, complex);
        const Matrix& transform = problem.spectrum.eigenvectors;
        auto factory = [&](const IterateState&, int) {
          return lift_to_pencil(random_admissible(n, g, rng, complex), transform);
        };
        StopCriteria stop;
        stop.max_iters = o_.steps_per_trial;
        const auto trace = pgeig::run(problem.pencil, problem.spectrum, factory, x0, stop);
        double prev = trace.initial.mu;
        for (const auto& step : trace.steps) {
          const auto& r = step.report;
          if (r.trivial_reason == TrivialReason::none)
            bound.record(sigma_sq(r.sigma) + 1e-10 - r.observed_factor, seed);
          monotone.record(step.state.mu - prev + hybrid_tol(1e-12, std::abs(prev)), seed);
          prev = step.state.mu;
        }
      });
    }
  }

  void cone(bool complex) {
    const std::string tag = complex ? "hermitian." : "iteration.";
    auto& membership = prop(tag + "cone_membership");
    auto& dominance = prop(tag + "minimizer_dominance");
    for (int t = 0; t < o_.trials; ++t) {
      const auto seed = trial_seed(o_.seed, kCone + (complex ? 100 : 0), static_cast<std::uint64_t>(t));
      guarded("cone", seed, [&] {
        Rng rng(seed);
        const Index n = dim(rng);
        const RealVector d = diagonal(n, rng);
        const Matrix u = random_unitary(n, rng, complex);
        const auto pencil = HermitianPencil::standard(u * d.cast<Complex>().asDiagonal() * u.adjoint());
        const Preconditioner p = random_admissible(n, gamma(t), rng, complex);
        const Vector x = random_unit_vector(n, rng, complex);
        const Vector next = gradient_step(x, p.t, pencil, 0.0);
        const ConeSpec c = cone_angle(x, pencil.b(), p.gamma_measured);
        membership.record(c.opening_angle + 1e-10 - angle_between(next, c.axis), seed);
        const MinimizerResult m = cone_minimizer(u.adjoint() * x, d, p.gamma_measured);
        dominance.record(rayleigh_quotient(next, pencil) - m.mu_w + 1e-10, seed);
      });
    }
  }

  void precond() {
    auto& admissible = prop("precond.random_admissible");
    auto& definite = prop("precond.positive_definite");
    for (int t = 0; t < o_.trials; ++t) {
      const auto seed = trial_seed(o_.seed, kPrecond, static_cast<std::uint64_t>(t));
      guarded("precond", seed, [&] {
        Rng rng(seed);
        const Index n = dim(rng);
        const double g = gamma(t);
        const Preconditioner p = random_admissible(n, g, rng, t % 2 == 1);
        admissible.record(g + 1e-12 - p.gamma_measured, seed);
        const auto e = eig_hermitian(p.t);
        definite.record(e.values(n - 1) > 0.0 ? e.values(n - 1) : -1.0, seed);
      });
    }
  }

  void worst_case() {
    auto& boundary = prop("precond.worst_case_boundary");
    auto& exact_gamma = prop("precond.worst_case_gamma");
    auto& bound = prop("iteration.worst_case_bound");
    auto& sharp = prop("theory.sharpness_identity");
    for (int t = 0; t < o_.trials; ++t) {
      const auto seed = trial_seed(o_.seed, kWorstCase, static_cast<std::uint64_t>(t));
      guarded("worst_case", seed, [&] {
        Rng rng(seed);
        const Index n = dim(rng);
        const RealVector d = diagonal(n, rng);
        if (!well_separated(d)) return;
        const double g = gamma(t);
        if (g <= 0.0) return;
        const auto [i, kappa] = level(d, rng);
        const bool in_span = t % 2 == 0;
        const Vector x = in_span ? two_dim_representative(d, i, kappa)
                                   : Vector(absolute_value_reduction(sample_level_set(d, i, kappa, 0.3, rng, false)).cast<Complex>());

        const Preconditioner p = pgeig::worst_case(x, d, g);
        exact_gamma.record(1e-12 - std::abs(p.gamma_measured - g), seed);
        const Vector next = simplified_step(x, p.t, d);
        const ConeSpec c = cone_angle(x, d, g);
        boundary.record(1e-10 - std::abs(angle_between(next, c.axis) - c.opening_angle), seed);
        if (!in_span) return;

        const RealVector weights = next.cwiseAbs2() / next.squaredNorm();
        const double mu_next = rayleigh_quotient(next, d);
        if (mu_next >= d(i)) return;
        const double before = (d(i) - kappa) / (kappa - d(i + 1));
        const double observed = tail_ratio(weights, d, d(i), d(i + 1)) / before;
        bound.record(sigma_sq(sigma_factor_normalized(d(i), d(i + 1), g)) + 1e-10 - observed, seed);
        const double s = sigma_of_alpha(alpha_quadratic(kappa, d(i), d(i + 1), g).alpha_plus, d(i), d(i + 1));
        sharp.record(1e-9 - std::abs(observed - s * s), seed);
      });
    }
  }

  void theory() {
    auto& optimal = prop("theory.minimizer_optimality");
    auto& residual = prop("theory.minimizer_residual");
    auto& sandwich = prop("theory.minimizer_sandwich");
    auto& closure = prop("theory.subspace_closure");
    auto& routes = prop("theory.alpha_routes");
    auto& temple_eq = prop("theory.temple_equality");
    auto& temple_strict = prop("theory.temple_strict");
    auto& level_min = prop("theory.level_set_gradient_minimum");
    auto& reduction = prop("theory.minimizer_reduction");
    auto& absval = prop("theory.absolute_value_reduction");
    auto& contraction = prop("theory.angle_contraction");
    auto& fd = prop("theory.gradient_finite_difference");
    const int trials = std::max(1, o_.trials / 20);
    constexpr int kBoundarySamples = 10000;
    constexpr int kLevelSamples = 50;
    for (int t = 0; t < trials; ++t) {
      const auto seed = trial_seed(o_.seed, kTheory, static_cast<std::uint64_t>(t));
      guarded("theory", seed, [&] {
        Rng rng(seed);
        const bool complex = t % 2 == 1;
        const Index n = dim(rng, 6);
        const RealVector d = diagonal(n, rng);
        if (!well_separated(d)) return;
        const double g = gamma(t);
        if (g <= 0.0) return;
        const auto [i, kappa] = level(d, rng);
        const Vector x = sample_level_set(d, i, kappa, 0.5, rng, complex);

        const MinimizerResult m = cone_minimizer(x, d, g);
        const ConeSpec c = cone_angle(x, d, g);
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < kBoundarySamples; ++k)
          best = std::min(best, rayleigh_quotient(sample_cone_boundary(c.axis, c.opening_angle, rng, complex), d));
        optimal.record(best - m.mu_w + 1e-8, seed);
        const Vector shifted = (d.array() + m.alpha).matrix().cast<Complex>().cwiseProduct(m.w);
        const Vector axis = c.axis.normalized();
        const double off_axis = (shifted - axis * axis.dot(shifted)).norm() / shifted.norm();
        residual.record(1e-10 - std::max(off_axis, std::abs(angle_between(m.w, c.axis) - c.opening_angle)), seed);
        sandwich.record(m.mu_w - kappa, seed);

        const Vector rep = two_dim_representative(d, i, kappa);
        const MinimizerResult ms = cone_minimizer(rep, d, g);
        double outside = 0.0;
        for (Index k = 0; k < n; ++k)
          if (k != i && k != i + 1) outside = std::max(outside, std::abs(ms.w(k)));
        closure.record(1e-11 - outside, seed);
        const double ap = alpha_quadratic(kappa, d(i), d(i + 1), g).alpha_plus;
        routes.record(hybrid_tol(1e-9, ap) - std::abs(ms.alpha - ap), seed);

        const double tb = temple_bound(kappa, d(i), d(i + 1));
        temple_eq.record(hybrid_tol(1e-12, d(0) * d(0)) - std::abs(temple_residual(rep, d) - tb), seed);
        const double rep_grad = gradient_norm(rep, d) * rep.norm();
        for (int k = 0; k < kLevelSamples; ++k) {
          const Vector y = sample_level_set(d, i, kappa, 0.05 + k * 0.02, rng, complex);
          if (n >= 3) temple_strict.record(temple_residual(y, d) - tb > 0.0 ? temple_residual(y, d) - tb : -1.0, seed);
          level_min.record(gradient_norm(y, d) * y.norm() - rep_grad + 1e-9, seed);
          reduction.record(cone_minimizer(y, d, g).mu_w - ms.mu_w + 1e-9, seed);
        }

        const Vector ax = absolute_value_reduction(x).cast<Complex>();
        const double mu_defect = std::abs(rayleigh_quotient(ax, d) - kappa);
        const double phi_defect = std::abs(cone_angle(ax, d, g).opening_angle - c.opening_angle);
        absval.record(1e-12 - std::max(mu_defect, phi_defect), seed);
        for (int k = 0; k < 20; ++k) {
          const Vector y = random_unit_vector(n, rng, complex);
          const Vector ay = absolute_value_reduction(y).cast<Complex>();
          contraction.record(angle_between(y, c.axis) - angle_between(ay, apply_diagonal(d, ax)) + 1e-12, seed);
        }

        const Vector exact = rayleigh_gradient(x, d);
        const Vector approx = finite_difference_gradient(x, d, 1e-5);
        fd.record(1e-7 - (exact - approx).norm() / std::max(1.0, exact.norm()), seed);
      });
    }
  }

  void flow() {
    auto& norm = prop("flow.norm_conservation");
    auto& decreasing = prop("flow.strictly_decreasing");
    auto& endpoint = prop("flow.endpoint");
    auto& identity = prop("flow.mu_decrease_identity");
    auto& arc = prop("flow.angle_vs_arclength");
    auto& worst = prop("flow.worst_path_comparison");
    const int trials = std::max(1, o_.trials / 100);
    for (int t = 0; t < trials; ++t) {
      const auto seed = trial_seed(o_.seed, kFlow, static_cast<std::uint64_t>(t));
      guarded("flow", seed, [&] {
        Rng rng(seed);
        const Index n = dim(rng, 6);
        const RealVector d = diagonal(n, rng);
        if (!well_separated(d)) return;
        const double g = gamma(t);
        const auto [i, kappa] = level(d, rng, 0.2, 0.8);
        const Vector x = sample_level_set(d, i, kappa, 0.5, rng, false);
        const Vector rep = two_dim_representative(d, i, kappa);

        const MinimizerResult m = cone_minimizer(x, d, g);
        const MinimizerResult ms = cone_minimizer(rep, d, g);
        // A minimizer above mu_i leaves the interval; there is no path to compare.
        if (m.mu_w >= d(i) || ms.mu_w >= d(i)) return;
        const FlowTrace tr = integrate_flow(m.w, d, kappa);
        const FlowTrace tr_star = integrate_flow(ms.w, d, kappa);
        for (const FlowTrace* f : {&tr, &tr_star}) {
          double drift = 0.0, step = std::numeric_limits<double>::infinity();
          for (std::size_t k = 0; k < f->points.size(); ++k) {
            drift = std::max(drift, std::abs(f->points[k].norm() - 1.0));
            if (k > 0) step = std::min(step, f->mu_values[k - 1] - f->mu_values[k]);
          }
          norm.record(1e-10 - drift, seed);
          decreasing.record(step > 0.0 ? step : -1.0, seed);
          endpoint.record(1e-10 - std::abs(f->mu_values.back() - kappa), seed);
          identity.record(1e-6 - mu_decrease_defect(*f, d), seed);
          const ArcCheck a = angle_vs_arclength(*f);
          arc.record(a.arc_length + 1e-8 - a.angle, seed);
        }
        worst.record(tr.final_time() - tr_star.final_time() + 1e-8, seed);
      });
    }
  }

  const VerificationOptions& o_;
  std::deque<PropertyResult> props_;
};

}  // namespace

VerificationSummary run_verification(const VerificationOptions& options) {
  if (options.trials < 1) throw PreconditionError("verification: trials must be at least 1");
  if (options.dim_min < 2 || options.dim_max < options.dim_min) throw PreconditionError("verification: bad dimension range");
  if (options.gammas.empty()) throw PreconditionError("verification: no gamma values");
  for (double g : options.gammas)
    if (!(g >= 0.0 && g < 1.0)) throw PreconditionError("verification: gamma values must lie in [0, 1)");
  return Suites(options).run();
}

}  // namespace pgeig
