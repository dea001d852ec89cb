#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "pgeig/types.hpp"

namespace pgeig {

/// Sampled path of the normalized gradient flow y' = -grad mu(y) / ||grad mu(y)||
/// on the unit sphere, B = diag(d).
struct FlowTrace {
  std::vector<double> times;
  std::vector<Vector> points;
  std::vector<double> mu_values;
  std::vector<double> cumulative_length;  // arc length up to each sample
  double arc_length = 0.0;
  double target_kappa = 0.0;

  double final_time() const { return times.back(); }
};

/// 1e-3 (mu(y0) - kappa) clamped to [1e-5, 1e-2].
double default_flow_step(double mu_start, double kappa_target);

/// Classical fourth-order Runge-Kutta with renormalization to the unit sphere
/// after every step. The crossing mu(y(t)) = kappa is located by bisection on
/// the length of the final step. dt <= 0 selects default_flow_step.
FlowTrace integrate_flow(const Vector& y0, const RealVector& d, double kappa_target, double dt = 0.0);

/// |(mu(y(0)) - kappa) - integral of ||grad mu(y(t))|| dt|, composite Simpson
/// over the uniform steps and the trapezoidal rule on the final partial step.
double mu_decrease_defect(const FlowTrace& trace, const RealVector& d);

struct ArcCheck {
  double angle = 0.0;       // angle between the end points
  double arc_length = 0.0;
  bool holds = false;       // angle <= arc_length + 1e-8
  bool equality = false;    // |angle - arc_length| <= 1e-6
};

ArcCheck angle_vs_arclength(const FlowTrace& trace);

/// Strictly increasing function tabulated at increasing abscissae, evaluated
/// by linear interpolation.
struct Tabulated {
  std::vector<double> t;
  std::vector<double> v;

  double operator()(double x) const;
  /// Inverse by linear interpolation; the value must lie within range.
  double inverse(double y) const;
  /// Derivative at x from the finite-difference slope of the enclosing interval
  /// pair (central where possible).
  double derivative(double x) const;
  double front() const { return t.front(); }
  double back() const { return t.back(); }
};

struct LemmaCheck {
  bool hypothesis_holds = false;
  bool conclusion_holds = false;
  std::optional<double> first_violation;  // xi at which f(a - xi) < g(b - xi)
};

/// Integration-of-inverse-functions lemma on tabulated data: f on [0, a'] and
/// g on [0, b] strictly increasing with f(a) = g(b). If f'(alpha) <= g'(beta)
/// wherever f(alpha) = g(beta), then f(a - xi) >= g(b - xi) on xi in
/// [0, min(a, b)]. The conclusion is only evaluated when the hypothesis holds.
LemmaCheck inverse_function_lemma_check(const Tabulated& f, const Tabulated& g, double a, int grid = 100);

/// Header: t,mu,abs_y1,...,abs_yn,arc_length (cumulative).
void write_flow_csv(std::ostream& out, const FlowTrace& trace);

}  // namespace pgeig
