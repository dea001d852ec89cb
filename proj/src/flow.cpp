#include "pgeig/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pgeig/csv.hpp"
#include "pgeig/linalg.hpp"
#include "pgeig/theory.hpp"

namespace pgeig {

namespace {

class NormalizedFlow {
 public:
  NormalizedFlow(const RealVector& d) : d_(d), stall_(1e-12 * std::max(1.0, d.cwiseAbs().maxCoeff())) {}

  Vector velocity(const Vector& y) const {
    const Vector g = rayleigh_gradient(y, d_);
    const double n = g.norm();
    if (n < stall_) throw DegenerateInput("integrate_flow: flow stalled near eigenvector");
    return -g / n;
  }

  Vector step(const Vector& y, double h) const {
    const Vector k1 = velocity(y);
    const Vector k2 = velocity(y + 0.5 * h * k1);
    const Vector k3 = velocity(y + 0.5 * h * k2);
    const Vector k4 = velocity(y + h * k3);
    return (y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).normalized();
  }

 private:
  const RealVector& d_;
  double stall_;
};

}  // namespace

double default_flow_step(double mu_start, double kappa_target) {
  return std::clamp(1e-3 * (mu_start - kappa_target), 1e-5, 1e-2);
}

FlowTrace integrate_flow(const Vector& y0, const RealVector& d, double kappa_target, double dt) {
  if (y0.size() != d.size()) throw StructuralError("integrate_flow: dimension mismatch");
  if (!(y0.norm() > 0.0)) throw PreconditionError("integrate_flow: zero start vector");
  Vector y = y0.normalized();
  const double mu0 = rayleigh_quotient(y, d);
  if (is_eigenvector(y, d)) throw DegenerateInput("integrate_flow: stationary point of the flow");
  if (!(kappa_target < mu0)) throw PreconditionError("integrate_flow: target must lie below mu(y0)");
  const double tol = hybrid_tol(1e-12, d.cwiseAbs().maxCoeff());
  for (Index k = 0; k < d.size(); ++k)
    if (d(k) >= kappa_target - tol && d(k) <= mu0 + tol)
      throw PreconditionError("integrate_flow: an eigenvalue lies in [kappa, mu(y0)]");

  const double h = dt > 0.0 ? dt : default_flow_step(mu0, kappa_target);
  const NormalizedFlow flow(d);

  FlowTrace trace;
  trace.target_kappa = kappa_target;
  trace.times.push_back(0.0);
  trace.points.push_back(y);
  trace.mu_values.push_back(mu0);

  double t = 0.0;
  constexpr long kMaxSteps = 100'000'000;
  for (long k = 0; k < kMaxSteps; ++k) {
    const Vector next = flow.step(y, h);
    const double mu_next = rayleigh_quotient(next, d);
    if (mu_next <= kappa_target) {
      double lo = 0.0, hi = h;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (rayleigh_quotient(flow.step(y, mid), d) > kappa_target ? lo : hi) = mid;
      }
      const double tau = 0.5 * (lo + hi);
      const Vector end = flow.step(y, tau);
      trace.times.push_back(t + tau);
      trace.points.push_back(end);
      trace.mu_values.push_back(rayleigh_quotient(end, d));
      break;
    }
    t += h;
    y = next;
    trace.times.push_back(t);
    trace.points.push_back(y);
    trace.mu_values.push_back(mu_next);
  }

  trace.cumulative_length.assign(trace.times.size(), 0.0);
  double speed_prev = flow.velocity(trace.points.front()).norm();
  for (std::size_t k = 1; k < trace.times.size(); ++k) {
    const double speed = flow.velocity(trace.points[k]).norm();
    trace.cumulative_length[k] =
        trace.cumulative_length[k - 1] + 0.5 * (trace.times[k] - trace.times[k - 1]) * (speed_prev + speed);
    speed_prev = speed;
  }
  trace.arc_length = trace.cumulative_length.back();
  return trace;
}

double mu_decrease_defect(const FlowTrace& trace, const RealVector& d) {
  const std::size_t n = trace.times.size();
  if (n < 2) return 0.0;
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = gradient_norm(trace.points[k], d);
  // Simpson on pairs of equal steps, trapezoid elsewhere (the final partial step).
  double integral = 0.0;
  std::size_t k = 0;
  while (k + 1 < n) {
    const double h1 = trace.times[k + 1] - trace.times[k];
    if (k + 2 < n) {
      const double h2 = trace.times[k + 2] - trace.times[k + 1];
      if (std::abs(h2 - h1) <= 1e-9 * h1) {
        integral += h1 / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
        k += 2;
        continue;
      }
    }
    integral += 0.5 * h1 * (f[k] + f[k + 1]);
    ++k;
  }
  return std::abs((trace.mu_values.front() - trace.target_kappa) - integral);
}

ArcCheck angle_vs_arclength(const FlowTrace& trace) {
  ArcCheck c;
  c.angle = angle_between(trace.points.front(), trace.points.back());
  c.arc_length = trace.arc_length;
  c.holds = c.angle <= c.arc_length + 1e-8;
  c.equality = std::abs(c.angle - c.arc_length) <= 1e-6;
  return c;
}

namespace {

std::size_t interval_of(const std::vector<double>& xs, double x) {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto j = static_cast<std::size_t>(std::distance(xs.begin(), it));
  return std::clamp<std::size_t>(j == 0 ? 0 : j - 1, 0, xs.size() - 2);
}

double lerp_at(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  const std::size_t j = interval_of(xs, x);
  const double w = (x - xs[j]) / (xs[j + 1] - xs[j]);
  return ys[j] + w * (ys[j + 1] - ys[j]);
}

void require_increasing(const std::vector<double>& xs, const char* what) {
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (!(xs[k] > xs[k - 1])) throw PreconditionError(std::string("lemma check: non-monotone ") + what);
}

void require_table(const Tabulated& f) {
  if (f.t.size() < 3 || f.t.size() != f.v.size()) throw PreconditionError("lemma check: need at least 3 samples");
  require_increasing(f.t, "abscissae");
  require_increasing(f.v, "samples");
}

}  // namespace

double Tabulated::operator()(double x) const { return lerp_at(t, v, x); }

double Tabulated::inverse(double y) const { return lerp_at(v, t, y); }

double Tabulated::derivative(double x) const {
  const std::size_t n = t.size();
  auto node = [&](std::size_t j) {
    if (j == 0) return (v[1] - v[0]) / (t[1] - t[0]);
    if (j == n - 1) return (v[n - 1] - v[n - 2]) / (t[n - 1] - t[n - 2]);
    const double h1 = t[j] - t[j - 1];
    const double h2 = t[j + 1] - t[j];
    return (h1 * h1 * v[j + 1] - h2 * h2 * v[j - 1] + (h2 * h2 - h1 * h1) * v[j]) / (h1 * h2 * (h1 + h2));
  };
  const std::size_t j = interval_of(t, x);
  const double w = std::clamp((x - t[j]) / (t[j + 1] - t[j]), 0.0, 1.0);
  return (1.0 - w) * node(j) + w * node(j + 1);
}

LemmaCheck inverse_function_lemma_check(const Tabulated& f, const Tabulated& g, double a, int grid) {
  require_table(f);
  require_table(g);
  if (grid < 1) throw PreconditionError("lemma check: grid must be positive");
  if (!(a >= f.front() && a <= f.back())) throw PreconditionError("lemma check: a outside the domain of f");
  const double b = g.back();
  const double top = g(b);
  if (std::abs(f(a) - top) > hybrid_tol(1e-10, std::abs(top))) throw PreconditionError("lemma check: f(a) != g(b)");

  LemmaCheck out;
  out.hypothesis_holds = true;
  auto check_pair = [&](double alpha) {
    const double y = f(alpha);
    if (y < g.v.front() || y > g.v.back()) return;
    const double beta = g.inverse(y);
    const double fp = f.derivative(alpha);
    const double gp = g.derivative(beta);
    if (fp > gp + hybrid_tol(1e-6, std::abs(gp))) out.hypothesis_holds = false;
  };
  for (double alpha : f.t) {
    if (alpha > a) break;
    check_pair(alpha);
  }
  check_pair(a);
  if (!out.hypothesis_holds) return out;

  out.conclusion_holds = true;
  const double span = std::min(a - f.front(), b - g.front());
  for (int k = 0; k <= grid; ++k) {
    const double xi = span * k / grid;
    const double lhs = f(a - xi);
    const double rhs = g(b - xi);
    if (lhs < rhs - hybrid_tol(1e-9, std::abs(rhs))) {
      out.conclusion_holds = false;
      out.first_violation = xi;
      break;
    }
  }
  return out;
}

void write_flow_csv(std::ostream& out, const FlowTrace& trace) {
  const Index n = trace.points.empty() ? 0 : trace.points.front().size();
  out << "t,mu";
  for (Index k = 0; k < n; ++k) out << ",abs_y" << k + 1;
  out << ",arc_length\n";
  for (std::size_t j = 0; j < trace.times.size(); ++j) {
    out << format_double(trace.times[j]) << ',' << format_double(trace.mu_values[j]);
    for (Index k = 0; k < n; ++k) out << ',' << format_double(std::abs(trace.points[j](k)));
    out << ',' << format_double(trace.cumulative_length[j]) << '\n';
  }
}

}  // namespace pgeig
