#include "pgeig/iteration.hpp"

#include <cmath>
#include <ostream>

#include "pgeig/csv.hpp"
#include "pgeig/linalg.hpp"
#include "pgeig/theory.hpp"

namespace pgeig {

double rayleigh_quotient(const Vector& x, const HermitianPencil& pencil) {
  if (x.size() != pencil.dim()) throw StructuralError("rayleigh_quotient: dimension mismatch");
  if (!(x.norm() > 0.0)) throw PreconditionError("rayleigh_quotient: zero vector");
  const Complex num = x.dot(pencil.b() * x);
  const double den = x.dot(pencil.a() * x).real();
  if (std::abs(num.imag()) > hybrid_tol(1e-13, std::abs(num)))
    throw StructuralError("rayleigh_quotient: (x, Bx) is not real");
  return num.real() / den;
}

Vector gradient_step(const Vector& x, const Matrix& t, const HermitianPencil& pencil, double mu_min) {
  const double mu = rayleigh_quotient(x, pencil);
  const Vector bx = pencil.b() * x;
  const Vector r = bx - mu * (pencil.a() * x);
  if (r.norm() <= 1e-13 * bx.norm()) return x;
  const double denom = mu - mu_min;
  if (!(denom > 0.0)) throw PreconditionError("gradient_step: at minimal eigenvalue");
  return x + (t * r) / denom;
}

Vector simplified_step(const Vector& x, const Matrix& t, const RealVector& d) {
  if ((d.array() <= 0.0).any()) throw PreconditionError("simplified_step: B must be positive");
  const double mu = rayleigh_quotient(x, d);
  const Vector bx = apply_diagonal(d, x);
  const Vector r = bx - mu * x;
  if (r.norm() <= 1e-13 * bx.norm()) return x;
  const Index n = x.size();
  return (bx - (Matrix::Identity(n, n) - t) * r) / mu;
}

SpectralInterval interval_index(double mu, const SpectralData& spectrum) {
  const RealVector& ev = spectrum.eigenvalues;
  const Index n = ev.size();
  const double tol = spectrum.cluster_tol;
  if (mu > ev(0) + tol || mu < ev(n - 1) - tol)
    throw PreconditionError("interval_index: Rayleigh quotient outside the spectral range");

  SpectralInterval out;
  if (mu >= ev(0) - tol) {
    out.index = 0;
    out.at_top = true;
  } else {
    Index k = 0;
    while (k + 1 < n && ev(k + 1) >= mu - tol) ++k;
    out.index = k;
  }
  out.upper = ev(out.index);
  Index below = out.index + 1;
  while (below < n && ev(below) >= out.upper - tol) ++below;
  if (below < n) {
    out.lower = ev(below);
  } else {
    out.lower = ev(n - 1);
    out.at_bottom = true;
  }
  return out;
}

double tail_ratio(const RealVector& weights, const RealVector& eigenvalues, double upper, double lower) {
  const double num = ((upper - eigenvalues.array()) * weights.array()).sum();
  const double den = ((eigenvalues.array() - lower) * weights.array()).sum();
  return num / den;
}

IterateState make_state(const Vector& x, const HermitianPencil& pencil, const SpectralData& spectrum) {
  if (!(x.norm() > 0.0)) throw PreconditionError("make_state: zero vector");
  IterateState s;
  const Vector ax = pencil.a() * x;
  s.x = x / std::sqrt(x.dot(ax).real());
  s.mu = rayleigh_quotient(s.x, pencil);
  s.residual = pencil.b() * s.x - s.mu * (pencil.a() * s.x);
  s.residual_norm = s.residual.norm();
  s.interval = interval_index(s.mu, spectrum);
  s.weights = spectrum.coordinates(s.x, pencil.a()).cwiseAbs2();
  s.weights /= s.weights.sum();
  const bool on_top = s.interval.at_top || s.mu >= s.interval.upper - spectrum.cluster_tol;
  if (on_top || s.interval.at_bottom) {
    s.tail_ratio = 0.0;
  } else {
    s.tail_ratio = std::max(0.0, tail_ratio(s.weights, spectrum.eigenvalues, s.interval.upper, s.interval.lower));
  }
  return s;
}

std::string to_string(TrivialReason reason) {
  switch (reason) {
    case TrivialReason::none: return "";
    case TrivialReason::at_mu_i: return "at_mu_i";
    case TrivialReason::jumped_interval: return "jumped_interval";
    case TrivialReason::converged: return "converged";
  }
  return "";
}

BoundReport bound_audit(const IterateState& before, const IterateState& after, const SpectralData& spectrum,
                        double gamma) {
  const SpectralInterval& iv = before.interval;
  BoundReport rep;
  rep.sigma = sigma_factor(iv.upper, iv.lower, spectrum.smallest(), std::min(gamma, 1.0));
  rep.lambda_before = before.tail_ratio;
  rep.monotone = after.mu >= before.mu - hybrid_tol(1e-12, std::abs(before.mu));

  if (iv.at_bottom) {
    rep.trivial_reason = TrivialReason::converged;
  } else if (rep.lambda_before == 0.0) {
    rep.trivial_reason = TrivialReason::at_mu_i;
  } else if (rep.lambda_before < kConvergedTailRatio) {
    rep.trivial_reason = TrivialReason::converged;
  } else if (after.mu >= iv.upper - spectrum.cluster_tol) {
    rep.trivial_reason = TrivialReason::jumped_interval;
  } else {
    rep.lambda_after = tail_ratio(after.weights, spectrum.eigenvalues, iv.upper, iv.lower);
    rep.observed_factor = rep.lambda_after / rep.lambda_before;
    rep.holds = rep.observed_factor <= rep.sigma * rep.sigma + 1e-10;
  }
  return rep;
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::residual_tol: return "residual_tol";
    case StopReason::max_iters: return "max_iters";
    case StopReason::reached_top: return "reached_top";
    case StopReason::eigenvector_start: return "eigenvector_start";
  }
  return "";
}

bool IterationTrace::all_hold() const {
  for (const auto& s : steps)
    if (!s.report.holds || !s.report.monotone) return false;
  return true;
}

bool IterationTrace::monotone() const {
  double prev = initial.mu;
  for (const auto& s : steps) {
    if (s.state.mu < prev - hybrid_tol(1e-12, std::abs(prev))) return false;
    prev = s.state.mu;
  }
  return true;
}

IterationTrace run(const HermitianPencil& pencil, const SpectralData& spectrum, const PreconditionerFactory& factory,
                   const Vector& x0, StopCriteria stop) {
  const double tol = stop.residual_tol < 0.0 ? 1e-10 * spectral_norm(pencil.b()) : stop.residual_tol;
  IterationTrace trace;
  trace.initial = make_state(x0, pencil, spectrum);
  IterateState state = trace.initial;
  const Vector bx = pencil.b() * state.x;
  if (state.residual_norm <= tol || state.residual_norm <= 1e-13 * bx.norm()) {
    trace.stop = StopReason::eigenvector_start;
    return trace;
  }
  if (state.interval.at_top) {
    trace.stop = StopReason::reached_top;
    return trace;
  }

  trace.stop = StopReason::max_iters;
  for (int it = 1; it <= stop.max_iters; ++it) {
    const Preconditioner p = factory(state, it);
    if (trace.preconditioner_tag.empty()) trace.preconditioner_tag = to_string(p.tag);
    trace.gamma = std::max(trace.gamma, p.gamma_measured);
    const Vector next_x = gradient_step(state.x, p.t, pencil, spectrum.smallest());
    IterateState next = make_state(next_x, pencil, spectrum);
    BoundReport rep = bound_audit(state, next, spectrum, p.gamma_measured);
    trace.steps.push_back({next, rep, p.gamma_measured});
    state = std::move(next);
    if (state.residual_norm <= tol) {
      trace.stop = StopReason::residual_tol;
      break;
    }
    if (state.interval.at_top) {
      trace.stop = StopReason::reached_top;
      break;
    }
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  out << "iter,mu,residual_norm,i,lambda,sigma,sigma_sq,observed_factor,holds,trivial_reason\n";
  const auto& s0 = trace.initial;
  out << 0 << ',' << format_double(s0.mu) << ',' << format_double(s0.residual_norm) << ',' << s0.interval.index + 1
      << ',' << format_double(s0.tail_ratio) << ",,,,true,"
      << (trace.stop == StopReason::eigenvector_start ? "converged" : "initial") << '\n';
  int iter = 1;
  for (const auto& step : trace.steps) {
    const auto& s = step.state;
    const auto& r = step.report;
    const bool trivial = r.trivial_reason != TrivialReason::none;
    out << iter++ << ',' << format_double(s.mu) << ',' << format_double(s.residual_norm) << ','
        << s.interval.index + 1 << ',' << format_double(s.tail_ratio) << ',' << format_double(r.sigma) << ','
        << format_double(r.sigma * r.sigma) << ',' << (trivial ? std::string() : format_double(r.observed_factor))
        << ',' << (r.holds && r.monotone ? "true" : "false") << ',' << to_string(r.trivial_reason) << '\n';
  }
}

}  // namespace pgeig
