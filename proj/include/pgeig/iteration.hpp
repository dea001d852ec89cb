#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pgeig/precond.hpp"
#include "pgeig/problem.hpp"

namespace pgeig {

/// (x, Bx) / (x, Ax).
double rayleigh_quotient(const Vector& x, const HermitianPencil& pencil);

/// One step of the fixed-step preconditioned gradient method,
/// x' = x + T (Bx - mu(x) A x) / (mu(x) - mu_min). Returns x unchanged when the
/// residual is below 1e-13 ||Bx||.
Vector gradient_step(const Vector& x, const Matrix& t, const HermitianPencil& pencil, double mu_min);

/// Normalized form for A = I, B = diag(d) > 0, mu_min = 0:
/// x' = (Bx - (I - T)(Bx - mu(x) x)) / mu(x).
Vector simplified_step(const Vector& x, const Matrix& t, const RealVector& d);

/// Location of a Rayleigh quotient in the spectrum: mu_{i+1} < mu <= mu_i,
/// with index the 0-based position of mu_i among the decreasing eigenvalues
/// and lower the next distinct eigenvalue below.
struct SpectralInterval {
  Index index = 0;
  double upper = 0.0;
  double lower = 0.0;
  bool at_top = false;     // mu within cluster_tol of mu_1
  bool at_bottom = false;  // mu within cluster_tol of mu_min; no interval below
};

SpectralInterval interval_index(double mu, const SpectralData& spectrum);

/// (mu_i - mu(x)) / (mu(x) - mu_{i+1}) from eigenvector weights |c_k|^2,
/// which keeps relative accuracy when mu(x) is close to mu_i.
double tail_ratio(const RealVector& weights, const RealVector& eigenvalues, double upper, double lower);

struct IterateState {
  Vector x;  // unit A-norm
  double mu = 0.0;
  Vector residual;
  double residual_norm = 0.0;
  SpectralInterval interval;
  double tail_ratio = 0.0;
  RealVector weights;  // |(x_k, A x)|^2, summing to 1
};

IterateState make_state(const Vector& x, const HermitianPencil& pencil, const SpectralData& spectrum);

enum class TrivialReason { none, at_mu_i, jumped_interval, converged };

std::string to_string(TrivialReason reason);

struct BoundReport {
  double sigma = 0.0;
  double lambda_before = 0.0;
  double lambda_after = 0.0;
  double observed_factor = 0.0;
  bool holds = true;
  bool monotone = true;  // mu(x') >= mu(x) - 1e-12 max(1, |mu|)
  TrivialReason trivial_reason = TrivialReason::none;
};

/// Below this tail ratio the step is reported as converged: the ratio of two
/// such values carries no reliable digits.
inline constexpr double kConvergedTailRatio = 1e-14;

BoundReport bound_audit(const IterateState& before, const IterateState& after, const SpectralData& spectrum,
                        double gamma);

struct StopCriteria {
  int max_iters = 1000;
  double residual_tol = -1.0;  // negative: 1e-10 ||B||
};

enum class StopReason { residual_tol, max_iters, reached_top, eigenvector_start };

std::string to_string(StopReason reason);

using PreconditionerFactory = std::function<Preconditioner(const IterateState& state, int iteration)>;

struct IterationStep {
  IterateState state;
  BoundReport report;
  double gamma = 0.0;
};

struct IterationTrace {
  IterateState initial;
  std::vector<IterationStep> steps;
  std::string preconditioner_tag;
  double gamma = 0.0;  // largest measured gamma over the run
  StopReason stop = StopReason::max_iters;

  bool all_hold() const;
  bool monotone() const;
};

IterationTrace run(const HermitianPencil& pencil, const SpectralData& spectrum, const PreconditionerFactory& factory,
                   const Vector& x0, StopCriteria stop = {});

/// Header: iter,mu,residual_norm,i,lambda,sigma,sigma_sq,observed_factor,holds,trivial_reason.
/// Row 0 is the starting vector; audit columns are empty there. i is 1-based.
void write_trace_csv(std::ostream& out, const IterationTrace& trace);

}  // namespace pgeig
