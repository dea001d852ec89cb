// pgeig: experiment harness for the preconditioned gradient eigensolver.
//
// Exit codes: 0 success, 1 property violation, 2 usage error, 3 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "pgeig/csv.hpp"
#include "pgeig/flow.hpp"
#include "pgeig/iteration.hpp"
#include "pgeig/linalg.hpp"
#include "pgeig/matrix_market.hpp"
#include "pgeig/precond.hpp"
#include "pgeig/problem.hpp"
#include "pgeig/theory.hpp"
#include "pgeig/verification.hpp"

using namespace pgeig;
using json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;
constexpr int kIo = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

// JSON config reader. Keys are long flag names without dashes; a nested
// object named after a subcommand holds that subcommand's settings, and
// top-level scalars apply to whichever subcommand accepts them.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App*& active) : active_(active) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config: top level must be an object");
    std::vector<CLI::ConfigItem> items;
    if (active_ == nullptr) return items;
    const std::string sub = active_->get_name();
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) continue;
      if (active_->get_option_no_throw("--" + key) != nullptr) items.push_back(item(sub, key, value));
    }
    if (j.contains(sub)) {
      if (!j[sub].is_object()) throw CLI::ConversionError("config: section '" + sub + "' must be an object");
      for (const auto& [key, value] : j[sub].items()) {
        if (active_->get_option_no_throw("--" + key) == nullptr)
          throw CLI::ConversionError("config: unknown setting '" + key + "' for " + sub);
        std::erase_if(items, [&](const CLI::ConfigItem& i) { return i.name == key; });
        items.push_back(item(sub, key, value));
      }
    }
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
  }

  static CLI::ConfigItem item(const std::string& sub, const std::string& key, const json& v) {
    CLI::ConfigItem ci;
    ci.parents = {sub};
    ci.name = key;
    if (v.is_array()) {
      for (const auto& e : v) ci.inputs.push_back(scalar(e));
    } else {
      ci.inputs.push_back(scalar(v));
    }
    return ci;
  }

  const CLI::App*& active_;
};

void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  fn(out);
  if (!out) throw IoError("write failed for '" + path + "'");
}

void require_format(const std::string& format) {
  if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
}

struct ProblemFlags {
  Index dim = 0;
  std::string spectrum;
  std::string a_path;
  std::string b_path;
  bool complex = false;
  bool random_a = false;
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--dim", dim, "Problem dimension (defaults to the spectrum length, else 10)");
    app->add_option("--spectrum", spectrum, "list:v1,v2,... | linspace:a,b,n | logspace:a,b,n (default linspace:1,dim,dim)");
    app->add_option("--a", a_path, "Matrix Market file for A (default identity)");
    app->add_option("--b", b_path, "Matrix Market file for B");
    app->add_flag("--complex", complex, "Complex unitary eigenbasis for generated problems");
    app->add_flag("--random-a", random_a, "Random positive definite A for generated problems");
    app->add_option("--seed", seed, "Generator seed");
  }

  GeneratedProblem build() const {
    if (!b_path.empty()) {
      Matrix b = read_matrix_market_file(b_path);
      Matrix a = a_path.empty() ? Matrix::Identity(b.rows(), b.cols()) : read_matrix_market_file(a_path);
      HermitianPencil pencil(std::move(b), std::move(a));
      if (dim != 0 && dim != pencil.dim()) throw UsageError("--dim does not match the matrix files");
      SpectralData spectrum = solve_pencil(pencil);
      return {std::move(pencil), std::move(spectrum)};
    }
    if (!a_path.empty()) throw UsageError("--a requires --b");
    std::vector<double> values;
    if (spectrum.empty()) {
      const Index n = dim == 0 ? 10 : dim;
      values = parse_spectrum("linspace:1," + std::to_string(n) + "," + std::to_string(n));
    } else {
      values = parse_spectrum(spectrum);
    }
    const auto n = static_cast<Index>(values.size());
    if (dim != 0 && dim != n) throw UsageError("--dim does not match the spectrum length");
    if (n < 2) throw UsageError("dimension must be at least 2");
    RandomProblemOptions opts;
    opts.complex = complex;
    opts.random_a = random_a;
    return random_problem(n, values, seed, opts);
  }
};

std::pair<Index, Index> parse_index_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("expected i,j in '" + text + "'");
  try {
    return {std::stol(text.substr(0, comma)), std::stol(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw UsageError("expected integers i,j in '" + text + "'");
  }
}

// Unit vector in the span of eigenvectors i < j (1-based) with Rayleigh quotient mu0.
Vector span_start(const SpectralData& spectrum, const std::string& pair, std::optional<double> mu0) {
  auto [i, j] = parse_index_pair(pair);
  const Index n = spectrum.dim();
  if (i > j) std::swap(i, j);
  if (i < 1 || j > n || i == j) throw UsageError("span indices must be distinct and within 1..dim");
  const double hi = spectrum.eigenvalues(i - 1);
  const double lo = spectrum.eigenvalues(j - 1);
  if (!(hi > lo)) throw UsageError("span eigenvalues must differ");
  const double mu = mu0.value_or(0.5 * (hi + lo));
  if (!(mu > lo && mu < hi)) throw UsageError("--mu0 must lie strictly between the span eigenvalues");
  const auto [wi, wj] = two_dim_coordinates(mu, hi, lo);
  return std::sqrt(wi) * spectrum.eigenvectors.col(i - 1) + std::sqrt(wj) * spectrum.eigenvectors.col(j - 1);
}

Vector read_vector_file(const std::string& path, Index n) {
  const Matrix m = read_matrix_market_file(path);
  if (m.cols() != 1 || m.rows() != n) throw UsageError("start vector file must hold a " + std::to_string(n) + "x1 matrix");
  return m.col(0);
}

Vector start_vector(const std::string& spec, const SpectralData& spectrum, std::optional<double> mu0, std::uint64_t seed,
                    bool complex) {
  const Index n = spectrum.dim();
  if (spec == "random") {
    Rng rng(seed ^ 0x5851F42D4C957F2Dull);
    return random_unit_vector(n, rng, complex);
  }
  if (spec.rfind("span:", 0) == 0) return span_start(spectrum, spec.substr(5), mu0);
  if (spec.rfind("file:", 0) == 0) return read_vector_file(spec.substr(5), n);
  throw UsageError("--x0 must be random, span:i,j, or file:PATH");
}

// ---------------------------------------------------------------- solve

struct SolveFlags {
  ProblemFlags problem;
  double gamma = 0.5;
  std::string precond = "random";
  std::string x0 = "random";
  std::optional<double> mu0;
  int max_iters = 1000;
  double residual_tol = -1.0;
  std::string out;
  std::string summary;
  std::string format = "csv";
};

PreconditionerFactory make_factory(const SolveFlags& f, const GeneratedProblem& gp, Rng& rng) {
  const Index n = gp.pencil.dim();
  const Matrix& x = gp.spectrum.eigenvectors;
  const bool complex = !gp.pencil.b().imag().isZero(0.0) || !gp.pencil.a().imag().isZero(0.0) || f.problem.complex;
  if (f.precond == "identity")
    return [n, &x](const IterateState&, int) { return lift_to_pencil(identity_preconditioner(n), x); };
  if (f.precond == "random")
    return [n, &x, &rng, g = f.gamma, complex](const IterateState&, int) {
      return lift_to_pencil(random_admissible(n, g, rng, complex), x);
    };
  if (f.precond == "worst-case") {
    const NormalizedProblem np = normalize_pencil(gp.pencil, gp.spectrum, -gp.spectrum.smallest());
    return [np, n, g = f.gamma](const IterateState& s, int) {
      if (g == 0.0) {
        Preconditioner p = lift_to_pencil(identity_preconditioner(n), np.transform);
        p.tag = PreconditionerTag::worst_case;
        return p;
      }
      // Build on |c| and carry the phases of c back onto T.
      const Vector c = np.to_normalized(s.x);
      Vector phase(n);
      for (Index k = 0; k < n; ++k) phase(k) = std::abs(c(k)) > 0.0 ? c(k) / std::abs(c(k)) : Complex(1.0);
      Preconditioner p = worst_case(c, np.diagonal, g);
      p.t = phase.asDiagonal() * p.t * phase.conjugate().asDiagonal();
      return lift_to_pencil(p, np.transform);
    };
  }
  if (f.precond.rfind("file:", 0) == 0) {
    const Preconditioner p = user_preconditioner(read_matrix_market_file(f.precond.substr(5)), gp.pencil.a());
    if (p.t.rows() != n) throw UsageError("preconditioner dimension does not match the problem");
    return [p](const IterateState&, int) { return p; };
  }
  throw UsageError("--precond must be identity, random, worst-case, or file:PATH");
}

json trace_summary(const IterationTrace& trace, const GeneratedProblem& gp, double gamma) {
  long audited = 0, violations = 0;
  for (const auto& s : trace.steps) {
    if (s.report.trivial_reason == TrivialReason::none) ++audited;
    if (!s.report.holds || !s.report.monotone) ++violations;
  }
  const IterateState& last = trace.steps.empty() ? trace.initial : trace.steps.back().state;
  json j;
  j["subcommand"] = "solve";
  j["dim"] = gp.pencil.dim();
  j["preconditioner"] = trace.preconditioner_tag;
  j["gamma"] = number(gamma);
  j["gamma_measured_max"] = number(trace.gamma);
  j["iterations"] = trace.steps.size();
  j["stop"] = to_string(trace.stop);
  j["initial_mu"] = number(trace.initial.mu);
  j["final_mu"] = number(last.mu);
  j["final_residual_norm"] = number(last.residual_norm);
  j["final_interval"] = last.interval.index + 1;
  j["audited_steps"] = audited;
  j["violations"] = violations;
  j["all_hold"] = trace.all_hold();
  j["monotone"] = trace.monotone();
  return j;
}

json trace_rows(const IterationTrace& trace) {
  json rows = json::array();
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& s = trace.steps[k];
    const bool trivial = s.report.trivial_reason != TrivialReason::none;
    json r;
    r["iter"] = k + 1;
    r["mu"] = number(s.state.mu);
    r["residual_norm"] = number(s.state.residual_norm);
    r["i"] = s.state.interval.index + 1;
    r["lambda"] = number(s.state.tail_ratio);
    r["sigma"] = number(s.report.sigma);
    r["sigma_sq"] = number(s.report.sigma * s.report.sigma);
    r["observed_factor"] = trivial ? json(nullptr) : number(s.report.observed_factor);
    r["holds"] = s.report.holds && s.report.monotone;
    r["trivial_reason"] = to_string(s.report.trivial_reason);
    rows.push_back(r);
  }
  return rows;
}

int cmd_solve(const SolveFlags& f) {
  require_format(f.format);
  if (!(f.gamma >= 0.0 && f.gamma < 1.0)) throw UsageError("--gamma must lie in [0, 1)");
  if (f.max_iters < 1) throw UsageError("--max-iters must be positive");
  const GeneratedProblem gp = f.problem.build();
  Rng rng(f.problem.seed ^ 0x9E3779B97F4A7C15ull);
  const PreconditionerFactory factory = make_factory(f, gp, rng);
  const Vector x0 = start_vector(f.x0, gp.spectrum, f.mu0, f.problem.seed, f.problem.complex);
  StopCriteria stop;
  stop.max_iters = f.max_iters;
  stop.residual_tol = f.residual_tol;
  const IterationTrace trace = run(gp.pencil, gp.spectrum, factory, x0, stop);
  const json summary = trace_summary(trace, gp, f.gamma);

  with_output(f.out, [&](std::ostream& out) {
    if (f.format == "csv") {
      write_trace_csv(out, trace);
    } else {
      json j = summary;
      j["steps"] = trace_rows(trace);
      out << j.dump(2) << '\n';
    }
  });
  if (!f.summary.empty()) with_output(f.summary, [&](std::ostream& out) { out << summary.dump(2) << '\n'; });
  return summary["violations"].get<long>() == 0 ? kOk : kViolation;
}

// ---------------------------------------------------------------- sharpness

struct SharpnessFlags {
  std::string spectrum = "list:2,1";
  Index index = 1;
  double gamma = 0.5;
  std::string kappa_grid;
  std::string out;
  std::string format = "csv";
};

struct KappaGrid {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
};

KappaGrid parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw UsageError("--kappa-grid expects lo:hi:n");
  try {
    KappaGrid g{std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2])};
    if (g.n < 1) throw UsageError("--kappa-grid needs n >= 1");
    return g;
  } catch (const std::logic_error&) {
    throw UsageError("--kappa-grid expects numbers lo:hi:n");
  }
}

std::vector<double> kappa_values(const SharpnessFlags& f, double mu_i, double mu_next) {
  const double gap = mu_i - mu_next;
  std::vector<double> ks;
  if (f.kappa_grid.empty()) {
    // Uniform interior points, then a geometric approach to mu_i ending at mu_i - 1e-8 gap.
    for (int k = 1; k < 20; ++k) ks.push_back(mu_next + gap * k / 20.0);
    for (int e = 2; e <= 8; ++e) ks.push_back(mu_i - std::pow(10.0, -e) * gap);
    return ks;
  }
  const KappaGrid g = parse_grid(f.kappa_grid);
  for (int k = 0; k < g.n; ++k) ks.push_back(g.n == 1 ? g.lo : g.lo + (g.hi - g.lo) * k / (g.n - 1));
  for (double k : ks)
    if (!(k > mu_next && k < mu_i)) throw UsageError("kappa grid point " + format_double(k) + " is not inside (mu_{i+1}, mu_i)");
  return ks;
}

int cmd_sharpness(const SharpnessFlags& f) {
  require_format(f.format);
  if (!(f.gamma >= 0.0 && f.gamma < 1.0)) throw UsageError("--gamma must lie in [0, 1)");
  const auto values = parse_spectrum(f.spectrum);
  const auto n = static_cast<Index>(values.size());
  if (n < 2) throw UsageError("sharpness needs at least two eigenvalues");
  const RealVector d = Eigen::Map<const RealVector>(values.data(), n);
  if ((d.array() <= 0.0).any()) throw UsageError("sharpness needs a positive spectrum");
  const Index i = f.index - 1;
  if (i < 0 || i + 1 >= n) throw UsageError("--index must lie in 1..dim-1");
  const double mu_i = d(i), mu_next = d(i + 1);
  if (!(mu_i > mu_next)) throw UsageError("eigenvalues at --index must be distinct");
  const double sigma = sigma_factor_normalized(mu_i, mu_next, f.gamma);

  json rows = json::array();
  bool ok = true;
  for (double kappa : kappa_values(f, mu_i, mu_next)) {
    const Vector x = two_dim_representative(d, i, kappa);
    const Preconditioner t = f.gamma == 0.0 ? identity_preconditioner(n) : worst_case(x, d, f.gamma);
    const Vector next = simplified_step(x, t.t, d);
    const RealVector weights = next.cwiseAbs2() / next.squaredNorm();
    const double before = (mu_i - kappa) / (kappa - mu_next);
    const double observed = tail_ratio(weights, d, mu_i, mu_next) / before;
    const double alpha =
        f.gamma == 0.0 ? std::numeric_limits<double>::infinity() : alpha_quadratic(kappa, mu_i, mu_next, f.gamma).alpha_plus;
    const double sa = sigma_of_alpha(alpha, mu_i, mu_next);
    ok = ok && std::abs(observed - sa * sa) <= 1e-9 && observed <= sigma * sigma + 1e-10;
    rows.push_back({{"kappa", number(kappa)},
                    {"alpha", number(alpha)},
                    {"sigma_alpha", number(sa)},
                    {"observed_factor", number(observed)},
                    {"sigma_bound", number(sigma * sigma)}});
  }

  with_output(f.out, [&](std::ostream& out) {
    if (f.format == "csv") {
      out << "kappa,alpha,sigma_alpha,observed_factor,sigma_bound\n";
      for (const auto& r : rows) {
        bool first = true;
        for (const auto& [k, v] : r.items()) {
          out << (first ? "" : ",") << (v.is_string() ? v.get<std::string>() : format_double(v.get<double>()));
          first = false;
        }
        out << '\n';
      }
    } else {
      json j;
      j["subcommand"] = "sharpness";
      j["mu_i"] = mu_i;
      j["mu_next"] = mu_next;
      j["gamma"] = f.gamma;
      j["sigma"] = sigma;
      j["rows"] = rows;
      j["pass"] = ok;
      out << j.dump(2) << '\n';
    }
  });
  return ok ? kOk : kViolation;
}

// ---------------------------------------------------------------- flow

struct FlowFlags {
  std::string spectrum = "list:2,1";
  std::string x0 = "span:1,2";
  std::optional<double> mu0;
  std::optional<double> kappa;
  double dt = 0.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
};

int cmd_flow(const FlowFlags& f) {
  require_format(f.format);
  if (!f.kappa) throw UsageError("flow needs --kappa");
  const auto values = parse_spectrum(f.spectrum);
  const auto n = static_cast<Index>(values.size());
  if (n < 2) throw UsageError("flow needs at least two eigenvalues");
  SpectralData spectrum;
  spectrum.eigenvalues = Eigen::Map<const RealVector>(values.data(), n);
  spectrum.eigenvectors = Matrix::Identity(n, n);
  spectrum.cluster_tol = default_cluster_tol(spectrum.eigenvalues);
  const Vector y0 = start_vector(f.x0, spectrum, f.mu0, f.seed, false);
  const FlowTrace trace = integrate_flow(y0, spectrum.eigenvalues, *f.kappa, f.dt);

  with_output(f.out, [&](std::ostream& out) {
    if (f.format == "csv") {
      write_flow_csv(out, trace);
    } else {
      double drift = 0.0;
      for (const auto& p : trace.points) drift = std::max(drift, std::abs(p.norm() - 1.0));
      const ArcCheck arc = angle_vs_arclength(trace);
      json j;
      j["subcommand"] = "flow";
      j["mu_start"] = trace.mu_values.front();
      j["kappa"] = trace.target_kappa;
      j["t_bar"] = trace.final_time();
      j["arc_length"] = trace.arc_length;
      j["angle"] = arc.angle;
      j["samples"] = trace.times.size();
      j["norm_drift"] = drift;
      j["mu_decrease_defect"] = mu_decrease_defect(trace, spectrum.eigenvalues);
      out << j.dump(2) << '\n';
    }
  });
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyFlags {
  VerificationOptions options;
  std::optional<Index> dim;
  std::string dims;
  std::vector<double> gammas;
  std::optional<double> gamma;
  std::string out;
  std::string format = "json";
};

int cmd_verify(VerifyFlags f) {
  require_format(f.format);
  VerificationOptions& o = f.options;
  if (f.dim) o.dim_min = o.dim_max = *f.dim;
  if (!f.dims.empty()) {
    const auto colon = f.dims.find(':');
    try {
      o.dim_min = std::stol(f.dims.substr(0, colon));
      o.dim_max = colon == std::string::npos ? o.dim_min : std::stol(f.dims.substr(colon + 1));
    } catch (const std::exception&) {
      throw UsageError("--dims expects lo:hi");
    }
  }
  if (!f.gammas.empty()) o.gammas = f.gammas;
  if (f.gamma) o.gammas = {*f.gamma};
  if (o.trials < 1) throw UsageError("--trials must be at least 1");
  if (o.dim_min < 2 || o.dim_max < o.dim_min) throw UsageError("dimensions must satisfy 2 <= lo <= hi");
  for (double g : o.gammas)
    if (!(g >= 0.0 && g < 1.0)) throw UsageError("gamma values must lie in [0, 1)");

  const VerificationSummary s = run_verification(o);
  with_output(f.out, [&](std::ostream& out) {
    if (f.format == "csv") {
      out << "property,checks,failures,worst_margin,pass\n";
      for (const auto& p : s.properties)
        out << p.name << ',' << p.checks << ',' << p.failures << ',' << format_double(p.worst_margin) << ','
            << (p.pass() ? "true" : "false") << '\n';
      return;
    }
    json j;
    j["subcommand"] = "verify";
    j["trials"] = o.trials;
    j["dims"] = {o.dim_min, o.dim_max};
    j["gammas"] = o.gammas;
    j["seed"] = o.seed;
    j["inject_bug"] = o.inject_bug;
    j["overall_pass"] = s.overall_pass();
    json props = json::array();
    for (const auto& p : s.properties)
      props.push_back({{"name", p.name},
                       {"checks", p.checks},
                       {"failures", p.failures},
                       {"worst_margin", number(p.worst_margin)},
                       {"failing_seeds", p.failing_seeds},
                       {"pass", p.pass()}});
    j["properties"] = props;
    out << j.dump(2) << '\n';
  });
  return s.overall_pass() ? kOk : kViolation;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumFlags {
  ProblemFlags problem;
  std::string out;
  std::string format = "csv";
};

int cmd_spectrum(const SpectrumFlags& f) {
  require_format(f.format);
  const GeneratedProblem gp = f.problem.build();
  const RealVector& ev = gp.spectrum.eigenvalues;
  with_output(f.out, [&](std::ostream& out) {
    if (f.format == "csv") {
      out << "k,eigenvalue\n";
      for (Index k = 0; k < ev.size(); ++k) out << k + 1 << ',' << format_double(ev(k)) << '\n';
    } else {
      json j;
      j["subcommand"] = "spectrum";
      j["dim"] = ev.size();
      j["eigenvalues"] = std::vector<double>(ev.data(), ev.data() + ev.size());
      out << j.dump(2) << '\n';
    }
  });
  return kOk;
}

const CLI::App* find_active(const CLI::App& app, int argc, char** argv) {
  for (int k = 1; k < argc; ++k) {
    const CLI::App* sub = app.get_subcommand_no_throw(argv[k]);
    if (sub != nullptr) return sub;
  }
  return nullptr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preconditioned gradient eigensolver: sharp-bound experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  const CLI::App* active = nullptr;
  app.config_formatter(std::make_shared<JsonConfig>(active));
  app.set_config("--config", "", "JSON settings; flags override it, per-subcommand objects nest under its name");

  SolveFlags solve;
  auto* s = app.add_subcommand("solve", "Run the iteration and audit the bound on every step");
  solve.problem.attach(s);
  s->add_option("--gamma", solve.gamma, "Preconditioner quality in [0, 1)");
  s->add_option("--precond", solve.precond, "identity | random | worst-case | file:PATH");
  s->add_option("--x0", solve.x0, "random | span:i,j | file:PATH");
  s->add_option("--mu0", solve.mu0, "Rayleigh quotient of a span:i,j start (default midpoint)");
  s->add_option("--max-iters", solve.max_iters, "Iteration limit");
  s->add_option("--residual-tol", solve.residual_tol, "Stop when ||Bx - mu Ax|| falls below this (negative: 1e-10 ||B||)");
  s->add_option("--out", solve.out, "Output path (default stdout)");
  s->add_option("--summary", solve.summary, "Also write the JSON summary here");
  s->add_option("--format", solve.format, "csv | json");

  SharpnessFlags sharp;
  auto* sh = app.add_subcommand("sharpness", "Worst-case step factor across a kappa grid");
  sh->add_option("--spectrum", sharp.spectrum, "Positive eigenvalues of B = diag(d)");
  sh->add_option("--index", sharp.index, "Interval index i (1-based): kappa in (mu_{i+1}, mu_i)");
  sh->add_option("--gamma", sharp.gamma, "Preconditioner quality in [0, 1)");
  sh->add_option("--kappa-grid", sharp.kappa_grid, "lo:hi:n (default: 19 uniform points plus mu_i - 10^-k gap, k=2..8)");
  sh->add_option("--out", sharp.out, "Output path (default stdout)");
  sh->add_option("--format", sharp.format, "csv | json");

  FlowFlags flow;
  auto* fl = app.add_subcommand("flow", "Integrate the normalized gradient flow down to a level kappa");
  fl->add_option("--spectrum", flow.spectrum, "Eigenvalues of B = diag(d)");
  fl->add_option("--x0", flow.x0, "random | span:i,j | file:PATH");
  fl->add_option("--mu0", flow.mu0, "Rayleigh quotient of a span:i,j start (default midpoint)");
  fl->add_option("--kappa", flow.kappa, "Target level")->required();
  fl->add_option("--dt", flow.dt, "RK4 step (0: 1e-3 (mu0 - kappa) clamped to [1e-5, 1e-2])");
  fl->add_option("--seed", flow.seed, "Seed for a random start");
  fl->add_option("--out", flow.out, "Output path (default stdout)");
  fl->add_option("--format", flow.format, "csv | json");

  VerifyFlags verify;
  auto* v = app.add_subcommand("verify", "Run the seeded property suites");
  v->add_option("--trials", verify.options.trials, "Trials per suite");
  v->add_option("--dim", verify.dim, "Fixed dimension (overrides --dims)");
  v->add_option("--dims", verify.dims, "Dimension range lo:hi (default 2:12)");
  v->add_option("--gammas", verify.gammas, "Comma-separated gamma values (default 0.1,0.5,0.9)")->delimiter(',');
  v->add_option("--gamma", verify.gamma, "Single gamma value");
  v->add_option("--steps", verify.options.steps_per_trial, "Iteration steps per trial");
  v->add_option("--seed", verify.options.seed, "Base seed");
  v->add_flag("--inject-bug", verify.options.inject_bug, "Audit against 0.9 sigma; the bound suites must then fail");
  v->add_option("--out", verify.out, "Output path (default stdout)");
  v->add_option("--format", verify.format, "json | csv");

  SpectrumFlags spec;
  auto* sp = app.add_subcommand("spectrum", "Print the pencil eigenvalues in decreasing order");
  spec.problem.attach(sp);
  sp->add_option("--out", spec.out, "Output path (default stdout)");
  sp->add_option("--format", spec.format, "csv | json");

  active = find_active(app, argc, argv);
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::FileError& e) {
    app.exit(e);
    return kIo;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (s->parsed()) return cmd_solve(solve);
    if (sh->parsed()) return cmd_sharpness(sharp);
    if (fl->parsed()) return cmd_flow(flow);
    if (v->parsed()) return cmd_verify(verify);
    if (sp->parsed()) return cmd_spectrum(spec);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
