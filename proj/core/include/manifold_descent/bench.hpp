#pragma once

#include "manifold_descent/diagnostics.hpp"
#include "manifold_descent/integrate.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace manifold_descent {

/// One simulated (method, parameter point, seed).
struct RunRecord {
  std::string label;
  Family family = Family::Proposed;
  double alpha = 0.0;
  double beta = 0.0;
  double mu = 0.0;
  double s = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  double settling_time = 0.0;
  double fitted_rate = 0.0;
  double terminal_gap = 0.0;
  /// ||x1(T) - x*|| at the last recorded sample.
  double terminal_error = 0.0;
  std::string verdicts;
  bool diverged = false;
  /// Zero unless BenchOptions::timing is set, so output stays reproducible.
  double wall_ms = 0.0;
};

struct BenchOptions {
  ReportOptions report;
  /// Record wall-clock time per run. Off by default: timings break byte-identical output.
  bool timing = false;
  /// Worker threads. 0 reads MANIFOLD_DESCENT_THREADS, where 0 or unset means
  /// hardware concurrency.
  unsigned threads = 0;
};

/// Resolved worker count for `requested` (see BenchOptions::threads).
unsigned resolve_thread_count(unsigned requested);

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Results land at
/// their own index, so output order never depends on scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Simulates one method and reduces the trajectory to a RunRecord.
RunRecord run_one(const MethodSpec& method, const Objective& obj, const PhaseState& x0,
                  const IntegratorConfig& config,
                  const std::optional<PerturbationSpec>& perturbation,
                  const BenchOptions& options = {});

/// One record per method with a shared x0 and integrator config, sorted by label.
std::vector<RunRecord> compare(const std::vector<MethodSpec>& methods, const Objective& obj,
                               const PhaseState& x0, const IntegratorConfig& config,
                               const BenchOptions& options = {});

struct SweepSpec {
  std::vector<double> alphas;
  std::vector<double> betas;
  /// Templates. Each grid point sets alpha/beta; NagSc and TripleMomentum
  /// take mu = alpha^2, s = beta^2 so their derived parameters hit the point.
  std::vector<MethodSpec> methods;
  /// One run per seed. Defaults to {perturbation seed} or {0}.
  std::vector<std::uint64_t> seeds;
  std::optional<PerturbationSpec> perturbation;
  IntegratorConfig integrator;
  PhaseState x0;

  void validate() const;
};

/// Applies grid point (alpha, beta) to a method template.
MethodSpec at_grid_point(const MethodSpec& tmpl, double alpha, double beta);

/// Row-major over alphas x betas x methods x seeds.
std::vector<RunRecord> sweep(const SweepSpec& spec, const Objective& obj,
                             const BenchOptions& options = {});

struct PersistenceRow {
  double delta = 0.0;
  std::string label;
  Family family = Family::Proposed;
  std::size_t n_seeds = 0;
  double median_error = 0.0;
  double max_error = 0.0;
  double median_gap = 0.0;
  std::size_t diverged = 0;
};

/// Terminal distance to the minimizer under per-step perturbations of size
/// delta, summarized by median and max over seeds. A delta = 0 control row
/// is always included first. `base` supplies distribution and target.
std::vector<PersistenceRow> persistence_experiment(
    const std::vector<double>& deltas, const std::vector<std::uint64_t>& seeds,
    const std::vector<MethodSpec>& methods, const Objective& obj, const PhaseState& x0,
    const IntegratorConfig& config, const PerturbationSpec& base = {},
    const BenchOptions& options = {});

double median(std::vector<double> values);

}  // namespace manifold_descent
