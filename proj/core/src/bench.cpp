#include "manifold_descent/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace manifold_descent {

unsigned resolve_thread_count(unsigned requested) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("MANIFOLD_DESCENT_THREADS")) {
      char* end = nullptr;
      const unsigned long v = std::strtoul(env, &end, 10);
      if (end != env && *end == '\0') n = static_cast<unsigned>(v);
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(resolve_thread_count(threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

RunRecord run_one(const MethodSpec& method, const Objective& obj, const PhaseState& x0,
                  const IntegratorConfig& config,
                  const std::optional<PerturbationSpec>& perturbation,
                  const BenchOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Trajectory traj = simulate(method, obj, x0, config, perturbation);
  const DiagnosticsReport report = build_report(traj, options.report);
  const auto stop = std::chrono::steady_clock::now();

  RunRecord r;
  r.label = method.display_label();
  r.family = method.family;
  r.alpha = method.effective_alpha();
  r.beta = method.effective_beta();
  r.mu = method.mu;
  r.s = method.s;
  r.lambda = method.lambda;
  r.gamma = method.gamma;
  r.delta = perturbation ? perturbation->delta : 0.0;
  r.seed = perturbation ? perturbation->seed : 0;
  r.settling_time = report.settling_time;
  r.fitted_rate = report.fitted_rate;
  r.terminal_gap = report.terminal_gap;
  r.terminal_error = (traj.final_state().x1 - traj.x_star).norm();
  r.verdicts = report.verdict_string();
  r.diverged = traj.terminated_by == Termination::Divergence;
  if (options.timing) {
    r.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  }
  return r;
}

std::vector<RunRecord> compare(const std::vector<MethodSpec>& methods, const Objective& obj,
                               const PhaseState& x0, const IntegratorConfig& config,
                               const BenchOptions& options) {
  std::vector<RunRecord> out(methods.size());
  parallel_for(methods.size(), options.threads, [&](std::size_t i) {
    out[i] = run_one(methods[i], obj, x0, config, std::nullopt, options);
  });
  std::stable_sort(out.begin(), out.end(),
                   [](const RunRecord& a, const RunRecord& b) { return a.label < b.label; });
  return out;
}

void SweepSpec::validate() const {
  if (alphas.empty() || betas.empty() || methods.empty()) {
    throw InputError("sweep needs nonempty alphas, betas and methods");
  }
  for (double a : alphas) {
    if (!(a > 0.0)) throw InputError("sweep alphas must be positive");
  }
  for (double b : betas) {
    if (!(b > 0.0)) throw InputError("sweep betas must be positive");
  }
  integrator.validate();
}

MethodSpec at_grid_point(const MethodSpec& tmpl, double alpha, double beta) {
  MethodSpec m = tmpl;
  m.alpha = alpha;
  m.beta = beta;
  if (m.family == Family::NagSc || m.family == Family::TripleMomentum) {
    m.mu = alpha * alpha;
    m.s = beta * beta;
  }
  if (!tmpl.label.empty()) {
    std::ostringstream os;
    os << tmpl.label << "(alpha=" << alpha << ",beta=" << beta << ")";
    m.label = os.str();
  }
  return m;
}

std::vector<RunRecord> sweep(const SweepSpec& spec, const Objective& obj,
                             const BenchOptions& options) {
  spec.validate();
  std::vector<std::uint64_t> seeds = spec.seeds;
  if (seeds.empty()) seeds.push_back(spec.perturbation ? spec.perturbation->seed : 0);

  const std::size_t nb = spec.betas.size();
  const std::size_t nm = spec.methods.size();
  const std::size_t ns = seeds.size();
  const std::size_t total = spec.alphas.size() * nb * nm * ns;

  std::vector<RunRecord> out(total);
  parallel_for(total, options.threads, [&](std::size_t idx) {
    const std::size_t is = idx % ns;
    const std::size_t im = (idx / ns) % nm;
    const std::size_t ib = (idx / (ns * nm)) % nb;
    const std::size_t ia = idx / (ns * nm * nb);
    const MethodSpec m = at_grid_point(spec.methods[im], spec.alphas[ia], spec.betas[ib]);
    std::optional<PerturbationSpec> pert = spec.perturbation;
    if (pert) pert->seed = seeds[is];
    RunRecord r = run_one(m, obj, spec.x0, spec.integrator, pert, options);
    r.alpha = spec.alphas[ia];
    r.beta = spec.betas[ib];
    r.seed = seeds[is];
    out[idx] = std::move(r);
  });
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<PersistenceRow> persistence_experiment(
    const std::vector<double>& deltas, const std::vector<std::uint64_t>& seeds,
    const std::vector<MethodSpec>& methods, const Objective& obj, const PhaseState& x0,
    const IntegratorConfig& config, const PerturbationSpec& base,
    const BenchOptions& options) {
  for (double d : deltas) {
    if (!(d >= 0.0)) throw InputError("perturbation deltas must be >= 0");
  }
  if (seeds.empty()) throw InputError("persistence experiment needs at least one seed");

  std::vector<double> levels{0.0};
  for (double d : deltas) {
    if (std::find(levels.begin(), levels.end(), d) == levels.end()) levels.push_back(d);
  }

  // Flattened (level, method, seed) jobs; the unperturbed level runs once.
  struct Job {
    std::size_t level;
    std::size_t method;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    for (std::size_t m = 0; m < methods.size(); ++m) {
      if (levels[l] == 0.0) {
        jobs.push_back({l, m, seeds.front()});
      } else {
        for (std::uint64_t s : seeds) jobs.push_back({l, m, s});
      }
    }
  }

  std::vector<RunRecord> records(jobs.size());
  parallel_for(jobs.size(), options.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    std::optional<PerturbationSpec> pert;
    if (levels[job.level] > 0.0) {
      pert = base;
      pert->delta = levels[job.level];
      pert->seed = job.seed;
    }
    records[i] = run_one(methods[job.method], obj, x0, config, pert, options);
  });

  std::vector<PersistenceRow> rows;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    for (std::size_t m = 0; m < methods.size(); ++m) {
      PersistenceRow row;
      row.delta = levels[l];
      row.label = methods[m].display_label();
      row.family = methods[m].family;
      std::vector<double> errs;
      std::vector<double> gaps;
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (jobs[i].level != l || jobs[i].method != m) continue;
        errs.push_back(records[i].terminal_error);
        gaps.push_back(records[i].terminal_gap);
        if (records[i].diverged) ++row.diverged;
      }
      row.n_seeds = errs.size();
      row.median_error = median(errs);
      row.max_error = *std::max_element(errs.begin(), errs.end());
      row.median_gap = median(gaps);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace manifold_descent
