#include "cli.hpp"

#include "acceptance.hpp"
#include "config.hpp"
#include "plot.hpp"

#include <manifold_descent/bench.hpp>
#include <manifold_descent/diagnostics.hpp>
#include <manifold_descent/io.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace manifold_descent::cli {

namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string format;
  bool plot = false;
  bool log_y = false;
  bool timing = false;
  std::optional<std::uint64_t> seed;
};

void add_common_options(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config_path, "Sectioned key-value experiment file");
  app.add_option("--set", f.overrides, "Override section.key=value (repeatable)");
  app.add_option("--out", f.out_dir, "Output directory");
  app.add_option("--format", f.format, "Summary output format")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_flag("--plot", f.plot, "Write an SVG plot of f(x(t))");
  app.add_flag("--log-y", f.log_y, "Plot f - f* on a log10 axis");
  app.add_flag("--timing", f.timing, "Record wall-clock time per run (breaks byte reproducibility)");
  app.add_option("--seed", f.seed, "Perturbation seed");
}

ExperimentConfig load_experiment(const Flags& f) {
  ConfigFile file = f.config_path.empty() ? ConfigFile{} : ConfigFile::load(f.config_path);
  for (const std::string& o : f.overrides) file.apply_override(o);
  if (!f.out_dir.empty()) file.set("output", "dir", f.out_dir, "--out");
  if (!f.format.empty()) file.set("output", "format", f.format, "--format");
  if (f.plot) file.set("output", "plot", "true", "--plot");
  if (f.log_y) file.set("output", "log_y", "true", "--log-y");
  if (f.timing) file.set("output", "timing", "true", "--timing");
  if (f.seed) file.set("perturbation", "seed", std::to_string(*f.seed), "--seed");
  return build_experiment(file);
}

bool wants_csv(const OutputSettings& o) { return o.format != OutputFormat::Json; }
bool wants_json(const OutputSettings& o) { return o.format != OutputFormat::Csv; }

void write_file(const fs::path& path, const std::string& content, std::ostream& out) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  out << "wrote " << path.string() << '\n';
}

template <class Writer>
std::string to_text(Writer&& w) {
  std::ostringstream os;
  w(os);
  return os.str();
}

BenchOptions bench_options(const ExperimentConfig& cfg) {
  BenchOptions b;
  b.report = cfg.report;
  b.timing = cfg.output.timing;
  b.threads = cfg.output.threads;
  return b;
}

std::optional<PerturbationSpec> active_perturbation(const ExperimentConfig& cfg) {
  if (cfg.perturbation.delta > 0.0) return cfg.perturbation;
  return std::nullopt;
}

std::string plot_title(const ExperimentConfig& cfg) {
  return std::string(to_string(cfg.objective->kind())) + ", dim " +
         std::to_string(cfg.objective->dim()) + ", " + std::string(to_string(cfg.integrator.scheme)) +
         " h=" + format_number(cfg.integrator.h);
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.methods.size() > 1) {
    throw ConfigError("run takes exactly one [method] section, found " +
                      std::to_string(cfg.methods.size()));
  }
  const MethodSpec method = cfg.methods.empty() ? MethodSpec::proposed(1.0, 0.9) : cfg.methods.front();
  const Objective& obj = *cfg.objective;
  if (method.family == Family::NagSc || method.family == Family::TripleMomentum) {
    const ParamSelection p = select_params(method.mu, method.s, obj.convexity_params().L);
    if (p.warning) out << "warning: " << *p.warning << '\n';
  }

  const Trajectory traj = simulate(method, obj, cfg.x0, cfg.integrator, active_perturbation(cfg));
  const DiagnosticsReport report = build_report(traj, cfg.report);

  fs::create_directories(cfg.output.dir);
  if (wants_csv(cfg.output)) {
    write_file(cfg.output.dir / "traj.csv", to_text([&](std::ostream& os) { write_trajectory_csv(os, traj); }), out);
  }
  write_file(cfg.output.dir / "report.json", report_to_json(report) + "\n", out);
  if (cfg.output.plot) {
    PlotOptions po;
    po.title = plot_title(cfg);
    po.log_y = cfg.output.log_y;
    if (po.log_y) po.y_label = "f(x(t)) - f*";
    const std::string svg =
        render_svg({objective_series(traj, method.display_label(), po.log_y)}, po);
    write_file(cfg.output.dir / "fig.svg", svg, out);
  }

  out << method.display_label() << ": terminated_by=" << report.terminated_by
      << " settling_time=" << format_number(report.settling_time)
      << " fitted_rate=" << format_number(report.fitted_rate) << " verdicts=" << report.verdict_string()
      << '\n';
  return traj.terminated_by == Termination::Divergence ? kExitDivergence : kExitOk;
}

int finish_records(const std::string& stem, const std::vector<RunRecord>& records,
                   const ExperimentConfig& cfg, std::ostream& out) {
  fs::create_directories(cfg.output.dir);
  if (wants_csv(cfg.output)) {
    write_file(cfg.output.dir / (stem + ".csv"),
               to_text([&](std::ostream& os) { write_records_csv(os, records); }), out);
  }
  if (wants_json(cfg.output)) {
    write_file(cfg.output.dir / (stem + ".json"), records_to_json(records) + "\n", out);
  }
  const bool any_diverged =
      std::any_of(records.begin(), records.end(), [](const RunRecord& r) { return r.diverged; });
  for (const RunRecord& r : records) {
    out << r.label;
    if (r.delta > 0.0) out << " seed=" << r.seed;
    out << ": settling_time=" << format_number(r.settling_time)
        << " fitted_rate=" << format_number(r.fitted_rate) << (r.diverged ? " DIVERGED" : "") << '\n';
  }
  return any_diverged ? kExitDivergence : kExitOk;
}

int cmd_compare(const ExperimentConfig& cfg, std::ostream& out) {
  std::vector<MethodSpec> methods = cfg.methods;
  if (methods.empty()) {
    methods = {MethodSpec::gd_flow(), MethodSpec::hbf(2.0), MethodSpec::proposed(1.0, 0.9)};
  }
  const auto records = compare(methods, *cfg.objective, cfg.x0, cfg.integrator, bench_options(cfg));
  const int code = finish_records("compare", records, cfg, out);

  if (cfg.output.plot) {
    PlotOptions po;
    po.title = plot_title(cfg);
    po.log_y = cfg.output.log_y;
    if (po.log_y) po.y_label = "f(x(t)) - f*";
    std::vector<PlotSeries> series;
    for (const MethodSpec& m : methods) {
      const Trajectory t = simulate(m, *cfg.objective, cfg.x0, cfg.integrator);
      series.push_back(objective_series(t, m.display_label(), po.log_y));
    }
    write_file(cfg.output.dir / "compare.svg", render_svg(series, po), out);
  }
  return code;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out) {
  SweepSpec spec;
  spec.alphas = cfg.sweep_alphas;
  spec.betas = cfg.sweep_betas;
  spec.methods = cfg.methods;
  if (spec.methods.empty()) spec.methods = {MethodSpec::pni(1.0, 0.9), MethodSpec::proposed(1.0, 0.9)};
  spec.seeds = cfg.sweep_seeds.value_or(std::vector<std::uint64_t>{cfg.perturbation.seed});
  spec.perturbation = active_perturbation(cfg);
  spec.integrator = cfg.integrator;
  spec.x0 = cfg.x0;
  const auto records = sweep(spec, *cfg.objective, bench_options(cfg));
  return finish_records("sweep", records, cfg, out);
}

int cmd_persist(const ExperimentConfig& cfg, std::ostream& out) {
  std::vector<MethodSpec> methods = cfg.methods;
  if (methods.empty()) methods = {MethodSpec::pni(1.0, 0.9), MethodSpec::proposed(1.0, 0.9)};
  std::vector<std::uint64_t> seeds;
  if (cfg.persist_seeds) {
    seeds = *cfg.persist_seeds;
  } else {
    for (std::uint64_t i = 0; i < 20; ++i) seeds.push_back(cfg.perturbation.seed + i);
  }
  const auto rows = persistence_experiment(cfg.persist_deltas, seeds, methods, *cfg.objective,
                                           cfg.x0, cfg.integrator, cfg.perturbation,
                                           bench_options(cfg));
  fs::create_directories(cfg.output.dir);
  if (wants_csv(cfg.output)) {
    write_file(cfg.output.dir / "persist.csv",
               to_text([&](std::ostream& os) { write_persistence_csv(os, rows); }), out);
  }
  if (wants_json(cfg.output)) {
    write_file(cfg.output.dir / "persist.json", persistence_to_json(rows) + "\n", out);
  }
  std::size_t diverged = 0;
  for (const auto& r : rows) {
    out << "delta=" << format_number(r.delta) << ' ' << r.label
        << ": median_error=" << format_number(r.median_error)
        << " max_error=" << format_number(r.max_error) << '\n';
    diverged += r.diverged;
  }
  return diverged > 0 ? kExitDivergence : kExitOk;
}

int cmd_check(const ExperimentConfig& cfg, std::ostream& out) {
  const auto results = run_acceptance(cfg.output.threads);
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name << " -- " << r.detail << '\n';
    j.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    all = all && r.passed;
  }
  fs::create_directories(cfg.output.dir);
  write_file(cfg.output.dir / "check.json", j.dump(2) + "\n", out);
  out << (all ? "all criteria passed\n" : "some criteria FAILED\n");
  return all ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Continuous-time accelerated gradient flows: simulate, compare, sweep, verify",
               "manifold-descent"};
  app.require_subcommand(1);
  Flags flags;
  std::string which;
  for (const char* name : {"run", "compare", "sweep", "persist", "check"}) {
    static const std::map<std::string, std::string> help = {
        {"run", "Simulate one method and write trajectory, report and plot"},
        {"compare", "Run several methods from the same start"},
        {"sweep", "Evaluate an alpha x beta x method x seed grid"},
        {"persist", "Terminal error under per-step perturbations"},
        {"check", "Run the built-in invariant and acceptance suite"}};
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    add_common_options(*sub, flags);
    sub->callback([&which, name] { which = name; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  ExperimentConfig cfg;
  try {
    cfg = load_experiment(flags);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (which == "run") return cmd_run(cfg, out);
    if (which == "compare") return cmd_compare(cfg, out);
    if (which == "sweep") return cmd_sweep(cfg, out);
    if (which == "persist") return cmd_persist(cfg, out);
    return cmd_check(cfg, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InputError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace manifold_descent::cli
