#pragma once

#include <manifold_descent/bench.hpp>
#include <manifold_descent/diagnostics.hpp>
#include <manifold_descent/dynamics.hpp>
#include <manifold_descent/integrate.hpp>
#include <manifold_descent/objective.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace manifold_descent::cli {

/// Config problem, already prefixed with "source:line: ".
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Sectioned key-value text:
///
///   # comment
///   [section]
///   key = value
///
/// Sections keep file order; duplicate keys in one section are rejected.
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    std::string origin;  // "file:line" or "--set"
  };
  struct Section {
    std::string name;
    std::string origin;
    std::vector<std::pair<std::string, Entry>> entries;

    [[nodiscard]] const Entry* find(std::string_view key) const;
  };

  static ConfigFile parse(std::string_view text, const std::string& source);
  static ConfigFile load(const std::filesystem::path& path);

  /// Applies "section.key=value". The last dot splits section from key, so
  /// "method.fast.alpha=2" targets section "method.fast".
  void apply_override(std::string_view assignment, const std::string& origin = "--set");
  void set(const std::string& section, const std::string& key, std::string value,
           const std::string& origin);

  [[nodiscard]] const Section* section(std::string_view name) const;
  [[nodiscard]] const std::vector<Section>& sections() const noexcept { return sections_; }

 private:
  Section& section_for_write(const std::string& name, const std::string& origin);
  std::vector<Section> sections_;
};

enum class OutputFormat { Csv, Json, Both };

struct OutputSettings {
  std::filesystem::path dir = "out";
  OutputFormat format = OutputFormat::Both;
  bool plot = false;
  bool log_y = false;
  bool timing = false;
  unsigned threads = 0;
};

/// Fully validated experiment description built from a ConfigFile.
struct ExperimentConfig {
  std::optional<Objective> objective;
  /// Methods from [method] / [method.<name>] sections, in file order. Empty
  /// when the file names none; each subcommand then picks its own default.
  std::vector<MethodSpec> methods;
  PhaseState x0;
  IntegratorConfig integrator;
  PerturbationSpec perturbation;
  std::vector<double> sweep_alphas{1.0, 10.0};
  std::vector<double> sweep_betas{0.3, 0.6, 0.9};
  std::optional<std::vector<std::uint64_t>> sweep_seeds;
  std::vector<double> persist_deltas{1e-3};
  std::optional<std::vector<std::uint64_t>> persist_seeds;
  ReportOptions report;
  OutputSettings output;
};

/// Validates every section and key against the schema, then builds the typed
/// configuration. Unknown sections or keys are errors.
ExperimentConfig build_experiment(const ConfigFile& file);

std::vector<double> parse_number_list(std::string_view text);
/// "0, 3, 7" or the inclusive range "0..19".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

}  // namespace manifold_descent::cli
