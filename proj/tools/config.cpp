#include "config.hpp"

#include <manifold_descent/errors.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace manifold_descent::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    const std::string_view item = trim(text.substr(start, end - start));
    if (item.empty()) {
      if (trim(text).empty()) break;
      throw InputError("empty item in list '" + std::string(text) + "'");
    }
    out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InputError("expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InputError("expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw InputError("expected true or false, got '" + std::string(s) + "'");
}

OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "both") return OutputFormat::Both;
  throw InputError("format must be csv, json or both");
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"objective", {"kind", "dim", "matrix", "offset"}},
      {"method", {"family", "alpha", "beta", "lambda", "gamma", "mu", "s", "label"}},
      {"initial", {"x1", "x2"}},
      {"integrator", {"scheme", "h", "t_max", "grad_tol", "record_every"}},
      {"perturbation", {"delta", "distribution", "seed", "target"}},
      {"sweep", {"alphas", "betas", "seeds"}},
      {"persist", {"deltas", "seeds"}},
      {"diagnostics", {"settle_eps", "window", "psi_tol", "storage_tol"}},
      {"output", {"dir", "format", "plot", "log_y", "timing", "threads"}},
  };
  return s;
}

std::string schema_key(const std::string& section) {
  if (section == "method" || section.rfind("method.", 0) == 0) return "method";
  return section;
}

}  // namespace

const ConfigFile::Entry* ConfigFile::Section::find(std::string_view key) const {
  for (const auto& [k, e] : entries) {
    if (k == key) return &e;
  }
  return nullptr;
}

ConfigFile ConfigFile::parse(std::string_view text, const std::string& source) {
  ConfigFile cfg;
  std::string current;
  bool have_section = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      if (nl == std::string_view::npos) break;
      continue;
    }

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (name.empty()) throw ConfigError(where + ": empty section name");
      if (cfg.section(name) != nullptr) throw ConfigError(where + ": duplicate section [" + name + "]");
      cfg.section_for_write(name, where);
      current = name;
      have_section = true;
    } else {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
      if (!have_section) throw ConfigError(where + ": key outside of any [section]");
      const std::string key(trim(line.substr(0, eq)));
      if (key.empty()) throw ConfigError(where + ": missing key before '='");
      Section& sec = cfg.section_for_write(current, where);
      if (sec.find(key) != nullptr) {
        throw ConfigError(where + ": duplicate key '" + key + "' in [" + current + "]");
      }
      sec.entries.emplace_back(key, Entry{std::string(trim(line.substr(eq + 1))), where});
    }
    if (nl == std::string_view::npos) break;
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

ConfigFile::Section& ConfigFile::section_for_write(const std::string& name,
                                                   const std::string& origin) {
  for (Section& s : sections_) {
    if (s.name == name) return s;
  }
  sections_.push_back(Section{name, origin, {}});
  return sections_.back();
}

const ConfigFile::Section* ConfigFile::section(std::string_view name) const {
  for (const Section& s : sections_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void ConfigFile::set(const std::string& section, const std::string& key, std::string value,
                     const std::string& origin) {
  Section& sec = section_for_write(section, origin);
  for (auto& [k, e] : sec.entries) {
    if (k == key) {
      e = Entry{std::move(value), origin};
      return;
    }
  }
  sec.entries.emplace_back(key, Entry{std::move(value), origin});
}

void ConfigFile::apply_override(std::string_view assignment, const std::string& origin) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(origin + ": override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string_view lhs = trim(assignment.substr(0, eq));
  const std::size_t dot = lhs.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == lhs.size()) {
    throw ConfigError(origin + ": override key '" + std::string(lhs) + "' must be section.key");
  }
  set(std::string(lhs.substr(0, dot)), std::string(lhs.substr(dot + 1)),
      std::string(trim(assignment.substr(eq + 1))), origin);
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  for (std::string_view item : split_list(text)) out.push_back(parse_double(item));
  if (out.empty()) throw InputError("expected a nonempty list of numbers");
  return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  text = trim(text);
  if (const std::size_t dots = text.find(".."); dots != std::string_view::npos) {
    const std::uint64_t lo = parse_u64(text.substr(0, dots));
    const std::uint64_t hi = parse_u64(text.substr(dots + 2));
    if (hi < lo) throw InputError("seed range must be ascending");
    if (hi - lo >= 1'000'000) throw InputError("seed range is too large");
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  std::vector<std::uint64_t> out;
  for (std::string_view item : split_list(text)) out.push_back(parse_u64(item));
  if (out.empty()) throw InputError("expected a nonempty seed list");
  return out;
}

ExperimentConfig build_experiment(const ConfigFile& file) {
  // Schema check first so typos surface with their position.
  for (const auto& sec : file.sections()) {
    const auto it = schema().find(schema_key(sec.name));
    if (it == schema().end()) {
      throw ConfigError(sec.origin + ": unknown section [" + sec.name + "]");
    }
    for (const auto& [key, entry] : sec.entries) {
      if (!it->second.contains(key)) {
        throw ConfigError(entry.origin + ": unknown key '" + key + "' in [" + sec.name + "]");
      }
    }
  }

  // Runs `fn` with the entry's value, rethrowing parse failures with position.
  auto with = [](const ConfigFile::Section* sec, std::string_view key, const auto& fn) {
    if (sec == nullptr) return;
    const ConfigFile::Entry* e = sec->find(key);
    if (e == nullptr) return;
    try {
      fn(e->value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError(e->origin + ": [" + sec->name + "] " + std::string(key) + ": " + ex.what());
    }
  };

  ExperimentConfig cfg;

  // [objective]
  {
    const auto* sec = file.section("objective");
    ObjectiveKind kind = ObjectiveKind::UnitQuadratic;
    Eigen::Index dim = 1;
    bool dim_given = false;
    std::vector<double> matrix;
    std::vector<double> offset;
    with(sec, "kind", [&](const std::string& v) { kind = objective_kind_from_string(v); });
    with(sec, "dim", [&](const std::string& v) {
      dim = static_cast<Eigen::Index>(parse_u64(v));
      dim_given = true;
      if (dim == 0) throw InputError("dim must be positive");
    });
    with(sec, "matrix", [&](const std::string& v) { matrix = parse_number_list(v); });
    with(sec, "offset", [&](const std::string& v) { offset = parse_number_list(v); });

    const std::string where = sec ? sec->origin : std::string("<defaults>");
    try {
      if (kind == ObjectiveKind::UnitQuadratic) {
        if (!matrix.empty() || !offset.empty()) {
          throw InputError("unit_quadratic takes no matrix or offset");
        }
        cfg.objective = Objective::unit_quadratic(dim);
      } else {
        if (matrix.empty()) throw InputError(std::string(to_string(kind)) + " needs a matrix");
        if (!dim_given) {
          const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(matrix.size()))));
          dim = n;
        }
        if (static_cast<Eigen::Index>(matrix.size()) != dim * dim) {
          throw InputError("matrix needs dim*dim = " + std::to_string(dim * dim) + " entries, got " +
                           std::to_string(matrix.size()));
        }
        Matrix A(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
          for (Eigen::Index j = 0; j < dim; ++j) A(i, j) = matrix[static_cast<std::size_t>(i * dim + j)];
        }
        if (kind == ObjectiveKind::SpdQuadratic) {
          if (!offset.empty()) throw InputError("spd_quadratic takes no offset; use shifted_quadratic");
          cfg.objective = Objective::spd_quadratic(A);
        } else {
          if (static_cast<Eigen::Index>(offset.size()) != dim) {
            throw InputError("offset needs " + std::to_string(dim) + " entries");
          }
          cfg.objective = Objective::shifted_quadratic(A, to_vector(offset));
        }
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError(where + ": [objective] " + ex.what());
    }
  }
  const Eigen::Index n = cfg.objective->dim();

  // [method] and [method.<name>]
  for (const auto& sec : file.sections()) {
    if (schema_key(sec.name) != "method") continue;
    MethodSpec m;
    const bool named = sec.name.size() > 7;
    if (sec.find("family") == nullptr) {
      throw ConfigError(sec.origin + ": [" + sec.name + "] needs a family");
    }
    with(&sec, "family", [&](const std::string& v) { m.family = family_from_string(v); });
    with(&sec, "alpha", [&](const std::string& v) { m.alpha = parse_double(v); });
    with(&sec, "beta", [&](const std::string& v) { m.beta = parse_double(v); });
    with(&sec, "lambda", [&](const std::string& v) { m.lambda = parse_double(v); });
    with(&sec, "gamma", [&](const std::string& v) { m.gamma = parse_double(v); });
    with(&sec, "mu", [&](const std::string& v) { m.mu = parse_double(v); });
    with(&sec, "s", [&](const std::string& v) { m.s = parse_double(v); });
    with(&sec, "label", [&](const std::string& v) { m.label = v; });
    if (named && m.label.empty()) m.label = sec.name.substr(7);
    try {
      m.validate();
    } catch (const std::exception& ex) {
      throw ConfigError(sec.origin + ": [" + sec.name + "] " + ex.what());
    }
    cfg.methods.push_back(std::move(m));
  }

  // [initial]; a single value is broadcast to every coordinate.
  {
    const auto* sec = file.section("initial");
    auto vec = [&](const std::string& v) {
      const std::vector<double> vals = parse_number_list(v);
      if (vals.size() == 1) return Vector(Vector::Constant(n, vals[0]));
      if (static_cast<Eigen::Index>(vals.size()) != n) {
        throw InputError("needs 1 or " + std::to_string(n) + " values");
      }
      return to_vector(vals);
    };
    cfg.x0.x1 = Vector::Constant(n, 1.0);
    with(sec, "x1", [&](const std::string& v) { cfg.x0.x1 = vec(v); });
    with(sec, "x2", [&](const std::string& v) { cfg.x0.x2 = vec(v); });
  }

  // [integrator]
  {
    const auto* sec = file.section("integrator");
    auto& ic = cfg.integrator;
    with(sec, "scheme", [&](const std::string& v) { ic.scheme = scheme_from_string(v); });
    with(sec, "h", [&](const std::string& v) { ic.h = parse_double(v); });
    with(sec, "t_max", [&](const std::string& v) { ic.t_max = parse_double(v); });
    with(sec, "grad_tol", [&](const std::string& v) { ic.grad_tol = parse_double(v); });
    with(sec, "record_every", [&](const std::string& v) {
      ic.record_every = static_cast<int>(parse_u64(v));
    });
    try {
      ic.validate();
    } catch (const std::exception& ex) {
      throw ConfigError((sec ? sec->origin : std::string("<defaults>")) + ": [integrator] " + ex.what());
    }
  }

  // [perturbation]
  {
    const auto* sec = file.section("perturbation");
    auto& p = cfg.perturbation;
    with(sec, "delta", [&](const std::string& v) {
      p.delta = parse_double(v);
      if (!(p.delta >= 0.0)) throw InputError("delta must be >= 0");
    });
    with(sec, "distribution", [&](const std::string& v) { p.distribution = distribution_from_string(v); });
    with(sec, "seed", [&](const std::string& v) { p.seed = parse_u64(v); });
    with(sec, "target", [&](const std::string& v) { p.target = target_from_string(v); });
  }

  // [sweep]
  {
    const auto* sec = file.section("sweep");
    with(sec, "alphas", [&](const std::string& v) { cfg.sweep_alphas = parse_number_list(v); });
    with(sec, "betas", [&](const std::string& v) { cfg.sweep_betas = parse_number_list(v); });
    with(sec, "seeds", [&](const std::string& v) { cfg.sweep_seeds = parse_seed_list(v); });
  }

  // [persist]
  {
    const auto* sec = file.section("persist");
    with(sec, "deltas", [&](const std::string& v) {
      cfg.persist_deltas = parse_number_list(v);
      for (double d : cfg.persist_deltas) {
        if (!(d >= 0.0)) throw InputError("deltas must be >= 0");
      }
    });
    with(sec, "seeds", [&](const std::string& v) { cfg.persist_seeds = parse_seed_list(v); });
  }

  // [diagnostics]
  {
    const auto* sec = file.section("diagnostics");
    auto& r = cfg.report;
    with(sec, "settle_eps", [&](const std::string& v) {
      r.settle_eps = parse_double(v);
      if (!(r.settle_eps > 0.0)) throw InputError("settle_eps must be positive");
    });
    with(sec, "window", [&](const std::string& v) {
      const auto w = parse_number_list(v);
      if (w.size() != 2 || !(w[1] > w[0])) throw InputError("window must be 't_lo, t_hi' with t_hi > t_lo");
      r.window = std::pair{w[0], w[1]};
    });
    with(sec, "psi_tol", [&](const std::string& v) { r.psi_tol = parse_double(v); });
    with(sec, "storage_tol", [&](const std::string& v) { r.storage_tol = parse_double(v); });
  }

  // [output]
  {
    const auto* sec = file.section("output");
    auto& o = cfg.output;
    with(sec, "dir", [&](const std::string& v) {
      if (v.empty()) throw InputError("dir must not be empty");
      o.dir = v;
    });
    with(sec, "format", [&](const std::string& v) { o.format = parse_format(v); });
    with(sec, "plot", [&](const std::string& v) { o.plot = parse_bool(v); });
    with(sec, "log_y", [&](const std::string& v) { o.log_y = parse_bool(v); });
    with(sec, "timing", [&](const std::string& v) { o.timing = parse_bool(v); });
    with(sec, "threads", [&](const std::string& v) { o.threads = static_cast<unsigned>(parse_u64(v)); });
  }

  return cfg;
}

}  // namespace manifold_descent::cli
