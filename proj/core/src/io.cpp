#include "manifold_descent/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>

namespace manifold_descent {

namespace {

using nlohmann::ordered_json;

ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const Eigen::Index n = traj.x_star.size();
  const bool second = is_second_order(traj.method.family);
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x1_" << i;
  if (second) {
    for (Eigen::Index i = 0; i < n; ++i) os << ",x2_" << i;
  }
  os << ",f,grad_norm,psi_norm,S,V_basic,V_exp\n";

  for (std::size_t k = 0; k < traj.size(); ++k) {
    const PhaseState& s = traj.states[k];
    os << format_number(traj.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_number(s.x1[i]);
    if (second) {
      for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_number(s.x2[i]);
    }
    os << ',' << format_number(traj.f_vals[k]) << ',' << format_number(traj.grad_norms[k]) << ','
       << format_number(traj.psi_norms[k]) << ',' << format_number(traj.storage_vals[k]) << ','
       << format_number(traj.lyap_basic[k]) << ',' << format_number(traj.lyap_exp[k]) << '\n';
  }
}

std::string report_to_json(const DiagnosticsReport& r, int indent) {
  ordered_json j;
  j["max_psi_violation"] = number(r.max_psi_violation);
  j["max_storage_rel_dev"] = number(r.max_storage_rel_dev);
  j["lyapunov_monotone"] = r.lyapunov_monotone;
  j["worst_uptick"] = number(r.worst_uptick);
  j["lyapunov_kind"] = r.lyapunov_kind;
  j["fitted_rate"] = number(r.fitted_rate);
  j["fit_window"] = {number(r.fit_t_lo), number(r.fit_t_hi)};
  j["settling_time"] = number(r.settling_time);
  j["terminal_gap"] = number(r.terminal_gap);
  j["terminated_by"] = r.terminated_by;
  ordered_json verdicts = ordered_json::object();
  for (const auto& [name, ok] : r.verdicts) verdicts[name] = ok;
  j["verdicts"] = std::move(verdicts);
  j["all_passed"] = r.all_passed();
  return j.dump(indent);
}

void write_records_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << "label,family,alpha,beta,mu,s,lambda,gamma,delta,seed,settling_time,fitted_rate,"
        "terminal_gap,verdicts,wall_ms\n";
  for (const RunRecord& r : records) {
    os << csv_field(r.label) << ',' << to_string(r.family) << ',' << format_number(r.alpha) << ','
       << format_number(r.beta) << ',' << format_number(r.mu) << ',' << format_number(r.s) << ','
       << format_number(r.lambda) << ',' << format_number(r.gamma) << ','
       << format_number(r.delta) << ',' << r.seed << ',' << format_number(r.settling_time) << ','
       << format_number(r.fitted_rate) << ',' << format_number(r.terminal_gap) << ','
       << csv_field(r.verdicts) << ',' << format_number(r.wall_ms) << '\n';
  }
}

std::string records_to_json(const std::vector<RunRecord>& records, int indent) {
  ordered_json arr = ordered_json::array();
  for (const RunRecord& r : records) {
    ordered_json j;
    j["label"] = r.label;
    j["family"] = std::string(to_string(r.family));
    j["alpha"] = number(r.alpha);
    j["beta"] = number(r.beta);
    j["mu"] = number(r.mu);
    j["s"] = number(r.s);
    j["lambda"] = number(r.lambda);
    j["gamma"] = number(r.gamma);
    j["delta"] = number(r.delta);
    j["seed"] = r.seed;
    j["settling_time"] = number(r.settling_time);
    j["fitted_rate"] = number(r.fitted_rate);
    j["terminal_gap"] = number(r.terminal_gap);
    j["verdicts"] = r.verdicts;
    j["wall_ms"] = number(r.wall_ms);
    arr.push_back(std::move(j));
  }
  return arr.dump(indent);
}

void write_persistence_csv(std::ostream& os, const std::vector<PersistenceRow>& rows) {
  os << "delta,label,family,n_seeds,median_error,max_error,median_gap,diverged\n";
  for (const PersistenceRow& r : rows) {
    os << format_number(r.delta) << ',' << csv_field(r.label) << ',' << to_string(r.family) << ','
       << r.n_seeds << ',' << format_number(r.median_error) << ','
       << format_number(r.max_error) << ',' << format_number(r.median_gap) << ',' << r.diverged
       << '\n';
  }
}

std::string persistence_to_json(const std::vector<PersistenceRow>& rows, int indent) {
  ordered_json arr = ordered_json::array();
  for (const PersistenceRow& r : rows) {
    ordered_json j;
    j["delta"] = number(r.delta);
    j["label"] = r.label;
    j["family"] = std::string(to_string(r.family));
    j["n_seeds"] = r.n_seeds;
    j["median_error"] = number(r.median_error);
    j["max_error"] = number(r.max_error);
    j["median_gap"] = number(r.median_gap);
    j["diverged"] = r.diverged;
    arr.push_back(std::move(j));
  }
  return arr.dump(indent);
}

}  // namespace manifold_descent
