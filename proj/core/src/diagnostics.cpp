#include "manifold_descent/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace manifold_descent {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool decays_with_storage_equality(Family f) { return f == Family::PnI; }
bool decays_with_storage_bound(Family f) { return f == Family::Proposed || f == Family::NagSc; }

void require_nonempty(const Trajectory& traj) {
  if (traj.size() == 0) throw PreconditionError("empty trajectory");
}

}  // namespace

double check_storage_decay(const Trajectory& traj, double alpha) {
  require_nonempty(traj);
  const Family fam = traj.method.family;
  if (!decays_with_storage_equality(fam) && !decays_with_storage_bound(fam)) {
    throw PreconditionError("storage decay applies to pni, proposed and nag_sc trajectories");
  }
  const double s0 = traj.storage_vals.front();
  if (s0 == 0.0) return 0.0;
  const double denom = std::max(s0, kStorageFloor);
  const bool equality = decays_with_storage_equality(fam);

  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double expected = s0 * std::exp(-2.0 * alpha * traj.times[k]);
    const double diff = traj.storage_vals[k] - expected;
    const double dev = equality ? std::abs(diff) / denom : std::max(0.0, diff) / denom;
    if (!(dev <= worst)) worst = dev;  // NaN propagates
  }
  return worst;
}

InvarianceCheck check_manifold_invariance(const Trajectory& traj, double tol) {
  require_nonempty(traj);
  if (!is_second_order(traj.method.family)) {
    throw PreconditionError("manifold residual is undefined for first-order trajectories");
  }
  const PhaseState& s0 = traj.states.front();
  if (traj.psi_norms.front() > kOnManifoldTol * (1.0 + s0.x2.norm())) {
    throw PreconditionError("trajectory does not start on the manifold");
  }
  InvarianceCheck out;
  for (double p : traj.psi_norms) {
    if (!(p <= out.max_psi)) out.max_psi = p;
  }
  out.passed = out.max_psi <= tol;
  return out;
}

LyapunovCheck check_lyapunov(const Trajectory& traj, LyapunovKind which) {
  require_nonempty(traj);
  if (!is_second_order(traj.method.family)) {
    throw PreconditionError("Lyapunov checks need a second-order trajectory");
  }
  const auto& v = which == LyapunovKind::Basic ? traj.lyap_basic : traj.lyap_exp;
  if (std::any_of(v.begin(), v.end(), [](double x) { return std::isnan(x); })) {
    throw UnsupportedError("Lyapunov values unavailable (unknown minimizer)");
  }
  LyapunovCheck out;
  out.worst_uptick = v.size() > 1 ? -kInf : 0.0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    const double up = v[k] - v[k - 1];
    out.worst_uptick = std::max(out.worst_uptick, up);
    if (up > kLyapunovStepTol) out.monotone = false;
  }
  return out;
}

DecayFit fit_decay_rate(const Trajectory& traj, std::optional<std::pair<double, double>> window) {
  require_nonempty(traj);
  const double horizon = traj.times.back();
  const auto [lo, hi] = window.value_or(std::pair{0.2 * horizon, 0.8 * horizon});
  if (!(hi > lo)) throw InputError("decay-rate window must have t_hi > t_lo");

  // Below this the gap is dominated by rounding in f(x) - f*.
  const double floor = std::max(kStorageFloor, 1e3 * std::numeric_limits<double>::epsilon() *
                                                   std::abs(traj.f_star));
  std::vector<double> ts;
  std::vector<double> ys;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    if (t < lo) continue;
    if (t > hi) break;
    const double gap = traj.f_vals[k] - traj.f_star;
    if (!(gap > floor) || !std::isfinite(gap)) break;
    ts.push_back(t);
    ys.push_back(std::log(gap));
  }
  if (ts.size() < 2) {
    throw NumericError("too few samples above the floating-point floor to fit a decay rate");
  }

  const auto n = static_cast<double>(ts.size());
  double mt = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= n;
  my /= n;
  double sty = 0.0;
  double stt = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sty += (ts[i] - mt) * (ys[i] - my);
    stt += (ts[i] - mt) * (ts[i] - mt);
  }
  if (!(stt > 0.0)) throw NumericError("degenerate decay-rate window");
  return DecayFit{-sty / stt, ts.front(), ts.back(), ts.size()};
}

double settling_time(const Trajectory& traj, double eps) {
  require_nonempty(traj);
  if (!(eps > 0.0)) throw InputError("settling band eps must be positive");
  if (traj.terminated_by == Termination::Divergence) return kInf;
  for (std::size_t k = traj.size(); k-- > 0;) {
    const double gap = traj.f_vals[k] - traj.f_star;
    if (!(gap <= eps)) {
      return k + 1 < traj.size() ? traj.times[k + 1] : kInf;
    }
  }
  return traj.times.front();
}

double max_undershoot(const Trajectory& traj) {
  require_nonempty(traj);
  const Vector d0 = traj.states.front().x1 - traj.x_star;
  double worst = 0.0;
  for (const PhaseState& s : traj.states) {
    const Vector d = s.x1 - traj.x_star;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const double side = d0[i] >= 0.0 ? 1.0 : -1.0;
      worst = std::max(worst, -side * d[i]);
    }
  }
  return worst;
}

bool DiagnosticsReport::all_passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.second; });
}

std::string DiagnosticsReport::verdict_string() const {
  std::string out;
  for (const auto& [name, ok] : verdicts) {
    if (!out.empty()) out += ';';
    out += name;
    out += ok ? "=pass" : "=fail";
  }
  return out;
}

DiagnosticsReport build_report(const Trajectory& traj, const ReportOptions& options) {
  require_nonempty(traj);
  DiagnosticsReport r;
  const Family fam = traj.method.family;
  const double alpha = traj.method.effective_alpha();

  r.terminated_by = std::string(to_string(traj.terminated_by));
  r.terminal_gap = traj.f_vals.back() - traj.f_star;
  r.settling_time = settling_time(traj, options.settle_eps);
  try {
    const DecayFit fit = fit_decay_rate(traj, options.window);
    r.fitted_rate = fit.rate;
    r.fit_t_lo = fit.t_lo;
    r.fit_t_hi = fit.t_hi;
  } catch (const std::exception&) {
    r.fitted_rate = kNaN;
    r.fit_t_lo = kNaN;
    r.fit_t_hi = kNaN;
  }

  r.verdicts.emplace_back("finite", traj.terminated_by != Termination::Divergence);

  if (is_second_order(fam)) {
    const PhaseState& s0 = traj.states.front();
    const bool on_manifold = traj.psi_norms.front() <= kOnManifoldTol * (1.0 + s0.x2.norm());
    if (on_manifold) {
      const InvarianceCheck inv = check_manifold_invariance(traj, options.psi_tol);
      r.max_psi_violation = inv.max_psi;
      if (fam == Family::PnI) r.verdicts.emplace_back("manifold_invariance", inv.passed);
    }

    if (decays_with_storage_equality(fam) || decays_with_storage_bound(fam)) {
      r.max_storage_rel_dev = check_storage_decay(traj, alpha);
      r.verdicts.emplace_back("storage_decay", r.max_storage_rel_dev <= options.storage_tol);
    }

    const bool basic = fam == Family::HeavyBall || fam == Family::HBF;
    const LyapunovKind kind = basic ? LyapunovKind::Basic : LyapunovKind::Exp;
    const LyapunovCheck ly = check_lyapunov(traj, kind);
    r.lyapunov_kind = basic ? "basic" : "exp";
    r.lyapunov_monotone = ly.monotone;
    r.worst_uptick = ly.worst_uptick;
    if (basic) r.verdicts.emplace_back("lyapunov_basic", ly.monotone);
    if (decays_with_storage_bound(fam)) r.verdicts.emplace_back("lyapunov_exp", ly.monotone);
  } else {
    r.lyapunov_kind = "basic";
    const auto& v = traj.lyap_basic;
    r.worst_uptick = v.size() > 1 ? -kInf : 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) {
      r.worst_uptick = std::max(r.worst_uptick, v[k] - v[k - 1]);
    }
    r.lyapunov_monotone = r.worst_uptick <= kLyapunovStepTol;
  }
  return r;
}

}  // namespace manifold_descent
