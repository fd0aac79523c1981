#pragma once

#include "manifold_descent/integrate.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace manifold_descent {

/// Guard for relative deviations when S(0) is (nearly) zero.
inline constexpr double kStorageFloor = 1e-300;
/// Allowed per-sample increase of a Lyapunov value before it counts as an uptick.
inline constexpr double kLyapunovStepTol = 1e-9;
/// |psi(0)| below this (relative to 1 + ||x2(0)||) counts as an on-manifold start.
inline constexpr double kOnManifoldTol = 1e-12;

/// Storage S(t) against S(0) exp(-2 alpha t).
///
/// PnI satisfies this with equality, so the result is the largest
/// |S(t) - S(0)e^{-2 alpha t}| / max(S(0), floor). Proposed and NagSc only
/// satisfy the inequality, so for them the result is the largest positive
/// excess max(0, S(t) - S(0)e^{-2 alpha t}) / max(S(0), floor).
/// Returns 0 for an on-manifold start (vacuous pass).
double check_storage_decay(const Trajectory& traj, double alpha);

struct InvarianceCheck {
  double max_psi = 0.0;
  bool passed = false;
};

/// max_t ||psi(t)|| for a trajectory that starts on the manifold.
/// Throws PreconditionError for first-order trajectories or off-manifold starts.
InvarianceCheck check_manifold_invariance(const Trajectory& traj, double tol);

enum class LyapunovKind { Basic, Exp };

struct LyapunovCheck {
  bool monotone = true;
  /// Largest V(t_{k+1}) - V(t_k); <= 0 means never increased.
  double worst_uptick = 0.0;
};

LyapunovCheck check_lyapunov(const Trajectory& traj, LyapunovKind which);

struct DecayFit {
  /// rho in f - f* ~ C exp(-rho t).
  double rate = 0.0;
  /// Window actually used after dropping samples at the floating-point floor.
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t samples = 0;
};

/// Least-squares slope of log(f - f*) over the window. Defaults to the
/// middle 60% of the recorded horizon. The window is cut short at the first
/// sample whose gap has reached the rounding floor; throws NumericError when
/// fewer than two usable samples remain.
DecayFit fit_decay_rate(const Trajectory& traj,
                        std::optional<std::pair<double, double>> window = std::nullopt);

/// First recorded t after which f - f* stays <= eps. +inf when never, or
/// when the trajectory diverged.
double settling_time(const Trajectory& traj, double eps);

/// Largest excursion of x1 past the minimizer, measured against the side each
/// coordinate started on. Zero for monotone approach.
double max_undershoot(const Trajectory& traj);

struct ReportOptions {
  double settle_eps = 1e-4;
  std::optional<std::pair<double, double>> window;
  double psi_tol = 1e-6;
  double storage_tol = 1e-5;
};

struct DiagnosticsReport {
  double max_psi_violation = 0.0;
  double max_storage_rel_dev = 0.0;
  bool lyapunov_monotone = true;
  double worst_uptick = 0.0;
  std::string lyapunov_kind;
  double fitted_rate = 0.0;
  double fit_t_lo = 0.0;
  double fit_t_hi = 0.0;
  double settling_time = 0.0;
  double terminal_gap = 0.0;
  std::string terminated_by;
  std::vector<std::pair<std::string, bool>> verdicts;

  [[nodiscard]] bool all_passed() const;
  /// "name=pass;name=fail;..."
  [[nodiscard]] std::string verdict_string() const;
};

/// Runs every check that applies to the trajectory's family.
DiagnosticsReport build_report(const Trajectory& traj, const ReportOptions& options = {});

}  // namespace manifold_descent
