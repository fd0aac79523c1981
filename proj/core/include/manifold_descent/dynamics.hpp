#pragma once

#include "manifold_descent/objective.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace manifold_descent {

/// Continuous-time optimizer families.
///
///   GdFlow          x' = -grad f(x)
///   HeavyBall       x'' + grad f(x) = 0                        (undamped)
///   HBF             x'' + lambda x' + grad f(x) = 0
///   PnI             x'' + beta H x' + alpha x' + alpha beta grad f = 0
///   Proposed        x'' + 2 alpha x' + beta H x' + (1 + alpha beta) grad f = 0
///   NagSc           Proposed with alpha = sqrt(mu), beta = sqrt(s)
///   TripleMomentum  x'' + 2 sqrt(mu) x' + gamma (1 + sqrt(mu s)) sqrt(s) H x'
///                       + (1 + sqrt(mu s)) grad f = 0
///
/// H is the Hessian of f at x, only ever applied to the velocity.
enum class Family { GdFlow, HeavyBall, HBF, PnI, Proposed, NagSc, TripleMomentum };

inline constexpr std::array<Family, 7> kAllFamilies = {
    Family::GdFlow, Family::HeavyBall, Family::HBF,           Family::PnI,
    Family::Proposed, Family::NagSc,   Family::TripleMomentum};

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);
[[nodiscard]] constexpr bool is_second_order(Family f) noexcept { return f != Family::GdFlow; }

/// Family tag plus parameters. Only the fields relevant to `family` are read.
///
/// `alpha` is the manifold attraction rate; the storage function then decays
/// as exp(-2 alpha t). The doubled rate never appears in the API.
struct MethodSpec {
  Family family = Family::Proposed;
  double alpha = 1.0;
  double beta = 0.9;
  double lambda = 2.0;
  double gamma = 1.0;
  double mu = 1.0;
  double s = 0.81;
  std::string label;

  static MethodSpec gd_flow();
  static MethodSpec heavy_ball();
  static MethodSpec hbf(double lambda);
  static MethodSpec pni(double alpha, double beta);
  static MethodSpec proposed(double alpha, double beta);
  static MethodSpec nag_sc(double mu, double s);
  static MethodSpec triple_momentum(double mu, double s, double gamma = 1.0);

  /// alpha for PnI/Proposed, sqrt(mu) for NagSc/TripleMomentum, the raw
  /// field otherwise (used only for diagnostics on those families).
  [[nodiscard]] double effective_alpha() const;
  /// beta for PnI/Proposed, sqrt(s) for NagSc/TripleMomentum, raw field otherwise.
  [[nodiscard]] double effective_beta() const;
  /// `label` if set, else family name with its relevant parameters.
  [[nodiscard]] std::string display_label() const;
  /// Throws InputError when a field read by `family` is out of range.
  void validate() const;
};

/// Position x1 and, for second-order families, velocity x2 (empty otherwise).
struct PhaseState {
  Vector x1;
  Vector x2;

  [[nodiscard]] bool second_order() const noexcept { return x2.size() > 0; }
  [[nodiscard]] bool all_finite() const { return x1.allFinite() && x2.allFinite(); }
  [[nodiscard]] double norm() const { return std::sqrt(x1.squaredNorm() + x2.squaredNorm()); }
};

/// Time derivative of `state` under `method`.
PhaseState rhs(const MethodSpec& method, const Objective& obj, const PhaseState& state);

/// Manifold-stabilizing input u1 = -beta H x2 - alpha (x2 + beta grad f(x1)).
Vector control_pni(const Objective& obj, const PhaseState& state, double alpha, double beta);

/// Transversal input u2 = -alpha x2 - grad f(x1).
Vector control_transversal(const Objective& obj, const PhaseState& state, double alpha);

/// psi = x2 + beta grad f(x1); zero exactly on the target manifold.
Vector manifold_residual(const Objective& obj, const PhaseState& state, double beta);

/// S = 1/2 ||psi||^2.
double storage(const Objective& obj, const PhaseState& state, double beta);

/// V = f(x1) - f* + 1/2 ||x2||^2.
double lyapunov_basic(const Objective& obj, const PhaseState& state, double fstar);

/// V = f(x1) - f* + 1/2 ||x2||^2 + 1/2 ||x2 + alpha (x1 - x*)||^2.
double lyapunov_exp(const Objective& obj, const PhaseState& state, const Vector& xstar,
                    double fstar, double alpha);

struct ParamSelection {
  double alpha = 0.0;
  double beta = 0.0;
  /// Set when s exceeds 1/L. Advisory only.
  std::optional<std::string> warning;
};

/// alpha = sqrt(mu), beta = sqrt(s). With L given, warns when s > 1/L.
ParamSelection select_params(double mu, double s, std::optional<double> L = std::nullopt);

}  // namespace manifold_descent
